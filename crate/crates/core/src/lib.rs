//! Finite-volume machinery for the one-dimensional long-range (Dyson-Ising)
//! ferromagnet and its decimation to the even sublattice.
//!
//! The crate is `no_std` and only needs `alloc`. All transcendental functions
//! go through [`libm`], so a given build produces the same bits on every
//! platform, with or without `std`.
//!
//! Layout:
//!
//! * [`lattice`]: model parameters, spin windows, frozen constraints,
//!   Hamiltonians and effective fields.
//! * [`zeta`]: power-law partial sums and tails.
//! * [`exact`]: brute-force Gibbs kernels, DLR and FKG checks.
//! * [`mcmc`]: seeded Metropolis and ghost-spin cluster samplers.
//! * [`decimation`]: decimation map, annulus geometry, size laws and bounds.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

mod error;
pub(crate) mod math;

pub mod decimation;
pub mod exact;
pub mod lattice;
pub mod mcmc;
pub mod zeta;

pub use error::{Error, Result};
pub use lattice::{FieldProfile, FrozenConstraint, Interval, ModelParams, Spin, SpinWindow, TailRule};
