//! The Dyson-Ising interaction on `Z`: parameters, configurations,
//! constraints, Hamiltonians and the effective fields frozen spins induce on
//! free ones.
//!
//! Hamiltonians are `beta`-free; `beta` enters only through the Gibbs
//! weights in [`crate::exact`] and [`crate::mcmc`].

mod constraint;
mod coupling;
mod field;
mod model;
mod params;
mod window;

pub use constraint::{FrozenConstraint, TailRule};
pub use coupling::{coupling, CouplingTable};
pub use field::{
    effective_field, field_bounds_check, hamiltonian_bc, hamiltonian_free, FieldBoundsReport, FieldProfile,
};
pub use model::ConstrainedModel;
pub use params::ModelParams;
pub use window::{Interval, Spin, SpinWindow};
