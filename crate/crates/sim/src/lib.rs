//! Probe harness, scans, configuration and output formats for `dyson-core`.
//!
//! * [`probe`]: the annulus discontinuity probe and its tail overrides.
//! * [`scan`]: hidden-transition, ladder and uniqueness scans.
//! * [`checks`]: invariant suites behind the `check` command.
//! * [`config`], [`output`], [`run`], [`cli`]: the `dyson` binary.

#![deny(unsafe_code)]

pub mod checks;
pub mod cli;
pub mod config;
mod error;
pub mod output;
pub mod probe;
pub mod run;
pub mod scan;

pub use error::{Result, SimError};
