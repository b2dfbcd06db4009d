//! Coupled-channel scattering of pairs of field-dressed polar ²Σ molecules.
//!
//! The crate builds Stark- (and spin-) dressed monomer states, a symmetrized
//! pair basis, dipole-dipole couplings with an optional Van Vleck reduction,
//! propagates the radial equations with an absorbing inner boundary and
//! turns the resulting S matrices into cross sections, rate coefficients
//! and scattering lengths.

pub mod angular;
pub mod error;
pub mod monomer;
pub mod units;

pub use error::{Error, Result};
pub mod cli;
pub mod interaction;
pub mod observables;
pub mod pair_basis;
pub mod propagator;
