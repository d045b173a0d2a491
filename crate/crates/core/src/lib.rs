//! Numerical core for spontaneous parametric fluorescence in a type-I
//! uniaxial crystal pumped by ultrashort pulses.
//!
//! The crate is `no_std` (it needs `alloc`) and contains everything that is
//! pure arithmetic:
//!
//! * [`dispersion`]: Sellmeier indices, longitudinal wavevectors of the
//!   o-ray fluorescence and the e-ray pump, and their derivatives.
//! * [`phasematch`]: wavevector mismatch, the perfect phase-matching curve,
//!   exterior observation angles and the linearized mismatch.
//! * [`perturbative`]: single-pair photon flux, in closed form and by direct
//!   quadrature of the sinc² and Gaussianized integrands.
//! * [`wigner`]: grid, field, vacuum sampling, Bogoliubov substep, ensemble
//!   estimators and azimuthal binning used by the stochastic simulation.
//!
//! Transforms, propagation and file formats live in the `parfluor` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dispersion;
mod error;
pub mod perturbative;
pub mod phasematch;
pub mod quadrature;
pub mod units;
pub mod wigner;

pub use error::{Error, Result};
