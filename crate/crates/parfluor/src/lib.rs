//! Std companion of `parfluor-core`: FFT-based propagation of Wigner
//! ensembles, gain calibration, configuration, file formats and the CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibrate;
pub mod cli;
pub mod config;
pub mod ensemble;
mod error;
pub mod fft;
pub mod io;
pub mod propagate;
pub mod pump;
pub mod simulation;
pub mod spectra;

pub use error::{Error, Result};
