//! Building blocks of the stochastic Wigner simulation that need no FFT:
//! the grid, field storage, reference frame and phase rates, vacuum
//! sampling, the Bogoliubov substep, ensemble estimators and binning.
//!
//! Transform conventions (implemented in the std crate): spectral amplitudes
//! are unitary-DFT coefficients of a position-domain envelope built from
//! plane waves `exp(i(k_x x + k_y y − δω t))`. The pump is held as plain
//! coefficients whose sum is its peak amplitude, so the position-space
//! product `A_p·α*` is exactly the discrete spectral convolution in which
//! pair offsets add up to the pump offset.

pub mod bogoliubov;
pub mod estimate;
pub mod field;
pub mod fluxmap;
pub mod frame;
pub mod grid;
pub mod pump;
pub mod vacuum;

pub use estimate::{estimate_flux, Estimator, FluxAccumulator, FluxEstimate};
pub use field::{ComplexField, Domain};
pub use fluxmap::{azimuthal_average, BinSpec, FluxMap};
pub use frame::ReferenceFrame;
pub use grid::{EnsembleSpec, SimulationGrid};
pub use vacuum::{sample_vacuum, vacuum_mode};
