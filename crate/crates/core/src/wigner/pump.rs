//! Pump spectrum sampled on the simulation grid.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::grid::SimulationGrid;
use crate::perturbative::{pump_spectrum_real, PumpSpec};
use crate::quadrature::pairwise_sum;
use crate::{Error, Result};

/// Pump coefficients at `z = 0` in grid order, scaled so that they sum to
/// `A₀`: the position-space envelope then peaks at exactly `A₀` at the
/// window center.
pub fn pump_coefficients(grid: &SimulationGrid, pump: &PumpSpec) -> Result<Vec<Complex64>> {
    if (2.0 * grid.omega_center - pump.omega_center).abs() > 1e-9 * pump.omega_center {
        return Err(Error::invalid(
            "omega_center",
            "grid carrier must be half the pump frequency",
        ));
    }
    let unit = PumpSpec {
        amplitude: 1.0,
        ..*pump
    };
    let raw: Vec<f64> = (0..grid.len())
        .map(|i| pump_spectrum_real(grid.pump_point(i), &unit))
        .collect();
    let total = {
        let partial: Vec<f64> = raw.chunks(4096).map(pairwise_sum).collect();
        pairwise_sum(&partial)
    };
    let scale = pump.amplitude / total;
    Ok(raw
        .into_iter()
        .map(|v| Complex64::new(v * scale, 0.0))
        .collect())
}
