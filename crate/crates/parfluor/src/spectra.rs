//! Parallel versions of the wavelength scans; rows come back in grid order.

use rayon::prelude::*;

use parfluor_core::dispersion::CrystalSpec;
use parfluor_core::perturbative::{spectrum_point, Method, PumpSpec, SpectrumRow};
use parfluor_core::phasematch::{scan_point, validate_scan_window, wavelength_grid, CurveRow};
use parfluor_core::quadrature::QuadratureSpec;

use crate::Result;

pub fn scan_curve_par(
    lambda_lo: f64,
    lambda_hi: f64,
    n_points: usize,
    crystal: &CrystalSpec,
) -> Result<Vec<CurveRow>> {
    validate_scan_window(lambda_lo, lambda_hi, crystal)?;
    let rows = wavelength_grid(lambda_lo, lambda_hi, n_points)
        .into_par_iter()
        .map(|l| scan_point(l, crystal))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(rows)
}

pub fn spectrum_par(
    lambda_lo: f64,
    lambda_hi: f64,
    n_points: usize,
    crystal: &CrystalSpec,
    pump: &PumpSpec,
    method: Method,
    quad: &QuadratureSpec,
) -> Result<Vec<SpectrumRow>> {
    validate_scan_window(lambda_lo, lambda_hi, crystal)?;
    pump.validate()?;
    let rows = wavelength_grid(lambda_lo, lambda_hi, n_points)
        .into_par_iter()
        .map(|l| spectrum_point(l, crystal, pump, method, quad))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(rows)
}
