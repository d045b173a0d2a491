//! Phase mismatch, the perfect phase-matching curve `k⁰(ω)` and its
//! linearization.
//!
//! Signal `κ` and idler `κ′` are pumped by the component `κ + κ′`. On the
//! perfect-matching curve the pump component is the central one,
//! `(2ω₀, 0, 0)`, and the signal sits at `(ω, k⁰, 0)` with `k⁰ ≥ 0`.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dispersion::{
    d_kz_d_ktrans, d_kz_d_omega, index_ordinary, kz_pump, kz_signal, CrystalSpec, Ray,
    SpectralPoint, TransverseAxis,
};
use crate::units::{omega_from_wavelength_nm, SPEED_OF_LIGHT};
use crate::{Error, Result};

/// Points of the bracketing scan in [`perfect_curve`].
pub const SCAN_POINTS: usize = 512;
/// Root tolerance on `|Δk|` [rad/m].
pub const ROOT_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseMatchPoint {
    pub omega_obs: f64,
    /// Transverse wavevector magnitude `k⁰` [rad/m].
    pub k0: f64,
}

/// First-order expansion coefficients of `Δk` around
/// `κ₀ = (ω_obs, k⁰, 0)`, `κ₀′ = (2ω₀ − ω_obs, −k⁰, 0)`.
///
/// `d_beta1` is the pump–idler slowness difference; `d_beta1_signal` is the
/// pump–signal one, needed when the signal itself moves off `κ₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearizedCoeffs {
    pub omega_obs: f64,
    pub k0: f64,
    pub d_beta1: f64,
    pub d_beta1_signal: f64,
    pub d_rho_x: f64,
    pub d_rho_y: f64,
    pub d_rho_px: f64,
    pub d_rho_py: f64,
}

/// `Δk(κ, κ′) = k_pz(κ + κ′) − k_z(κ) − k_z(κ′)`.
pub fn delta_k(
    kappa: SpectralPoint,
    kappa_prime: SpectralPoint,
    crystal: &CrystalSpec,
) -> Result<f64> {
    let kp = kz_pump(kappa + kappa_prime, crystal)?;
    let ks = kz_signal(kappa, crystal)?;
    let ki = kz_signal(kappa_prime, crystal)?;
    // Sum the two fluorescence terms in a fixed order so the result is
    // symmetric in its arguments bit for bit.
    let (a, b) = if ks <= ki { (ks, ki) } else { (ki, ks) };
    Ok(kp - (a + b))
}

/// Mismatch along the curve family: signal `(ω, k, 0)`, idler `(2ω₀ − ω, −k, 0)`.
fn curve_mismatch(kp: f64, omega: f64, omega_i: f64, k: f64, crystal: &CrystalSpec) -> Result<f64> {
    let ks = kz_signal(SpectralPoint::new(omega, k, 0.0), crystal)?;
    let ki = kz_signal(SpectralPoint::new(omega_i, -k, 0.0), crystal)?;
    Ok(kp - ks - ki)
}

/// Solves `Δk((ω, k, 0), (2ω₀ − ω, −k, 0)) = 0` for the smallest `k ≥ 0`.
///
/// Returns `Ok(None)` when the scan finds no sign change.
pub fn perfect_curve(omega_obs: f64, crystal: &CrystalSpec) -> Result<Option<PhaseMatchPoint>> {
    let omega_i = crystal.conjugate_omega(omega_obs);
    if !(omega_i > 0.0) {
        return Err(Error::invalid(
            "omega_obs",
            "observation frequency exceeds the pump frequency",
        ));
    }
    let kp = kz_pump(SpectralPoint::on_axis(crystal.pump_center_omega), crystal)?;
    let cone = |w: f64| -> Result<f64> { Ok(index_ordinary(w, crystal)? * w / SPEED_OF_LIGHT) };
    let k_max = cone(omega_obs)?.min(cone(omega_i)?) * (1.0 - 1e-12);

    let f = |k: f64| curve_mismatch(kp, omega_obs, omega_i, k, crystal);

    let mut roots: Vec<(f64, f64)> = Vec::new();
    let mut prev_k = 0.0;
    let mut prev_f = f(0.0)?;
    if prev_f == 0.0 {
        return Ok(Some(PhaseMatchPoint { omega_obs, k0: 0.0 }));
    }
    for i in 1..SCAN_POINTS {
        let k = k_max * i as f64 / (SCAN_POINTS - 1) as f64;
        let fk = f(k)?;
        if fk == 0.0 || (fk > 0.0) != (prev_f > 0.0) {
            roots.push((prev_k, k));
        }
        prev_k = k;
        prev_f = fk;
    }
    let Some(&(mut lo, mut hi)) = roots.first() else {
        return Ok(None);
    };
    if roots.len() > 1 {
        log::debug!(
            "{} mismatch roots at omega = {omega_obs:.6e}; keeping the smallest",
            roots.len()
        );
    }

    let mut f_lo = f(lo)?;
    let mut best = (lo, f_lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm.abs() < best.1.abs() {
            best = (mid, fm);
        }
        if fm.abs() < ROOT_TOLERANCE || mid <= lo || mid >= hi {
            break;
        }
        if (fm > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    let f_hi = f(hi)?;
    if f_hi.abs() < best.1.abs() {
        best = (hi, f_hi);
    }
    if best.1.abs() >= ROOT_TOLERANCE {
        log::warn!(
            "bisection stalled at |dk| = {:.3e} rad/m (omega = {omega_obs:.6e})",
            best.1.abs()
        );
    }
    Ok(Some(PhaseMatchPoint {
        omega_obs,
        k0: best.0,
    }))
}

/// Exterior propagation angle `arcsin(c·k/ω)` [rad].
pub fn exterior_angle(omega_obs: f64, k_trans: f64) -> Result<f64> {
    let ratio = SPEED_OF_LIGHT * k_trans.abs() / omega_obs;
    if ratio > 1.0 {
        return Err(Error::TotalInternalReflection { ratio });
    }
    Ok(ratio.asin())
}

/// Inverse of [`exterior_angle`].
pub fn k_trans_from_angle(omega: f64, alpha: f64) -> f64 {
    omega * alpha.sin() / SPEED_OF_LIGHT
}

pub fn linearize(omega_obs: f64, crystal: &CrystalSpec) -> Result<LinearizedCoeffs> {
    let point =
        perfect_curve(omega_obs, crystal)?.ok_or(Error::NoPhaseMatch { omega: omega_obs })?;
    linearize_at(point, crystal)
}

/// Expansion coefficients at a known curve point.
pub fn linearize_at(point: PhaseMatchPoint, crystal: &CrystalSpec) -> Result<LinearizedCoeffs> {
    let k0 = point.k0;
    let signal = SpectralPoint::new(point.omega_obs, k0, 0.0);
    let idler = SpectralPoint::new(crystal.conjugate_omega(point.omega_obs), -k0, 0.0);
    let pump = SpectralPoint::on_axis(crystal.pump_center_omega);

    let beta_p = d_kz_d_omega(Ray::Pump, pump, crystal)?;
    let rho_px = d_kz_d_ktrans(Ray::Pump, TransverseAxis::X, pump, crystal)?;
    let rho_py = d_kz_d_ktrans(Ray::Pump, TransverseAxis::Y, pump, crystal)?;

    let beta_s = d_kz_d_omega(Ray::Signal, signal, crystal)?;
    let beta_i = d_kz_d_omega(Ray::Signal, idler, crystal)?;
    let rho_sx = d_kz_d_ktrans(Ray::Signal, TransverseAxis::X, signal, crystal)?;
    let rho_sy = d_kz_d_ktrans(Ray::Signal, TransverseAxis::Y, signal, crystal)?;
    let rho_ix = d_kz_d_ktrans(Ray::Signal, TransverseAxis::X, idler, crystal)?;
    let rho_iy = d_kz_d_ktrans(Ray::Signal, TransverseAxis::Y, idler, crystal)?;

    Ok(LinearizedCoeffs {
        omega_obs: point.omega_obs,
        k0,
        d_beta1: beta_p - beta_i,
        d_beta1_signal: beta_p - beta_s,
        d_rho_x: rho_px - rho_sx,
        d_rho_y: rho_py - rho_sy,
        d_rho_px: rho_px - rho_ix,
        d_rho_py: rho_py - rho_iy,
    })
}

/// Linearized mismatch: the first-order Taylor expansion of [`delta_k`]
/// about `(κ₀, κ₀′)` in all six variables.
pub fn delta_k_linear(
    coeffs: &LinearizedCoeffs,
    kappa: SpectralPoint,
    kappa_prime: SpectralPoint,
    crystal: &CrystalSpec,
) -> f64 {
    let omega_i0 = crystal.conjugate_omega(coeffs.omega_obs);
    (kappa.omega - coeffs.omega_obs) * coeffs.d_beta1_signal
        + (kappa_prime.omega - omega_i0) * coeffs.d_beta1
        + (kappa.kx - coeffs.k0) * coeffs.d_rho_x
        + kappa.ky * coeffs.d_rho_y
        + (kappa_prime.kx + coeffs.k0) * coeffs.d_rho_px
        + kappa_prime.ky * coeffs.d_rho_py
}

/// One row of a wavelength scan along the curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub lambda_nm: f64,
    pub point: Option<PhaseMatchPoint>,
    /// Exterior angle [rad]; absent without a match or under total internal reflection.
    pub alpha_ext: Option<f64>,
    pub coeffs: Option<LinearizedCoeffs>,
}

/// Uniform wavelength grid `lo..=hi` with `n` points.
pub fn wavelength_grid(lambda_lo: f64, lambda_hi: f64, n_points: usize) -> Vec<f64> {
    match n_points {
        0 => Vec::new(),
        1 => alloc::vec![lambda_lo],
        n => (0..n)
            .map(|i| lambda_lo + (lambda_hi - lambda_lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Checks that the scan window and its conjugate lie inside the dispersion window.
pub fn validate_scan_window(lambda_lo: f64, lambda_hi: f64, crystal: &CrystalSpec) -> Result<()> {
    if !(lambda_lo > 0.0 && lambda_hi >= lambda_lo) {
        return Err(Error::invalid("lambda range", "expected 0 < lo <= hi"));
    }
    for lambda in [lambda_lo, lambda_hi] {
        let w = omega_from_wavelength_nm(lambda);
        crystal.material.n_squared(w)?;
        let wi = crystal.conjugate_omega(w);
        if !(wi > 0.0) {
            return Err(Error::invalid(
                "lambda range",
                "signal frequency above the pump frequency",
            ));
        }
        crystal.material.n_squared(wi)?;
    }
    Ok(())
}

/// Evaluates one scan row. Dispersion failures inside the row become `None`.
pub fn scan_point(lambda_nm: f64, crystal: &CrystalSpec) -> Result<CurveRow> {
    let omega = omega_from_wavelength_nm(lambda_nm);
    let point = perfect_curve(omega, crystal)?;
    let (alpha_ext, coeffs) = match point {
        Some(p) => (
            exterior_angle(omega, p.k0).ok(),
            Some(linearize_at(p, crystal)?),
        ),
        None => (None, None),
    };
    Ok(CurveRow {
        lambda_nm,
        point,
        alpha_ext,
        coeffs,
    })
}

/// Perfect-matching curve, exterior angles and coefficients on a uniform
/// wavelength grid. Rows are in grid order; rows without a match are kept.
pub fn scan_curve(
    lambda_lo: f64,
    lambda_hi: f64,
    n_points: usize,
    crystal: &CrystalSpec,
) -> Result<Vec<CurveRow>> {
    validate_scan_window(lambda_lo, lambda_hi, crystal)?;
    wavelength_grid(lambda_lo, lambda_hi, n_points)
        .into_iter()
        .map(|l| scan_point(l, crystal))
        .collect()
}
