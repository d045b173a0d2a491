//! Single-pair (first order in `1/L_NL`) photon flux.
//!
//! The flux `n̄(κ)` is a density per unit `d³κ = dω dk_x dk_y`, so it carries
//! units of s·m². Multiplying by the volume of one simulation mode gives the
//! mean occupation of that mode.
//!
//! The pump amplitude `A₀` is measured against a fixed reference amplitude of
//! one, so doubling `A₀` at fixed `L_NL` quadruples the flux.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dispersion::{kz_pump, CrystalSpec, PumpQuadratic, SpectralPoint};
use crate::phasematch::{
    delta_k_linear, exterior_angle, linearize_at, perfect_curve, LinearizedCoeffs,
};
use crate::quadrature::{integrate_3d, QuadratureSpec};
use crate::units::{omega_from_wavelength_nm, SPEED_OF_LIGHT};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpSpec {
    /// Pulse duration `τ_p` [s].
    pub tau: f64,
    /// Beam width `w_p` [m].
    pub width: f64,
    /// Central angular frequency `2ω₀` [rad/s].
    pub omega_center: f64,
    /// Peak position-space amplitude `A₀` relative to the unit reference.
    pub amplitude: f64,
    /// Nonlinear length [m]; `f64::INFINITY` switches the coupling off.
    pub l_nl: f64,
}

impl PumpSpec {
    pub fn new(tau: f64, width: f64, omega_center: f64, l_nl: f64) -> Result<Self> {
        let p = PumpSpec {
            tau,
            width,
            omega_center,
            amplitude: 1.0,
            l_nl,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite_pos = |v: f64| v > 0.0 && v.is_finite();
        if !finite_pos(self.tau) {
            return Err(Error::invalid("tau_p", "expected a positive duration"));
        }
        if !finite_pos(self.width) {
            return Err(Error::invalid("w_p", "expected a positive beam width"));
        }
        if !finite_pos(self.omega_center) {
            return Err(Error::invalid(
                "omega_center",
                "expected a positive frequency",
            ));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::invalid("A0", "expected a nonnegative amplitude"));
        }
        if !(self.l_nl > 0.0) {
            return Err(Error::invalid(
                "L_NL",
                "expected a positive nonlinear length",
            ));
        }
        Ok(())
    }

    pub fn inverse_l_nl(&self) -> f64 {
        self.l_nl.recip()
    }

    /// `(L/L_NL)²·A₀²`, the overall prefactor of every perturbative flux.
    fn gain_prefactor(&self, length: f64) -> f64 {
        let g = length / self.l_nl * self.amplitude;
        g * g
    }
}

/// Gaussian pump spectrum at the entrance face,
/// `A₀·w²τ/(2π)^{3/2}·exp(−τ²(ω−2ω₀)²/2 − w²(k_x²+k_y²)/2)`.
pub fn pump_spectrum(kappa_p: SpectralPoint, pump: &PumpSpec) -> Complex64 {
    Complex64::new(pump_spectrum_real(kappa_p, pump), 0.0)
}

pub(crate) fn pump_spectrum_real(kappa_p: SpectralPoint, pump: &PumpSpec) -> f64 {
    let dw = kappa_p.omega - pump.omega_center;
    let (t, w) = (pump.tau, pump.width);
    pump.amplitude * w * w * t / (2.0 * PI).powf(1.5)
        * (-0.5 * t * t * dw * dw
            - 0.5 * w * w * (kappa_p.kx * kappa_p.kx + kappa_p.ky * kappa_p.ky))
            .exp()
}

/// Nonlinear length from material and pump constants:
/// `1/L_NL = ω_p² d_eff A₀ / (8 c² k(ω_p/2))`, with `k` the o-ray wavevector.
///
/// `d_eff` in m/V and `a0` the peak pump field in V/m.
pub fn nonlinear_length(omega_p: f64, d_eff: f64, a0: f64, crystal: &CrystalSpec) -> Result<f64> {
    let k_half =
        crate::dispersion::index_ordinary(0.5 * omega_p, crystal)? * 0.5 * omega_p / SPEED_OF_LIGHT;
    let inv = omega_p * omega_p * d_eff * a0 / (8.0 * SPEED_OF_LIGHT * SPEED_OF_LIGHT * k_half);
    if !(inv > 0.0) {
        return Err(Error::invalid("d_eff", "expected positive d_eff and field"));
    }
    Ok(inv.recip())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxPoint {
    pub omega_obs: f64,
    pub k_trans: f64,
    /// Flux density [s·m²].
    pub flux: f64,
    /// Quadrature error estimate, absent for closed forms.
    pub error_estimate: Option<f64>,
}

fn closed_form_from_coeffs(
    coeffs: &LinearizedCoeffs,
    crystal: &CrystalSpec,
    pump: &PumpSpec,
    bracket_scale: f64,
) -> f64 {
    let l = crystal.length;
    let (t, w) = (pump.tau, pump.width);
    let rho2 = coeffs.d_rho_px * coeffs.d_rho_px + coeffs.d_rho_py * coeffs.d_rho_py;
    let spread = l * l * rho2 / (w * w) + (l * coeffs.d_beta1 / t).powi(2);
    pump.gain_prefactor(l) * w * w * t / (8.0 * PI.powf(1.5))
        * (1.0 + spread / bracket_scale).sqrt().recip()
}

/// Closed-form flux on the perfect-matching curve: the exact integral of
/// the Gaussianized integrand,
/// `(w²τ/(8π^{3/2}))·(L/L_NL)²·[1 + (L²/12)(Δρ′²/w² + Δβ₁′²/τ²)]^{−1/2}`.
pub fn flux_closed_form(
    omega_obs: f64,
    crystal: &CrystalSpec,
    pump: &PumpSpec,
) -> Result<FluxPoint> {
    closed_form_impl(omega_obs, crystal, pump, 12.0)
}

/// Same expression with the bracket written as `4 + L²Δρ′²/w² + (LΔβ₁′/τ)²`
/// under prefactor `w²τ/(4π^{3/2})`, i.e. the spread terms divided by 4
/// instead of 12. Kept for comparison.
pub fn flux_closed_form_printed(
    omega_obs: f64,
    crystal: &CrystalSpec,
    pump: &PumpSpec,
) -> Result<FluxPoint> {
    closed_form_impl(omega_obs, crystal, pump, 4.0)
}

fn closed_form_impl(
    omega_obs: f64,
    crystal: &CrystalSpec,
    pump: &PumpSpec,
    scale: f64,
) -> Result<FluxPoint> {
    pump.validate()?;
    let point =
        perfect_curve(omega_obs, crystal)?.ok_or(Error::NoPhaseMatch { omega: omega_obs })?;
    let coeffs = linearize_at(point, crystal)?;
    Ok(FluxPoint {
        omega_obs,
        k_trans: point.k0,
        flux: closed_form_from_coeffs(&coeffs, crystal, pump, scale),
        error_estimate: None,
    })
}

/// Closed form evaluated from precomputed coefficients.
pub fn flux_closed_form_at(
    coeffs: &LinearizedCoeffs,
    crystal: &CrystalSpec,
    pump: &PumpSpec,
) -> f64 {
    closed_form_from_coeffs(coeffs, crystal, pump, 12.0)
}

#[inline]
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Integration box over the pump argument `κ_p = κ + κ′`, centered on the
/// central pump component.
fn pump_box(pump: &PumpSpec, quad: &QuadratureSpec) -> ([f64; 3], [f64; 3]) {
    let s = quad.half_width_sigmas;
    (
        [pump.omega_center, 0.0, 0.0],
        [s / pump.tau, s / pump.width, s / pump.width],
    )
}

/// Separable `|Ã_p/A_ref|²` factors on a node set.
fn pump_weight_1d(nodes: &[f64], width: f64) -> Vec<f64> {
    nodes
        .iter()
        .map(|&k| (-width * width * k * k).exp())
        .collect()
}

/// Exact single-pair flux: `(L/L_NL)² ∫d³κ′ |Ã_p(κ+κ′)/A_ref|² sinc²(LΔk/2)`.
///
/// Idler components outside the light cone, or pump components without a
/// forward root, do not exist and contribute nothing.
pub fn flux_quadrature_exact(
    kappa: SpectralPoint,
    crystal: &CrystalSpec,
    pump: &PumpSpec,
    quad: &QuadratureSpec,
) -> Result<FluxPoint> {
    pump.validate()?;
    let ks = crate::dispersion::kz_signal(kappa, crystal)?;
    let (center, half) = pump_box(pump, quad);
    let l = crystal.length;
    let (t, w) = (pump.tau, pump.width);
    let norm = (w * w * t).powi(2) / (2.0 * PI).powi(3);

    let r = integrate_3d(center, half, quad, |wp, pxs, pys| {
        let dw = wp - pump.omega_center;
        let gt = (-t * t * dw * dw).exp();
        let quadratic = PumpQuadratic::new(wp, crystal)?;
        let wi = wp - kappa.omega;
        let (no2, _) = crystal.material.n_squared(wi)?;
        let ki2 = no2 * wi * wi / (SPEED_OF_LIGHT * SPEED_OF_LIGHT);
        let gx = pump_weight_1d(pxs, w);
        let gy = pump_weight_1d(pys, w);
        let mut rows = Vec::with_capacity(pxs.len());
        for (ix, &px) in pxs.iter().enumerate() {
            let kix = px - kappa.kx;
            let mut row = 0.0;
            for (iy, &py) in pys.iter().enumerate() {
                let kiy = py - kappa.ky;
                let rad = ki2 - kix * kix - kiy * kiy;
                if rad < 0.0 {
                    continue;
                }
                let Some(kp) = quadratic.root(px, py) else {
                    continue;
                };
                let dk = kp - ks - rad.sqrt();
                let s = sinc(0.5 * l * dk);
                row += gy[iy] * s * s;
            }
            rows.push(gx[ix] * row);
        }
        Ok(gt * crate::quadrature::pairwise_sum(&rows))
    })?;
    let scale = pump.gain_prefactor(l) * norm;
    Ok(FluxPoint {
        omega_obs: kappa.omega,
        k_trans: kappa.kx.hypot(kappa.ky),
        flux: r.value * scale,
        error_estimate: Some(r.error_estimate * scale),
    })
}

/// Gaussianized flux: integrand `exp(−L²Δk_lin²/12)·|Ã_p/A_ref|²` with the
/// mismatch linearized about the curve point at `κ.ω`.
pub fn flux_quadrature_gaussianized(
    kappa: SpectralPoint,
    crystal: &CrystalSpec,
    pump: &PumpSpec,
    quad: &QuadratureSpec,
) -> Result<FluxPoint> {
    pump.validate()?;
    let point =
        perfect_curve(kappa.omega, crystal)?.ok_or(Error::NoPhaseMatch { omega: kappa.omega })?;
    let coeffs = linearize_at(point, crystal)?;
    let (center, half) = pump_box(pump, quad);
    let l = crystal.length;
    let (t, w) = (pump.tau, pump.width);
    let norm = (w * w * t).powi(2) / (2.0 * PI).powi(3);

    let r = integrate_3d(center, half, quad, |wp, pxs, pys| {
        let dw = wp - pump.omega_center;
        let gt = (-t * t * dw * dw).exp();
        let gx = pump_weight_1d(pxs, w);
        let gy = pump_weight_1d(pys, w);
        let mut rows = Vec::with_capacity(pxs.len());
        for (ix, &px) in pxs.iter().enumerate() {
            let mut row = 0.0;
            for (iy, &py) in pys.iter().enumerate() {
                let kp = SpectralPoint::new(wp - kappa.omega, px - kappa.kx, py - kappa.ky);
                let dk = delta_k_linear(&coeffs, kappa, kp, crystal);
                row += gy[iy] * (-l * l * dk * dk / 12.0).exp();
            }
            rows.push(gx[ix] * row);
        }
        Ok(gt * crate::quadrature::pairwise_sum(&rows))
    })?;
    let scale = pump.gain_prefactor(l) * norm;
    Ok(FluxPoint {
        omega_obs: kappa.omega,
        k_trans: kappa.kx.hypot(kappa.ky),
        flux: r.value * scale,
        error_estimate: Some(r.error_estimate * scale),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Exact,
    Gaussianized,
    ClosedFormPrinted,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Exact => "exact",
            Method::Gaussianized => "gaussianized",
            Method::ClosedFormPrinted => "closed_form_printed",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        [
            Method::ClosedForm,
            Method::Exact,
            Method::Gaussianized,
            Method::ClosedFormPrinted,
        ]
        .into_iter()
        .find(|m| m.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub lambda_nm: f64,
    /// Exterior angle [rad] of the curve point.
    pub alpha_ext: Option<f64>,
    pub point: Option<FluxPoint>,
}

/// Flux at one wavelength of the curve; `point` is `None` without a match.
pub fn spectrum_point(
    lambda_nm: f64,
    crystal: &CrystalSpec,
    pump: &PumpSpec,
    method: Method,
    quad: &QuadratureSpec,
) -> Result<SpectrumRow> {
    let omega = omega_from_wavelength_nm(lambda_nm);
    let Some(pm) = perfect_curve(omega, crystal)? else {
        return Ok(SpectrumRow {
            lambda_nm,
            alpha_ext: None,
            point: None,
        });
    };
    let kappa = SpectralPoint::new(omega, pm.k0, 0.0);
    let point = match method {
        Method::ClosedForm => flux_closed_form(omega, crystal, pump)?,
        Method::ClosedFormPrinted => flux_closed_form_printed(omega, crystal, pump)?,
        Method::Exact => flux_quadrature_exact(kappa, crystal, pump, quad)?,
        Method::Gaussianized => flux_quadrature_gaussianized(kappa, crystal, pump, quad)?,
    };
    Ok(SpectrumRow {
        lambda_nm,
        alpha_ext: exterior_angle(omega, pm.k0).ok(),
        point: Some(point),
    })
}

/// Flux along the perfect-matching curve, one row per grid wavelength.
pub fn spectrum_along_curve(
    lambda_grid: &[f64],
    crystal: &CrystalSpec,
    pump: &PumpSpec,
    method: Method,
    quad: &QuadratureSpec,
) -> Result<Vec<SpectrumRow>> {
    lambda_grid
        .iter()
        .map(|&l| spectrum_point(l, crystal, pump, method, quad))
        .collect()
}

/// On-axis pump wavevector, exposed for callers that build frames.
pub fn pump_carrier_kz(crystal: &CrystalSpec) -> Result<f64> {
    kz_pump(SpectralPoint::on_axis(crystal.pump_center_omega), crystal)
}
