//! Refractive indices and longitudinal wavevectors of a uniaxial crystal.
//!
//! The fluorescence propagates as an o-ray, `k_z = sqrt(n_o² ω²/c² − k_x² − k_y²)`.
//! The pump propagates as an e-ray in a crystal whose optic axis lies in the
//! x–z plane at `theta_cut` to the z axis:
//!
//! ```text
//! ω²/c² = (k_x cosθ − k_z sinθ)² / n_e² + ((k_z cosθ + k_x sinθ)² + k_y²) / n_o²
//! ```
//!
//! which is a quadratic in `k_z`; the forward root is returned.

use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::units::{omega_from_wavelength_nm, wavelength_um_from_omega, SPEED_OF_LIGHT};
use crate::{Error, Result};

use alloc::string::String;

/// A plane-wave component `(ω, k_x, k_y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub omega: f64,
    pub kx: f64,
    pub ky: f64,
}

impl SpectralPoint {
    pub const fn new(omega: f64, kx: f64, ky: f64) -> Self {
        Self { omega, kx, ky }
    }

    pub const fn on_axis(omega: f64) -> Self {
        Self::new(omega, 0.0, 0.0)
    }

    pub fn k_trans(&self) -> f64 {
        self.kx.hypot(self.ky)
    }
}

impl core::ops::Add for SpectralPoint {
    type Output = SpectralPoint;

    fn add(self, rhs: SpectralPoint) -> SpectralPoint {
        SpectralPoint::new(self.omega + rhs.omega, self.kx + rhs.kx, self.ky + rhs.ky)
    }
}

/// Sellmeier form `n²(λ) = b0 + b1/(λ² − c1) − b2·λ²`, λ in micrometers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SellmeierSet {
    pub b0: f64,
    pub b1: f64,
    pub c1: f64,
    pub b2: f64,
}

impl SellmeierSet {
    pub fn n_squared(&self, lambda_um: f64) -> f64 {
        let l2 = lambda_um * lambda_um;
        self.b0 + self.b1 / (l2 - self.c1) - self.b2 * l2
    }
}

/// Dispersion data for one crystal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    pub name: String,
    pub sellmeier_o: SellmeierSet,
    pub sellmeier_e: SellmeierSet,
    /// Validity window of the Sellmeier fit, `[lo, hi]` in nm.
    pub window_nm: [f64; 2],
}

impl Material {
    /// β-barium borate.
    pub fn bbo() -> Self {
        Material {
            name: String::from("BBO"),
            sellmeier_o: SellmeierSet {
                b0: 2.7405,
                b1: 0.0184,
                c1: 0.0179,
                b2: 0.0155,
            },
            sellmeier_e: SellmeierSet {
                b0: 2.3730,
                b1: 0.0128,
                c1: 0.0156,
                b2: 0.0044,
            },
            window_nm: [180.0, 2600.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.window_nm;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::invalid("window_nm", "expected 0 < lo < hi"));
        }
        // n² must stay above one across the window; sample it densely.
        let n = 256;
        for i in 0..=n {
            let lambda_um = (lo + (hi - lo) * i as f64 / n as f64) * 1e-3;
            for set in [&self.sellmeier_o, &self.sellmeier_e] {
                let n2 = set.n_squared(lambda_um);
                if !(n2 > 1.0) || !n2.is_finite() {
                    return Err(Error::invalid(
                        "sellmeier",
                        alloc::format!("n² = {n2} at {:.1} nm", lambda_um * 1e3),
                    ));
                }
            }
        }
        Ok(())
    }

    fn lambda_um_checked(&self, omega: f64) -> Result<f64> {
        let lambda_um = wavelength_um_from_omega(omega);
        let lambda_nm = lambda_um * 1e3;
        let [lo, hi] = self.window_nm;
        if !(lambda_nm >= lo && lambda_nm <= hi) {
            return Err(Error::OutOfDispersionWindow {
                wavelength_nm: lambda_nm,
                lo_nm: lo,
                hi_nm: hi,
            });
        }
        Ok(lambda_um)
    }

    /// `(n_o², n_e²)` at angular frequency `omega`.
    pub fn n_squared(&self, omega: f64) -> Result<(f64, f64)> {
        let l = self.lambda_um_checked(omega)?;
        Ok((self.sellmeier_o.n_squared(l), self.sellmeier_e.n_squared(l)))
    }

    pub fn contains_omega(&self, omega: f64) -> bool {
        self.lambda_um_checked(omega).is_ok()
    }

    /// Angular-frequency interval `(lo, hi)` covered by the window.
    pub fn omega_window(&self) -> (f64, f64) {
        (
            omega_from_wavelength_nm(self.window_nm[1]),
            omega_from_wavelength_nm(self.window_nm[0]),
        )
    }
}

/// Crystal geometry plus material data and the pump carrier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrystalSpec {
    pub material: Material,
    /// Angle between the optic axis and the z axis [rad].
    pub theta_cut: f64,
    /// Crystal length [m].
    pub length: f64,
    /// Pump central angular frequency `2ω₀` [rad/s].
    pub pump_center_omega: f64,
}

impl CrystalSpec {
    pub fn new(
        material: Material,
        theta_cut: f64,
        length: f64,
        pump_center_omega: f64,
    ) -> Result<Self> {
        let spec = CrystalSpec {
            material,
            theta_cut,
            length,
            pump_center_omega,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// BBO pumped at 400 nm.
    pub fn bbo(theta_cut_deg: f64, length: f64) -> Result<Self> {
        Self::new(
            Material::bbo(),
            theta_cut_deg.to_radians(),
            length,
            omega_from_wavelength_nm(400.0),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta_cut > 0.0 && self.theta_cut < PI / 2.0) {
            return Err(Error::invalid("theta_cut", "expected 0 < θ < π/2"));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::invalid("length", "expected a positive length"));
        }
        self.material.validate()?;
        self.material.lambda_um_checked(self.pump_center_omega)?;
        Ok(())
    }

    /// Degenerate fluorescence frequency `ω₀`.
    pub fn omega0(&self) -> f64 {
        0.5 * self.pump_center_omega
    }

    /// Idler frequency `2ω₀ − ω` conjugate to `omega`.
    pub fn conjugate_omega(&self, omega: f64) -> f64 {
        self.pump_center_omega - omega
    }
}

/// Which dispersion relation a derivative refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ray {
    /// e-ray pump.
    Pump,
    /// o-ray fluorescence (signal or idler).
    Signal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransverseAxis {
    X,
    Y,
}

pub fn index_ordinary(omega: f64, crystal: &CrystalSpec) -> Result<f64> {
    Ok(crystal.material.n_squared(omega)?.0.sqrt())
}

/// Principal extraordinary index (field along the optic axis).
pub fn index_extraordinary_principal(omega: f64, crystal: &CrystalSpec) -> Result<f64> {
    Ok(crystal.material.n_squared(omega)?.1.sqrt())
}

/// Effective e-ray index for propagation along z:
/// `1/n² = cos²θ/n_o² + sin²θ/n_e²`.
pub fn index_extraordinary_effective(omega: f64, crystal: &CrystalSpec) -> Result<f64> {
    let (no2, ne2) = crystal.material.n_squared(omega)?;
    let (s, c) = crystal.theta_cut.sin_cos();
    Ok((c * c / no2 + s * s / ne2).sqrt().recip())
}

/// o-ray longitudinal wavevector.
pub fn kz_signal(kappa: SpectralPoint, crystal: &CrystalSpec) -> Result<f64> {
    let (no2, _) = crystal.material.n_squared(kappa.omega)?;
    let k2 = no2 * kappa.omega * kappa.omega / (SPEED_OF_LIGHT * SPEED_OF_LIGHT);
    let radicand = k2 - kappa.kx * kappa.kx - kappa.ky * kappa.ky;
    if radicand < 0.0 {
        return Err(Error::EvanescentMode {
            omega: kappa.omega,
            k_trans: kappa.k_trans(),
        });
    }
    Ok(radicand.sqrt())
}

/// Coefficients `(a, b, c)` of `a k_z² + b k_z + c = 0` for the e-ray.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PumpQuadratic {
    a: f64,
    /// `b / k_x`
    b_per_kx: f64,
    /// `c` without the `k_x²`, `k_y²` terms, i.e. `−ω²/c²`
    c_const: f64,
    cx: f64,
    cy: f64,
}

impl PumpQuadratic {
    pub(crate) fn new(omega: f64, crystal: &CrystalSpec) -> Result<Self> {
        let (no2, ne2) = crystal.material.n_squared(omega)?;
        let (s, c) = crystal.theta_cut.sin_cos();
        let (io, ie) = (no2.recip(), ne2.recip());
        Ok(PumpQuadratic {
            a: s * s * ie + c * c * io,
            b_per_kx: 2.0 * s * c * (io - ie),
            c_const: -omega * omega / (SPEED_OF_LIGHT * SPEED_OF_LIGHT),
            cx: c * c * ie + s * s * io,
            cy: io,
        })
    }

    /// Forward (larger) root, or `None` when the discriminant is negative.
    #[inline]
    pub(crate) fn root(&self, kx: f64, ky: f64) -> Option<f64> {
        let a = self.a;
        let b = self.b_per_kx * kx;
        let c = self.c_const + self.cx * kx * kx + self.cy * ky * ky;
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return None;
        }
        let sq = disc.sqrt();
        // Larger root (−b + √disc)/2a, in the cancellation-free form.
        if b >= 0.0 {
            let q = -0.5 * (b + sq);
            if q == 0.0 {
                Some(0.0)
            } else {
                Some(c / q)
            }
        } else {
            Some(0.5 * (-b + sq) / a)
        }
    }
}

/// e-ray longitudinal wavevector (forward root of the quadratic).
pub fn kz_pump(kappa_p: SpectralPoint, crystal: &CrystalSpec) -> Result<f64> {
    PumpQuadratic::new(kappa_p.omega, crystal)?
        .root(kappa_p.kx, kappa_p.ky)
        .ok_or(Error::NoRealRoot {
            omega: kappa_p.omega,
            kx: kappa_p.kx,
            ky: kappa_p.ky,
        })
}

/// Relative residual of the e-ray dispersion relation at `(kappa_p, k_pz)`.
pub fn pump_dispersion_residual(
    kappa_p: SpectralPoint,
    kpz: f64,
    crystal: &CrystalSpec,
) -> Result<f64> {
    let (no2, ne2) = crystal.material.n_squared(kappa_p.omega)?;
    let (s, c) = crystal.theta_cut.sin_cos();
    let lhs = kappa_p.omega * kappa_p.omega / (SPEED_OF_LIGHT * SPEED_OF_LIGHT);
    let u = kappa_p.kx * c - kpz * s;
    let v = kpz * c + kappa_p.kx * s;
    let rhs = u * u / ne2 + (v * v + kappa_p.ky * kappa_p.ky) / no2;
    Ok((lhs - rhs).abs() / lhs)
}

pub fn kz(ray: Ray, kappa: SpectralPoint, crystal: &CrystalSpec) -> Result<f64> {
    match ray {
        Ray::Pump => kz_pump(kappa, crystal),
        Ray::Signal => kz_signal(kappa, crystal),
    }
}

const FD_REL_STEP: f64 = 1e-6;

/// Central difference with one Richardson step.
fn richardson<F: Fn(f64) -> Result<f64>>(f: F, x: f64, h: f64) -> Result<f64> {
    let d = |h: f64| -> Result<f64> { Ok((f(x + h)? - f(x - h)?) / (2.0 * h)) };
    let coarse = d(h)?;
    let fine = d(0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Group slowness `∂k_z/∂ω` [s/m].
pub fn d_kz_d_omega(ray: Ray, kappa: SpectralPoint, crystal: &CrystalSpec) -> Result<f64> {
    d_kz_d_omega_step(ray, kappa, crystal, FD_REL_STEP)
}

/// As [`d_kz_d_omega`] with an explicit relative step.
pub fn d_kz_d_omega_step(
    ray: Ray,
    kappa: SpectralPoint,
    crystal: &CrystalSpec,
    rel_step: f64,
) -> Result<f64> {
    richardson(
        |w| kz(ray, SpectralPoint::new(w, kappa.kx, kappa.ky), crystal),
        kappa.omega,
        rel_step * kappa.omega,
    )
}

/// Walk-off slope `∂k_z/∂k_x` or `∂k_z/∂k_y` (dimensionless).
///
/// A beam built around `kappa` drifts by `−slope·z` along the chosen axis.
pub fn d_kz_d_ktrans(
    ray: Ray,
    axis: TransverseAxis,
    kappa: SpectralPoint,
    crystal: &CrystalSpec,
) -> Result<f64> {
    d_kz_d_ktrans_step(ray, axis, kappa, crystal, FD_REL_STEP)
}

pub fn d_kz_d_ktrans_step(
    ray: Ray,
    axis: TransverseAxis,
    kappa: SpectralPoint,
    crystal: &CrystalSpec,
    rel_step: f64,
) -> Result<f64> {
    let h = rel_step * kappa.omega / SPEED_OF_LIGHT;
    match axis {
        TransverseAxis::X => richardson(
            |kx| kz(ray, SpectralPoint::new(kappa.omega, kx, kappa.ky), crystal),
            kappa.kx,
            h,
        ),
        TransverseAxis::Y => richardson(
            |ky| kz(ray, SpectralPoint::new(kappa.omega, kappa.kx, ky), crystal),
            kappa.ky,
            h,
        ),
    }
}
