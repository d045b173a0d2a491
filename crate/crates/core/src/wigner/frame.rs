use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::grid::SimulationGrid;
use crate::dispersion::{
    d_kz_d_ktrans, d_kz_d_omega, kz_pump, kz_signal, CrystalSpec, Ray, SpectralPoint,
    TransverseAxis,
};
use crate::{Error, Result};

/// Phase subtracted from every longitudinal wavevector before it is applied.
///
/// A fluorescence mode at offset `(δω, k_x, k_y)` is advanced by
/// `k_z − (k_ref + β_ref·δω + ρ_ref·k_x)` per unit length; a pump component
/// at offset `(δω_p, k_px, k_py)` from `2ω₀` by
/// `k_pz − (2k_ref + β_ref·δω_p + ρ_ref·k_px)`. Because pump offsets are the
/// sums of the pair offsets, the mismatch of every coupled triple is left
/// unchanged. `β_ref` and `ρ_ref` move the window with the pump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceFrame {
    pub k_ref: f64,
    pub beta_ref: f64,
    pub rho_ref: f64,
}

impl ReferenceFrame {
    /// Removes only the carrier, `k_ref = k_z(ω₀, 0, 0)`.
    pub fn carrier_only(crystal: &CrystalSpec, omega_center: f64) -> Result<Self> {
        Ok(ReferenceFrame {
            k_ref: kz_signal(SpectralPoint::on_axis(omega_center), crystal)?,
            beta_ref: 0.0,
            rho_ref: 0.0,
        })
    }

    /// Also follows the pump's group delay and walk-off.
    pub fn co_moving(crystal: &CrystalSpec, omega_center: f64) -> Result<Self> {
        let p = SpectralPoint::on_axis(2.0 * omega_center);
        Ok(ReferenceFrame {
            k_ref: kz_signal(SpectralPoint::on_axis(omega_center), crystal)?,
            beta_ref: d_kz_d_omega(Ray::Pump, p, crystal)?,
            rho_ref: d_kz_d_ktrans(Ray::Pump, TransverseAxis::X, p, crystal)?,
        })
    }

    pub fn signal_rate(&self, kz: f64, d_omega: f64, kx: f64) -> f64 {
        kz - (self.k_ref + self.beta_ref * d_omega + self.rho_ref * kx)
    }

    pub fn pump_rate(&self, kpz: f64, d_omega: f64, kx: f64) -> f64 {
        kpz - (2.0 * self.k_ref + self.beta_ref * d_omega + self.rho_ref * kx)
    }
}

/// Per-mode phase rates of the fluorescence in `frame`, in grid order.
pub fn signal_rates(
    grid: &SimulationGrid,
    crystal: &CrystalSpec,
    frame: &ReferenceFrame,
) -> Result<Vec<f64>> {
    (0..grid.len())
        .map(|i| {
            let k = grid.spectral_point(i);
            let kz = kz_signal(k, crystal)
                .map_err(|e| Error::GridUnderresolved(alloc::format!("{e}")))?;
            Ok(frame.signal_rate(kz, k.omega - grid.omega_center, k.kx))
        })
        .collect()
}

/// Per-component phase rates of the pump in `frame`, in grid order.
pub fn pump_rates(
    grid: &SimulationGrid,
    crystal: &CrystalSpec,
    frame: &ReferenceFrame,
) -> Result<Vec<f64>> {
    (0..grid.len())
        .map(|i| {
            let k = grid.pump_point(i);
            let kz =
                kz_pump(k, crystal).map_err(|e| Error::GridUnderresolved(alloc::format!("{e}")))?;
            Ok(frame.pump_rate(kz, k.omega - 2.0 * grid.omega_center, k.kx))
        })
        .collect()
}
