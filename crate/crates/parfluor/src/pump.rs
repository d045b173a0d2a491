//! Undepleted pump: each spectral component only picks up its own phase.

use num_complex::Complex64;

use parfluor_core::dispersion::CrystalSpec;
use parfluor_core::perturbative::PumpSpec;
use parfluor_core::wigner::frame::pump_rates;
use parfluor_core::wigner::pump::pump_coefficients;
use parfluor_core::wigner::{ComplexField, Domain, ReferenceFrame, SimulationGrid};

use crate::fft::{Fft3, FftWorkspace};
use crate::Result;

/// Pump coefficients at the entrance face and their phase rates in a frame.
#[derive(Debug, Clone)]
pub struct PumpEvolution {
    coeffs: Vec<Complex64>,
    rates: Vec<f64>,
}

impl PumpEvolution {
    pub fn new(
        grid: &SimulationGrid,
        pump: &PumpSpec,
        crystal: &CrystalSpec,
        frame: &ReferenceFrame,
    ) -> Result<Self> {
        Ok(PumpEvolution {
            coeffs: pump_coefficients(grid, pump)?,
            rates: pump_rates(grid, crystal, frame)?,
        })
    }

    /// Spectral coefficients at `z`.
    pub fn spectral_at(&self, z: f64, out: &mut [Complex64]) {
        assert_eq!(out.len(), self.coeffs.len());
        for ((o, c), r) in out.iter_mut().zip(&self.coeffs).zip(&self.rates) {
            *o = c * Complex64::cis(r * z);
        }
    }

    /// Per-component phase factors for a step `dz`.
    pub fn step_phases(&self, dz: f64, out: &mut [Complex64]) {
        assert_eq!(out.len(), self.rates.len());
        for (o, r) in out.iter_mut().zip(&self.rates) {
            *o = Complex64::cis(r * dz);
        }
    }

    /// Position-domain envelope at `z`, written into `out`.
    pub fn position_at(&self, z: f64, fft: &Fft3, ws: &mut FftWorkspace, out: &mut Vec<Complex64>) {
        self.spectral_at(z, out);
        fft.sum_to_position(out, ws);
    }
}

/// Pump envelope `A_p(t, x, y, z)` on the grid, in the given frame.
pub fn pump_field_at(
    z: f64,
    pump: &PumpSpec,
    crystal: &CrystalSpec,
    grid: &SimulationGrid,
    frame: &ReferenceFrame,
) -> Result<ComplexField> {
    if !(0.0..=crystal.length).contains(&z) {
        return Err(parfluor_core::Error::InvalidParameter {
            name: "z",
            reason: format!("{z} m is outside the crystal [0, {}] m", crystal.length),
        }
        .into());
    }
    grid.validate(crystal)?;
    let evo = PumpEvolution::new(grid, pump, crystal, frame)?;
    let fft = Fft3::new(grid);
    let mut ws = fft.workspace();
    let mut field = ComplexField::zeros(grid, Domain::Position);
    evo.position_at(z, &fft, &mut ws, &mut field.data);
    field.z = z;
    Ok(field)
}
