//! Strang split-step propagation of signal fields through the pumped crystal.
//!
//! Adjacent half linear steps are merged, so a run of `n_z` steps costs two
//! signal transforms per step plus one pump transform shared by the batch.
//! Transforms are unscaled; the factor `1/N` rides on the phase arrays,
//! which is exact because the Bogoliubov map is real-linear.

use num_complex::Complex64;
use rayon::prelude::*;

use parfluor_core::dispersion::CrystalSpec;
use parfluor_core::perturbative::PumpSpec;
use parfluor_core::wigner::bogoliubov::{apply, coupling_coefficients};
use parfluor_core::wigner::frame::signal_rates;
use parfluor_core::wigner::{ComplexField, Domain, ReferenceFrame, SimulationGrid};

use crate::fft::{Fft3, FftWorkspace};
use crate::pump::PumpEvolution;
use crate::Result;

pub struct Propagator {
    grid: SimulationGrid,
    length: f64,
    dz: f64,
    fft: Fft3,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
    half_scaled: Vec<Complex64>,
    full_scaled: Vec<Complex64>,
    pump: Option<PumpEvolution>,
    /// `1/(A_ref·L_NL)` with the unit reference amplitude.
    coupling: f64,
}

impl Propagator {
    pub fn new(
        crystal: &CrystalSpec,
        pump: &PumpSpec,
        grid: &SimulationGrid,
        frame: &ReferenceFrame,
    ) -> Result<Self> {
        crystal.validate()?;
        pump.validate()?;
        grid.validate(crystal)?;
        let dz = grid.dz(crystal.length);
        let rates = signal_rates(grid, crystal, frame)?;
        let half: Vec<Complex64> = rates.iter().map(|r| Complex64::cis(0.5 * r * dz)).collect();
        let full: Vec<Complex64> = rates.iter().map(|r| Complex64::cis(r * dz)).collect();
        let inv_n = 1.0 / grid.len() as f64;
        let half_scaled = half.iter().map(|p| p * inv_n).collect();
        let full_scaled = full.iter().map(|p| p * inv_n).collect();
        let coupling = pump.inverse_l_nl();
        let active = coupling > 0.0 && pump.amplitude > 0.0;
        let pump = if active {
            Some(PumpEvolution::new(grid, pump, crystal, frame)?)
        } else {
            None
        };
        Ok(Propagator {
            grid: *grid,
            length: crystal.length,
            dz,
            fft: Fft3::new(grid),
            half,
            full,
            half_scaled,
            full_scaled,
            pump,
            coupling,
        })
    }

    pub fn grid(&self) -> &SimulationGrid {
        &self.grid
    }

    pub fn fft(&self) -> &Fft3 {
        &self.fft
    }

    pub fn workspace(&self) -> FftWorkspace {
        self.fft.workspace()
    }

    /// Propagates one spectral field from `z = 0` to the exit face.
    pub fn propagate(&self, field: &mut ComplexField) -> Result<()> {
        let mut ws = vec![self.workspace()];
        self.propagate_batch(std::slice::from_mut(field), &mut ws)
    }

    /// Propagates a batch that shares each step's pump evaluation. Fields are
    /// processed in parallel, one workspace per field.
    pub fn propagate_batch(
        &self,
        fields: &mut [ComplexField],
        workspaces: &mut [FftWorkspace],
    ) -> Result<()> {
        assert!(
            workspaces.len() >= fields.len(),
            "need one workspace per field"
        );
        if fields.is_empty() {
            return Ok(());
        }
        for f in fields.iter() {
            if f.domain != Domain::Spectral || f.shape != self.grid.shape() {
                return Err(parfluor_core::Error::InvalidParameter {
                    name: "field",
                    reason: "expected a spectral field on the propagator grid".into(),
                }
                .into());
            }
        }
        fields
            .par_iter_mut()
            .for_each(|f| multiply(&mut f.data, &self.half));

        let n_z = self.grid.n_z;
        let Some(pump) = &self.pump else {
            for step in 0..n_z {
                let last = if step + 1 < n_z {
                    &self.full
                } else {
                    &self.half
                };
                fields
                    .par_iter_mut()
                    .for_each(|f| multiply(&mut f.data, last));
            }
            for f in fields.iter_mut() {
                f.z = self.length;
            }
            return Ok(());
        };

        let n = self.grid.len();
        // pump spectrum at the first midpoint, then advanced one step at a time
        let mut pump_spec = vec![Complex64::new(0.0, 0.0); n];
        pump.spectral_at(0.5 * self.dz, &mut pump_spec);
        let mut pump_step = vec![Complex64::new(0.0, 0.0); n];
        pump.step_phases(self.dz, &mut pump_step);
        let mut pump_buf = vec![Complex64::new(0.0, 0.0); n];
        let mut c = vec![0.0; n];
        let mut s = vec![Complex64::new(0.0, 0.0); n];
        let (ws_pump, ws_fields) = workspaces.split_first_mut().expect("nonempty workspaces");
        for step in 0..n_z {
            if step > 0 {
                multiply(&mut pump_spec, &pump_step);
            }
            pump_buf.copy_from_slice(&pump_spec);
            self.fft.spectral_to_t_fastest(&mut pump_buf, ws_pump);
            coupling_coefficients(&pump_buf, self.coupling, self.dz, &mut c, &mut s);
            let last = if step + 1 < n_z {
                &self.full_scaled
            } else {
                &self.half_scaled
            };
            let (c, s) = (&c, &s);
            let body = |(f, ws): (&mut ComplexField, &mut FftWorkspace)| {
                self.fft.spectral_to_t_fastest(&mut f.data, ws);
                for ((a, ci), si) in f.data.iter_mut().zip(c).zip(s) {
                    *a = apply(*a, *ci, *si);
                }
                self.fft.t_fastest_to_spectral(&mut f.data, ws);
                multiply(&mut f.data, last);
            };
            // the first field reuses the pump workspace; its transforms are done
            let (first, rest) = fields.split_first_mut().expect("nonempty batch");
            rayon::join(
                || body((first, &mut *ws_pump)),
                || {
                    rest.par_iter_mut()
                        .zip(ws_fields.par_iter_mut())
                        .for_each(body)
                },
            );
        }
        for f in fields.iter_mut() {
            f.z = self.length;
        }
        Ok(())
    }
}

fn multiply(data: &mut [Complex64], phase: &[Complex64]) {
    for (a, p) in data.iter_mut().zip(phase) {
        *a *= p;
    }
}
