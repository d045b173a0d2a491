//! Full Wigner pipeline: vacuum → propagation → estimate → (λ, α) map.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use parfluor_core::dispersion::CrystalSpec;
use parfluor_core::perturbative::PumpSpec;
use parfluor_core::wigner::{
    azimuthal_average, BinSpec, EnsembleSpec, Estimator, FluxMap, ReferenceFrame, SimulationGrid,
};

use crate::ensemble::{run_ensemble, EnsembleOutput, DEFAULT_BATCH};
use crate::propagate::Propagator;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    CarrierOnly,
    #[default]
    CoMoving,
}

impl FrameKind {
    pub fn build(self, crystal: &CrystalSpec, omega_center: f64) -> Result<ReferenceFrame> {
        Ok(match self {
            FrameKind::CarrierOnly => ReferenceFrame::carrier_only(crystal, omega_center)?,
            FrameKind::CoMoving => ReferenceFrame::co_moving(crystal, omega_center)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSetup {
    pub crystal: CrystalSpec,
    pub pump: PumpSpec,
    pub grid: SimulationGrid,
    pub frame: FrameKind,
    pub estimator: Estimator,
    pub batch_size: usize,
}

impl SimulationSetup {
    pub fn new(crystal: CrystalSpec, pump: PumpSpec, grid: SimulationGrid) -> Self {
        SimulationSetup {
            crystal,
            pump,
            grid,
            frame: FrameKind::default(),
            estimator: Estimator::Plain,
            batch_size: DEFAULT_BATCH,
        }
    }

    pub fn reference_frame(&self) -> Result<ReferenceFrame> {
        self.frame.build(&self.crystal, self.grid.omega_center)
    }

    pub fn propagator(&self) -> Result<Propagator> {
        Propagator::new(
            &self.crystal,
            &self.pump,
            &self.grid,
            &self.reference_frame()?,
        )
    }
}

#[derive(Debug, Clone)]
pub struct SimulationOutput {
    pub map: FluxMap,
    pub ensemble: EnsembleOutput,
    /// `Σ n̄` with the selected estimator.
    pub total_photons: f64,
    pub wall_time_s: f64,
}

pub fn run_simulation(
    setup: &SimulationSetup,
    ensemble: &EnsembleSpec,
) -> Result<SimulationOutput> {
    let start = Instant::now();
    let prop = setup.propagator()?;
    let out = run_ensemble(&prop, ensemble, setup.batch_size)?;
    let est = out.get(setup.estimator);
    let map = azimuthal_average(est, &setup.grid, &BinSpec::for_grid(&setup.grid));
    let total_photons = est.total();
    Ok(SimulationOutput {
        map,
        total_photons,
        ensemble: out,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Relative change of the total photon number when the step count doubles.
/// Fails with `NotConverged` above `tolerance`.
pub fn check_step_convergence(
    setup: &SimulationSetup,
    ensemble: &EnsembleSpec,
    tolerance: f64,
) -> Result<f64> {
    let coarse = run_simulation(setup, ensemble)?.total_photons;
    let mut fine_setup = setup.clone();
    fine_setup.grid.n_z *= 2;
    let fine = run_simulation(&fine_setup, ensemble)?.total_photons;
    let change = (fine - coarse).abs() / fine.abs();
    if !(change <= tolerance) {
        return Err(parfluor_core::Error::NotConverged {
            what: "z-step doubling",
            achieved: change,
            requested: tolerance,
        }
        .into());
    }
    Ok(change)
}
