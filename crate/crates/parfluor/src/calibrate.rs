//! Gain calibration: find `L_NL` giving a target total photon number.
//!
//! The search runs on `x = ln(L/L_NL)` against `ln(total)`. It first brackets
//! the target by steps of `ln 2`, then refines with Illinois false position.
//! Every probe reuses the run seed, so the probed totals form one smooth
//! curve instead of independent noisy draws.

use serde::{Deserialize, Serialize};

use parfluor_core::dispersion::CrystalSpec;
use parfluor_core::perturbative::PumpSpec;
use parfluor_core::wigner::{EnsembleSpec, ReferenceFrame, SimulationGrid};

use crate::ensemble::run_ensemble;
use crate::propagate::Propagator;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrationOptions {
    /// Realizations per probe.
    pub probe_realizations: usize,
    /// Accepted relative deviation from the target.
    pub tolerance: f64,
    pub max_probes: usize,
    /// `L/L_NL` of the first probe.
    pub initial_gain: f64,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        CalibrationOptions {
            probe_realizations: 2,
            tolerance: 0.2,
            max_probes: 30,
            initial_gain: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    /// `L/L_NL`.
    pub gain: f64,
    pub total_photons: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub target_photons: f64,
    pub l_nl: f64,
    pub gain: f64,
    pub achieved_photons: f64,
    pub probes: Vec<Probe>,
}

fn invalid(name: &'static str, reason: &str) -> crate::Error {
    parfluor_core::Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
    .into()
}

/// Total photons after the crystal at gain `L/L_NL`, from the
/// vacuum-referenced estimator over a probe ensemble.
pub fn probe_total(
    gain: f64,
    crystal: &CrystalSpec,
    pump: &PumpSpec,
    grid: &SimulationGrid,
    frame: &ReferenceFrame,
    ensemble: &EnsembleSpec,
    batch_size: usize,
) -> Result<f64> {
    let p = PumpSpec {
        l_nl: crystal.length / gain,
        ..*pump
    };
    let prop = Propagator::new(crystal, &p, grid, frame)?;
    Ok(run_ensemble(&prop, ensemble, batch_size)?
        .referenced
        .total())
}

#[allow(clippy::too_many_arguments)]
pub fn calibrate_gain(
    target_photons: f64,
    crystal: &CrystalSpec,
    pump: &PumpSpec,
    grid: &SimulationGrid,
    frame: &ReferenceFrame,
    seed: u64,
    batch_size: usize,
    options: &CalibrationOptions,
) -> Result<Calibration> {
    if !(target_photons > 0.0 && target_photons.is_finite()) {
        return Err(invalid(
            "target_photons",
            "expected a positive photon number",
        ));
    }
    if !(options.tolerance > 0.0) || options.max_probes == 0 || options.probe_realizations == 0 {
        return Err(invalid(
            "calibration",
            "need tolerance > 0, max_probes >= 1, probe_realizations >= 1",
        ));
    }
    if !(options.initial_gain > 0.0 && options.initial_gain.is_finite()) {
        return Err(invalid("initial_gain", "expected a positive L/L_NL"));
    }
    let ensemble = EnsembleSpec {
        n_realizations: options.probe_realizations,
        seed,
    };
    let log_target = target_photons.ln();
    let mut probes: Vec<Probe> = Vec::new();
    // residual ln(total/target); nonpositive totals count as far below
    let eval = |x: f64, probes: &mut Vec<Probe>| -> Result<Option<f64>> {
        let gain = x.exp();
        let total = probe_total(gain, crystal, pump, grid, frame, &ensemble, batch_size)?;
        log::info!(
            "calibration probe {}: L/L_NL = {gain:.5}, total = {total:.4e}",
            probes.len() + 1
        );
        probes.push(Probe {
            gain,
            total_photons: total,
        });
        if (total - target_photons).abs() <= options.tolerance * target_photons {
            return Ok(None);
        }
        Ok(Some(if total > 0.0 {
            total.ln() - log_target
        } else {
            f64::NEG_INFINITY
        }))
    };
    let done = |probes: Vec<Probe>| {
        let last = *probes.last().expect("at least one probe");
        Ok(Calibration {
            target_photons,
            l_nl: crystal.length / last.gain,
            gain: last.gain,
            achieved_photons: last.total_photons,
            probes,
        })
    };
    let not_converged = |probes: &[Probe]| -> crate::Error {
        let best = probes
            .iter()
            .map(|p| (p.total_photons - target_photons).abs() / target_photons)
            .fold(f64::INFINITY, f64::min);
        parfluor_core::Error::NotConverged {
            what: "gain calibration",
            achieved: best,
            requested: options.tolerance,
        }
        .into()
    };

    let step = std::f64::consts::LN_2;
    let mut x0 = options.initial_gain.ln();
    let Some(mut f0) = eval(x0, &mut probes)? else {
        return done(probes);
    };
    // bracket
    let dir = if f0 < 0.0 { 1.0 } else { -1.0 };
    let (mut x1, mut f1);
    loop {
        if probes.len() >= options.max_probes {
            return Err(not_converged(&probes));
        }
        x1 = x0 + dir * step;
        match eval(x1, &mut probes)? {
            None => return done(probes),
            Some(f) => f1 = f,
        }
        if (f1 > 0.0) != (f0 > 0.0) {
            break;
        }
        x0 = x1;
        f0 = f1;
    }
    // Illinois false position on [x0, x1]
    let mut side = 0;
    while probes.len() < options.max_probes {
        let x = if f0.is_finite() && f1.is_finite() {
            (x0 * f1 - x1 * f0) / (f1 - f0)
        } else {
            0.5 * (x0 + x1)
        };
        let Some(f) = eval(x, &mut probes)? else {
            return done(probes);
        };
        if (f > 0.0) == (f1 > 0.0) {
            x1 = x;
            f1 = f;
            if side == 1 {
                f0 *= 0.5;
            }
            side = 1;
        } else {
            x0 = x;
            f0 = f;
            if side == -1 {
                f1 *= 0.5;
            }
            side = -1;
        }
    }
    Err(not_converged(&probes))
}
