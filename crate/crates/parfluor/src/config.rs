//! Run configuration in interface units (nm, fs, µm, degrees, mm).
//!
//! Files are JSON. Every field has a default, unknown keys are rejected,
//! and `--set a.b.c=value` overrides are applied to the JSON tree before it
//! is typed, so errors always name the offending key.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use parfluor_core::dispersion::CrystalSpec;
use parfluor_core::perturbative::{Method, PumpSpec};
use parfluor_core::quadrature::QuadratureSpec;
use parfluor_core::units::{omega_from_wavelength_nm, FS, MM, UM};
use parfluor_core::wigner::{EnsembleSpec, Estimator, SimulationGrid};

use crate::calibrate::CalibrationOptions;
use crate::ensemble::DEFAULT_BATCH;
use crate::io::load_material;
use crate::simulation::{FrameKind, SimulationSetup};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrystalConfig {
    /// Crystal file name in the data directory, or a path to one.
    pub material: String,
    pub theta_deg: f64,
    pub length_mm: f64,
    pub pump_wavelength_nm: f64,
}

impl Default for CrystalConfig {
    fn default() -> Self {
        CrystalConfig {
            material: "bbo".into(),
            theta_deg: 31.3,
            length_mm: 2.0,
            pump_wavelength_nm: 400.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PumpConfig {
    pub tau_fs: f64,
    pub width_um: f64,
    pub amplitude: f64,
    /// Gain parameter `L/L_NL`; zero switches the nonlinearity off.
    pub l_over_lnl: f64,
}

impl Default for PumpConfig {
    fn default() -> Self {
        PumpConfig {
            tau_fs: 60.0,
            width_um: 80.0,
            amplitude: 1.0,
            l_over_lnl: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n_t: usize,
    pub n_x: usize,
    pub n_y: usize,
    /// Defaults to eight pulse durations.
    pub span_t_fs: Option<f64>,
    /// Defaults to eight beam widths.
    pub span_x_um: Option<f64>,
    pub span_y_um: Option<f64>,
    /// Largest transverse wavevector [rad/µm]; when set, replaces both spans.
    pub transverse_kmax_per_um: Option<f64>,
    pub n_z: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n_t: 128,
            n_x: 64,
            n_y: 64,
            span_t_fs: None,
            span_x_um: None,
            span_y_um: None,
            transverse_kmax_per_um: None,
            n_z: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnsembleConfig {
    pub n_realizations: usize,
    pub seed: u64,
    /// Realizations propagated together; fixed so results do not depend on `--jobs`.
    pub batch_size: usize,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            n_realizations: 10,
            seed: 1,
            batch_size: DEFAULT_BATCH,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub lambda_lo_nm: f64,
    pub lambda_hi_nm: f64,
    pub n_points: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            lambda_lo_nm: 500.0,
            lambda_hi_nm: 1200.0,
            n_points: 141,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PertFluxConfig {
    pub lambda_lo_nm: f64,
    pub lambda_hi_nm: f64,
    pub n_points: usize,
    pub method: Method,
    pub quadrature: QuadratureSpec,
}

impl Default for PertFluxConfig {
    fn default() -> Self {
        let s = ScanConfig::default();
        PertFluxConfig {
            lambda_lo_nm: s.lambda_lo_nm,
            lambda_hi_nm: s.lambda_hi_nm,
            n_points: s.n_points,
            method: Method::ClosedForm,
            quadrature: QuadratureSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WignerConfig {
    /// Calibrate the gain to this total; `null` uses `pump.l_over_lnl` as is.
    pub target_photons: Option<f64>,
    pub estimator: Estimator,
    pub frame: FrameKind,
    pub calibration: CalibrationOptions,
}

impl Default for WignerConfig {
    fn default() -> Self {
        WignerConfig {
            target_photons: Some(1e6),
            estimator: Estimator::Plain,
            frame: FrameKind::CoMoving,
            calibration: CalibrationOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub crystal: CrystalConfig,
    pub pump: PumpConfig,
    pub grid: GridConfig,
    pub ensemble: EnsembleConfig,
    pub phasematch: ScanConfig,
    pub pert_flux: PertFluxConfig,
    pub wigner: WignerConfig,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            crystal: CrystalConfig::default(),
            pump: PumpConfig::default(),
            grid: GridConfig::default(),
            ensemble: EnsembleConfig::default(),
            phasematch: ScanConfig::default(),
            pert_flux: PertFluxConfig::default(),
            wigner: WignerConfig::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

/// Invalid parameters are configuration errors; anything else the core
/// reports (dispersion window, under-resolved grid) is a computation error.
fn classify(e: parfluor_core::Error) -> Error {
    match e {
        parfluor_core::Error::InvalidParameter { .. } => Error::Config(e.to_string()),
        other => Error::Core(other),
    }
}

impl RunConfig {
    pub fn crystal_spec(&self) -> Result<CrystalSpec> {
        let c = &self.crystal;
        let material = load_material(&c.material)?;
        CrystalSpec::new(
            material,
            c.theta_deg.to_radians(),
            c.length_mm * MM,
            omega_from_wavelength_nm(c.pump_wavelength_nm),
        )
        .map_err(classify)
    }

    pub fn pump_spec(&self, crystal: &CrystalSpec) -> Result<PumpSpec> {
        let p = &self.pump;
        if !(p.l_over_lnl >= 0.0 && p.l_over_lnl.is_finite()) {
            return Err(Error::config(
                "pump.l_over_lnl: expected a nonnegative finite gain",
            ));
        }
        let l_nl = if p.l_over_lnl == 0.0 {
            f64::INFINITY
        } else {
            crystal.length / p.l_over_lnl
        };
        let mut spec = PumpSpec::new(
            p.tau_fs * FS,
            p.width_um * UM,
            crystal.pump_center_omega,
            l_nl,
        )
        .map_err(classify)?;
        spec.amplitude = p.amplitude;
        spec.validate().map_err(classify)?;
        Ok(spec)
    }

    pub fn grid_spec(&self, pump: &PumpSpec) -> Result<SimulationGrid> {
        let g = &self.grid;
        let mut grid = SimulationGrid::desk_default(pump);
        grid.n_t = g.n_t;
        grid.n_x = g.n_x;
        grid.n_y = g.n_y;
        grid.n_z = g.n_z;
        if let Some(s) = g.span_t_fs {
            grid.span_t = s * FS;
        }
        if let Some(s) = g.span_x_um {
            grid.span_x = s * UM;
        }
        if let Some(s) = g.span_y_um {
            grid.span_y = s * UM;
        }
        if let Some(k) = g.transverse_kmax_per_um {
            if !(k > 0.0) {
                return Err(Error::config(
                    "grid.transverse_kmax_per_um: expected a positive wavevector",
                ));
            }
            grid = grid.with_transverse_kmax(k / UM);
        }
        Ok(grid)
    }

    pub fn ensemble_spec(&self) -> Result<EnsembleSpec> {
        let e = EnsembleSpec {
            n_realizations: self.ensemble.n_realizations,
            seed: self.ensemble.seed,
        };
        e.validate().map_err(classify)?;
        if self.ensemble.batch_size == 0 {
            return Err(Error::config("ensemble.batch_size: need at least one"));
        }
        Ok(e)
    }

    pub fn simulation_setup(&self) -> Result<SimulationSetup> {
        let crystal = self.crystal_spec()?;
        let pump = self.pump_spec(&crystal)?;
        let grid = self.grid_spec(&pump)?;
        grid.validate(&crystal).map_err(classify)?;
        Ok(SimulationSetup {
            crystal,
            pump,
            grid,
            frame: self.wigner.frame,
            estimator: self.wigner.estimator,
            batch_size: self.ensemble.batch_size,
        })
    }

    /// Checks the parts every command needs: crystal, pump and ensemble.
    pub fn validate(&self) -> Result<()> {
        let crystal = self.crystal_spec()?;
        self.pump_spec(&crystal)?;
        self.ensemble_spec()?;
        for (name, s) in [
            (
                "phasematch",
                (
                    self.phasematch.lambda_lo_nm,
                    self.phasematch.lambda_hi_nm,
                    self.phasematch.n_points,
                ),
            ),
            (
                "pert_flux",
                (
                    self.pert_flux.lambda_lo_nm,
                    self.pert_flux.lambda_hi_nm,
                    self.pert_flux.n_points,
                ),
            ),
        ] {
            let (lo, hi, n) = s;
            if !(lo > 0.0 && hi >= lo) || n == 0 {
                return Err(Error::config(format!(
                    "{name}: need 0 < lambda_lo_nm <= lambda_hi_nm and n_points >= 1"
                )));
            }
        }
        self.pert_flux.quadrature.validate().map_err(classify)?;
        if let Some(t) = self.wigner.target_photons {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::config(
                    "wigner.target_photons: expected a positive number or null",
                ));
            }
        }
        Ok(())
    }
}

/// One `(θ, τ_p, w_p)` cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCell {
    pub theta_deg: f64,
    pub tau_fs: f64,
    pub width_um: f64,
}

impl SweepCell {
    pub fn label(&self) -> String {
        format!(
            "theta{}_tau{}fs_w{}um",
            self.theta_deg, self.tau_fs, self.width_um
        )
    }

    pub fn apply(&self, base: &RunConfig) -> RunConfig {
        let mut c = base.clone();
        c.crystal.theta_deg = self.theta_deg;
        c.pump.tau_fs = self.tau_fs;
        c.pump.width_um = self.width_um;
        c
    }
}

/// Four cuts times three pump shapes.
pub fn default_matrix() -> Vec<SweepCell> {
    let mut cells = Vec::new();
    for theta_deg in [29.0, 31.3, 35.0, 40.0] {
        for (tau_fs, width_um) in [(60.0, 80.0), (60.0, 160.0), (120.0, 80.0)] {
            cells.push(SweepCell {
                theta_deg,
                tau_fs,
                width_um,
            });
        }
    }
    cells
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SweepCommand {
    Phasematch,
    #[default]
    PertFlux,
    Wigner,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub command: SweepCommand,
    pub base: RunConfig,
    pub cells: Vec<SweepCell>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            command: SweepCommand::default(),
            base: RunConfig::default(),
            cells: default_matrix(),
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.cells.is_empty() {
            return Err(Error::config("cells: sweep list is empty"));
        }
        Ok(())
    }
}

/// Parses the right-hand side of `--set`: JSON if it parses, else a string.
pub fn parse_override(s: &str) -> Result<(String, Value)> {
    let (key, raw) = s
        .split_once('=')
        .ok_or_else(|| Error::config(format!("--set {s}: expected KEY=VALUE")))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(Error::config(format!("--set {s}: empty key segment")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    Ok((key.to_string(), value))
}

/// Sets `root[a][b][c] = value` for the dotted key `a.b.c`, creating objects.
pub fn set_dotted(root: &mut Value, key: &str, value: Value) -> Result<()> {
    let mut cur = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if cur.is_null() {
            *cur = Value::Object(Default::default());
        }
        let Value::Object(map) = cur else {
            return Err(Error::config(format!(
                "--set {key}: `{}` is not an object",
                parts[..i].join(".")
            )));
        };
        if i + 1 == parts.len() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        cur = map.entry(part.to_string()).or_insert(Value::Null);
    }
    unreachable!("key has at least one segment")
}

/// Reads a JSON config (or starts from `{}`), applies overrides, and types it.
/// Returns the typed value and its fully expanded JSON form.
pub fn load<T: DeserializeOwned + Serialize>(
    path: Option<&Path>,
    overrides: &[(String, Value)],
) -> Result<(T, Value)> {
    let mut root = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::config(format!("{}: {e}", p.display())))?;
            serde_json::from_str::<Value>(&text)
                .map_err(|e| Error::config(format!("{}: malformed JSON: {e}", p.display())))?
        }
        None => Value::Object(Default::default()),
    };
    for (k, v) in overrides {
        set_dotted(&mut root, k, v.clone())?;
    }
    let typed: T = serde_path_to_error::deserialize(root).map_err(|e| {
        let path = e.path().to_string();
        Error::config(format!("key `{path}`: {}", e.into_inner()))
    })?;
    let expanded = serde_json::to_value(&typed)?;
    Ok((typed, expanded))
}
