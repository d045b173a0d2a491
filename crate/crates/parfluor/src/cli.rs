//! Command-line front end. Exit codes: 0 success, 1 some sweep cells
//! failed, 2 configuration error, 3 computation error.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use parfluor_core::perturbative::PumpSpec;

use crate::calibrate::{calibrate_gain, Calibration};
use crate::config::{self, RunConfig, SweepCell, SweepCommand, SweepSpec};
use crate::io::{fluxmap_csv, fluxmap_pgm, pert_flux_csv, phasematch_csv, write_atomic, Manifest};
use crate::simulation::{run_simulation, SimulationSetup};
use crate::spectra::{scan_curve_par, spectrum_par};
use crate::{Error, Result};

pub const EXIT_OK: u8 = 0;
pub const EXIT_PARTIAL: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_COMPUTE: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "parfluor",
    version,
    about = "Parametric fluorescence in uniaxial crystals"
)]
pub struct Cli {
    /// JSON configuration file; omitted keys take their defaults.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// Override a config value by dotted path, e.g. `--set pump.tau_fs=120`.
    #[arg(long = "set", global = true, value_name = "K=V")]
    pub set: Vec<String>,
    /// Perturbative method: closed_form, exact, gaussianized, closed_form_printed.
    #[arg(long, global = true, value_name = "NAME")]
    pub method: Option<String>,
    #[arg(long, global = true, value_name = "N")]
    pub target_photons: Option<f64>,
    #[arg(long, global = true, value_name = "N")]
    pub realizations: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Perfect phase-matching curve, exterior angles and walk-off coefficients.
    Phasematch,
    /// First-order photon flux along the curve.
    PertFlux,
    /// Stochastic Wigner simulation: flux map, heatmap and manifest.
    Wigner,
    /// Run one command over a list of (θ, τ, w) cells.
    Sweep,
    /// Gain calibration only.
    Calibrate,
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        _ => EXIT_COMPUTE,
    }
}

impl Cli {
    /// `--set` values followed by the dedicated flags, under `prefix`.
    fn overrides(&self, prefix: &str) -> Result<Vec<(String, Value)>> {
        let mut o = Vec::new();
        for s in &self.set {
            o.push(config::parse_override(s)?);
        }
        let mut flag = |k: &str, v: Value| o.push((format!("{prefix}{k}"), v));
        if let Some(s) = self.seed {
            flag("ensemble.seed", s.into());
        }
        if let Some(n) = self.realizations {
            flag("ensemble.n_realizations", n.into());
        }
        if let Some(t) = self.target_photons {
            flag("wigner.target_photons", t.into());
        }
        if let Some(m) = &self.method {
            flag("pert_flux.method", m.clone().into());
        }
        Ok(o)
    }
}

pub fn run(cli: &Cli) -> u8 {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return EXIT_CONFIG;
        }
        builder = builder.num_threads(j);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return EXIT_COMPUTE;
        }
    };
    let result = pool.install(|| match cli.command {
        Command::Sweep => run_sweep(cli),
        cmd => run_single(cli, cmd).map(|_| EXIT_OK),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn run_single(cli: &Cli, cmd: Command) -> Result<()> {
    let (cfg, value): (RunConfig, Value) =
        config::load(cli.config.as_deref(), &cli.overrides("")?)?;
    let out = cli.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    let manifest = execute(cmd, &cfg, value, &out)?;
    log::info!(
        "wrote {} files to {}",
        manifest.files.len() + 1,
        out.display()
    );
    Ok(())
}

/// Validates `cfg`, runs `cmd` and writes its files plus `manifest.json` to `out`.
pub fn execute(cmd: Command, cfg: &RunConfig, value: Value, out: &Path) -> Result<Manifest> {
    cfg.validate()?;
    let start = Instant::now();
    let mut m = Manifest::new(command_name(cmd), value, cfg.ensemble.seed);
    match cmd {
        Command::Phasematch => {
            let crystal = cfg.crystal_spec()?;
            let s = &cfg.phasematch;
            let rows = scan_curve_par(s.lambda_lo_nm, s.lambda_hi_nm, s.n_points, &crystal)?;
            m.emit(out, "phasematch.csv", &phasematch_csv(&rows)?)?;
        }
        Command::PertFlux => {
            let crystal = cfg.crystal_spec()?;
            let pump = cfg.pump_spec(&crystal)?;
            let s = &cfg.pert_flux;
            let rows = spectrum_par(
                s.lambda_lo_nm,
                s.lambda_hi_nm,
                s.n_points,
                &crystal,
                &pump,
                s.method,
                &s.quadrature,
            )?;
            m.emit(out, "pert_flux.csv", &pert_flux_csv(&rows, s.method)?)?;
        }
        Command::Wigner => {
            let mut setup = cfg.simulation_setup()?;
            if let Some(target) = cfg.wigner.target_photons {
                let cal = calibrate(cfg, &setup, target)?;
                setup.pump.l_nl = cal.l_nl;
                m.calibration = Some(cal);
            }
            let sim = run_simulation(&setup, &cfg.ensemble_spec()?)?;
            log::info!("flux map: {}", crate::io::describe_map(&sim.map));
            m.emit(out, "wigner.csv", &fluxmap_csv(&sim.map)?)?;
            let (pgm, scale) = fluxmap_pgm(&sim.map);
            m.emit(out, "wigner.pgm", &pgm)?;
            m.pgm_scale = Some(scale);
            m.total_photons = Some(sim.total_photons);
        }
        Command::Calibrate => {
            let setup = cfg.simulation_setup()?;
            let target = cfg
                .wigner
                .target_photons
                .ok_or_else(|| Error::config("wigner.target_photons: calibrate needs a target"))?;
            let cal = calibrate(cfg, &setup, target)?;
            let mut text = serde_json::to_string_pretty(&cal)?;
            text.push('\n');
            m.emit(out, "calibration.json", text.as_bytes())?;
            m.total_photons = Some(cal.achieved_photons);
            m.calibration = Some(cal);
        }
        Command::Sweep => unreachable!("sweeps are expanded by the caller"),
    }
    m.wall_time_s = start.elapsed().as_secs_f64();
    m.write(out)?;
    Ok(m)
}

fn calibrate(cfg: &RunConfig, setup: &SimulationSetup, target: f64) -> Result<Calibration> {
    let pump = PumpSpec { ..setup.pump };
    calibrate_gain(
        target,
        &setup.crystal,
        &pump,
        &setup.grid,
        &setup.reference_frame()?,
        cfg.ensemble.seed,
        setup.batch_size,
        &cfg.wigner.calibration,
    )
}

fn command_name(cmd: Command) -> &'static str {
    match cmd {
        Command::Phasematch => "phasematch",
        Command::PertFlux => "pert-flux",
        Command::Wigner => "wigner",
        Command::Sweep => "sweep",
        Command::Calibrate => "calibrate",
    }
}

#[derive(Debug, Serialize)]
struct CellStatus {
    index: usize,
    cell: SweepCell,
    dir: String,
    ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct SweepIndex {
    command: SweepCommand,
    version: String,
    sweep: Value,
    cells: Vec<CellStatus>,
    n_failed: usize,
}

fn run_sweep(cli: &Cli) -> Result<u8> {
    let (spec, value): (SweepSpec, Value) =
        config::load(cli.config.as_deref(), &cli.overrides("base.")?)?;
    spec.validate()?;
    let out = cli
        .out
        .clone()
        .unwrap_or_else(|| spec.base.output_dir.clone());
    let cmd = match spec.command {
        SweepCommand::Phasematch => Command::Phasematch,
        SweepCommand::PertFlux => Command::PertFlux,
        SweepCommand::Wigner => Command::Wigner,
    };
    let cells: Vec<CellStatus> = spec
        .cells
        .par_iter()
        .enumerate()
        .map(|(i, cell)| {
            let dir = format!("{i:02}_{}", cell.label());
            let cfg = cell.apply(&spec.base);
            let result = serde_json::to_value(&cfg)
                .map_err(Error::from)
                .and_then(|v| execute(cmd, &cfg, v, &out.join(&dir)));
            if let Err(e) = &result {
                log::warn!("cell {i} ({}) failed: {e}", cell.label());
            }
            CellStatus {
                index: i,
                cell: *cell,
                dir,
                ok: result.is_ok(),
                error: result.err().map(|e| e.to_string()),
            }
        })
        .collect();
    let n_failed = cells.iter().filter(|c| !c.ok).count();
    let index = SweepIndex {
        command: spec.command,
        version: env!("CARGO_PKG_VERSION").to_string(),
        sweep: value,
        cells,
        n_failed,
    };
    let mut text = serde_json::to_string_pretty(&index)?;
    text.push('\n');
    write_atomic(&out.join("index.json"), text.as_bytes())?;
    Ok(if n_failed > 0 { EXIT_PARTIAL } else { EXIT_OK })
}
