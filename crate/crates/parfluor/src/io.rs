//! Crystal files, CSV and PGM writers, run manifests and atomic writes.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use parfluor_core::dispersion::Material;
use parfluor_core::perturbative::{Method, SpectrumRow};
use parfluor_core::phasematch::CurveRow;
use parfluor_core::wigner::FluxMap;

use crate::calibrate::Calibration;
use crate::{Error, Result};

pub const DATA_DIR_ENV: &str = "PARFLUOR_DATA_DIR";

/// Directory holding crystal files: `$PARFLUOR_DATA_DIR`, else the data
/// directory shipped with the crate.
pub fn data_dir() -> PathBuf {
    match std::env::var_os(DATA_DIR_ENV) {
        Some(d) if !d.is_empty() => PathBuf::from(d),
        _ => Path::new(env!("CARGO_MANIFEST_DIR")).join("data"),
    }
}

/// Loads a material by name (`bbo` → `<data_dir>/bbo.json`) or by path.
pub fn load_material(name_or_path: &str) -> Result<Material> {
    let path =
        if name_or_path.ends_with(".json") || name_or_path.contains(std::path::MAIN_SEPARATOR) {
            PathBuf::from(name_or_path)
        } else {
            data_dir().join(format!("{}.json", name_or_path.to_lowercase()))
        };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::config(format!("crystal file {}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let m: Material = serde_path_to_error::deserialize(de).map_err(|e| {
        Error::config(format!(
            "crystal file {}: key `{}`: {}",
            path.display(),
            e.path(),
            e.inner()
        ))
    })?;
    m.validate()
        .map_err(|e| Error::config(format!("crystal file {}: {e}", path.display())))?;
    Ok(m)
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Shortest round-trip text; exponent form for very small or large magnitudes.
fn num(v: f64) -> String {
    if !v.is_finite() {
        String::new()
    } else if v == 0.0 || (1e-3..1e7).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn csv_bytes(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner()
        .map_err(|e| Error::io("csv buffer", e.into_error()))
}

pub fn phasematch_csv(rows: &[CurveRow]) -> Result<Vec<u8>> {
    csv_bytes(
        &[
            "lambda_nm",
            "k0_rad_per_m",
            "alpha_ext_deg",
            "d_beta1_s_per_m",
            "d_rho_px",
            "d_rho_py",
        ],
        rows.iter().map(|r| {
            vec![
                num(r.lambda_nm),
                opt(r.point.map(|p| p.k0)),
                opt(r.alpha_ext.map(f64::to_degrees)),
                opt(r.coeffs.map(|c| c.d_beta1)),
                opt(r.coeffs.map(|c| c.d_rho_px)),
                opt(r.coeffs.map(|c| c.d_rho_py)),
            ]
        }),
    )
}

pub fn pert_flux_csv(rows: &[SpectrumRow], method: Method) -> Result<Vec<u8>> {
    csv_bytes(
        &[
            "lambda_nm",
            "alpha_ext_deg",
            "flux",
            "method",
            "quad_error_estimate",
        ],
        rows.iter().map(|r| {
            vec![
                num(r.lambda_nm),
                opt(r.alpha_ext.map(f64::to_degrees)),
                opt(r.point.map(|p| p.flux)),
                method.name().to_string(),
                opt(r.point.and_then(|p| p.error_estimate)),
            ]
        }),
    )
}

/// One row per bin, wavelength fastest. Empty bins and unavailable
/// standard errors are left blank.
pub fn fluxmap_csv(map: &FluxMap) -> Result<Vec<u8>> {
    let rows = (0..map.n_alpha()).flat_map(|ia| {
        (0..map.n_lambda()).map(move |il| {
            let b = map.index(ia, il);
            vec![
                num(map.lambda_center(il)),
                num(map.alpha_center(ia)),
                num(map.flux[b]),
                num(map.stderr[b]),
                map.n_modes[b].to_string(),
            ]
        })
    });
    csv_bytes(
        &["lambda_nm", "alpha_deg", "flux", "stderr", "n_modes"],
        rows,
    )
}

/// Linear gray scale of a PGM: `value = min + gray/255·(max − min)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PgmScale {
    pub min: f64,
    pub max: f64,
}

/// Binary 8-bit PGM of the flux map: λ ascending left to right, α ascending
/// bottom to top. Empty bins are black.
pub fn fluxmap_pgm(map: &FluxMap) -> (Vec<u8>, PgmScale) {
    let finite = map.flux.iter().copied().filter(|v| v.is_finite());
    let (min, max) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    let (min, max) = if min.is_finite() {
        (min, max)
    } else {
        (0.0, 0.0)
    };
    let (w, h) = (map.n_lambda(), map.n_alpha());
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    for ia in (0..h).rev() {
        for il in 0..w {
            let v = map.flux[map.index(ia, il)];
            let g = if !v.is_finite() || max <= min {
                0.0
            } else {
                ((v - min) / (max - min) * 255.0).round()
            };
            out.push(g as u8);
        }
    }
    (out, PgmScale { min, max })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
}

/// Everything needed to reproduce a run's outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub config: serde_json::Value,
    pub config_sha256: String,
    pub seed: u64,
    pub wall_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_photons: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration: Option<Calibration>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pgm_scale: Option<PgmScale>,
    pub files: Vec<FileEntry>,
}

impl Manifest {
    pub fn new(command: &str, config: serde_json::Value, seed: u64) -> Self {
        let config_sha256 =
            sha256_hex(&serde_json::to_vec(&config).expect("json value serializes"));
        Manifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            config_sha256,
            seed,
            wall_time_s: 0.0,
            total_photons: None,
            calibration: None,
            pgm_scale: None,
            files: Vec::new(),
        }
    }

    /// Writes `bytes` atomically under `dir` and records its hash.
    pub fn emit(&mut self, dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&dir.join(name), bytes)?;
        self.files.push(FileEntry {
            name: name.to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        write_atomic(&dir.join("manifest.json"), text.as_bytes())
    }
}

/// Compact human-readable summary of a flux map for logs.
pub fn describe_map(map: &FluxMap) -> String {
    format!(
        "{}×{} bins, {} modes, {} realizations",
        map.n_lambda(),
        map.n_alpha(),
        map.total_modes(),
        map.n_realizations
    )
}
