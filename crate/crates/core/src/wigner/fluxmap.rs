//! Azimuthal averaging of per-mode flux onto `(λ, α)` bins.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::estimate::FluxEstimate;
use super::grid::SimulationGrid;
use crate::units::{wavelength_nm_from_omega, SPEED_OF_LIGHT};

/// Bin edges; both axes uniform and ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinSpec {
    pub lambda_edges_nm: Vec<f64>,
    pub alpha_edges_deg: Vec<f64>,
    /// Modes with a larger transverse wavevector are left out, so every
    /// azimuth is equally represented.
    pub k_trans_max: f64,
}

fn uniform_edges(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect()
}

fn locate(edges: &[f64], v: f64) -> Option<usize> {
    let (lo, hi) = (edges[0], edges[edges.len() - 1]);
    if !(v >= lo && v <= hi) {
        return None;
    }
    let n = edges.len() - 1;
    let i = ((v - lo) / (hi - lo) * n as f64) as usize;
    Some(i.min(n - 1))
}

impl BinSpec {
    /// `n_t/2` wavelength bins over the paired band and `min(n_x, n_y)/2`
    /// angle bins up to the angle of the inscribed disc at the lowest frequency.
    pub fn for_grid(grid: &SimulationGrid) -> Self {
        let (w_lo, w_hi) = grid.paired_omega_range();
        let pad = 1e-9;
        let l_lo = wavelength_nm_from_omega(w_hi) * (1.0 - pad);
        let l_hi = wavelength_nm_from_omega(w_lo) * (1.0 + pad);
        let k_max = grid.k_inscribed();
        let a_hi = (SPEED_OF_LIGHT * k_max / w_lo).min(1.0).asin().to_degrees() * (1.0 + pad);
        BinSpec {
            lambda_edges_nm: uniform_edges(l_lo, l_hi, (grid.n_t / 2).max(1)),
            alpha_edges_deg: uniform_edges(0.0, a_hi, (grid.n_x.min(grid.n_y) / 2).max(1)),
            k_trans_max: k_max,
        }
    }

    pub fn n_lambda(&self) -> usize {
        self.lambda_edges_nm.len() - 1
    }

    pub fn n_alpha(&self) -> usize {
        self.alpha_edges_deg.len() - 1
    }

    /// `(i_alpha, i_lambda)` of a point, if inside the binned region.
    pub fn locate(&self, lambda_nm: f64, alpha_deg: f64) -> Option<(usize, usize)> {
        Some((
            locate(&self.alpha_edges_deg, alpha_deg)?,
            locate(&self.lambda_edges_nm, lambda_nm)?,
        ))
    }

    /// Bin of a spectral mode, or `None` when it is outside the binned disc
    /// or totally internally reflected at the exit face.
    pub fn locate_mode(&self, omega: f64, k_trans: f64) -> Option<(usize, usize)> {
        if k_trans > self.k_trans_max * (1.0 + 1e-12) {
            return None;
        }
        let ratio = SPEED_OF_LIGHT * k_trans / omega;
        if ratio > 1.0 {
            return None;
        }
        self.locate(wavelength_nm_from_omega(omega), ratio.asin().to_degrees())
    }
}

/// Binned flux. Cell `(i_alpha, i_lambda)` is stored at
/// `i_alpha·n_lambda + i_lambda`. Empty cells hold `NaN` and `n_modes = 0`;
/// `stderr` is `NaN` when the ensemble has a single realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluxMap {
    pub bins: BinSpec,
    pub flux: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_modes: Vec<u32>,
    pub n_realizations: usize,
}

impl FluxMap {
    pub fn n_lambda(&self) -> usize {
        self.bins.n_lambda()
    }

    pub fn n_alpha(&self) -> usize {
        self.bins.n_alpha()
    }

    #[inline]
    pub fn index(&self, i_alpha: usize, i_lambda: usize) -> usize {
        i_alpha * self.n_lambda() + i_lambda
    }

    pub fn lambda_center(&self, i_lambda: usize) -> f64 {
        let e = &self.bins.lambda_edges_nm;
        0.5 * (e[i_lambda] + e[i_lambda + 1])
    }

    pub fn alpha_center(&self, i_alpha: usize) -> f64 {
        let e = &self.bins.alpha_edges_deg;
        0.5 * (e[i_alpha] + e[i_alpha + 1])
    }

    pub fn total_modes(&self) -> usize {
        self.n_modes.iter().map(|&n| n as usize).sum()
    }

    /// Per wavelength column, the angle bin of the largest value among
    /// cells with at least `min_modes` modes.
    pub fn ridge(&self, min_modes: u32) -> Vec<Option<(usize, f64)>> {
        (0..self.n_lambda())
            .map(|il| {
                let mut best: Option<(usize, f64)> = None;
                for ia in 0..self.n_alpha() {
                    let i = self.index(ia, il);
                    if self.n_modes[i] < min_modes.max(1) {
                        continue;
                    }
                    let v = self.flux[i];
                    if best.is_none_or(|(_, b)| v > b) {
                        best = Some((ia, v));
                    }
                }
                best
            })
            .collect()
    }

    /// `max/median` of the ridge values over wavelength columns.
    pub fn ridge_contrast(&self, min_modes: u32) -> Option<f64> {
        let v: Vec<f64> = self
            .ridge(min_modes)
            .into_iter()
            .flatten()
            .map(|(_, v)| v)
            .collect();
        max_over_median(v)
    }

    /// `max/median` over all nonempty cells.
    pub fn bin_contrast(&self, min_modes: u32) -> Option<f64> {
        let v: Vec<f64> = self
            .flux
            .iter()
            .zip(&self.n_modes)
            .filter(|(_, &n)| n >= min_modes.max(1))
            .map(|(&f, _)| f)
            .collect();
        max_over_median(v)
    }
}

fn max_over_median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    let median = if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    };
    (median > 0.0).then(|| v[n - 1] / median)
}

/// Bins per-mode flux by wavelength and exterior angle, averaging over azimuth.
/// Nyquist-index modes are skipped.
pub fn azimuthal_average(
    estimate: &FluxEstimate,
    grid: &SimulationGrid,
    bins: &BinSpec,
) -> FluxMap {
    assert_eq!(estimate.flux.len(), grid.len());
    let n_bins = bins.n_lambda() * bins.n_alpha();
    let mut sum = vec![0.0; n_bins];
    let mut var = vec![0.0; n_bins];
    let mut count = vec![0u32; n_bins];
    for i in (0..grid.len()).filter(|&i| grid.is_paired(i)) {
        let k = grid.spectral_point(i);
        let Some((ia, il)) = bins.locate_mode(k.omega, k.k_trans()) else {
            continue;
        };
        let b = ia * bins.n_lambda() + il;
        sum[b] += estimate.flux[i];
        if let Some(se) = &estimate.stderr {
            var[b] += se[i] * se[i];
        }
        count[b] += 1;
    }
    let has_se = estimate.stderr.is_some();
    let flux = sum
        .iter()
        .zip(&count)
        .map(|(&s, &n)| if n == 0 { f64::NAN } else { s / n as f64 })
        .collect();
    let stderr = var
        .iter()
        .zip(&count)
        .map(|(&v, &n)| {
            if n == 0 || !has_se {
                f64::NAN
            } else {
                v.sqrt() / n as f64
            }
        })
        .collect();
    FluxMap {
        bins: bins.clone(),
        flux,
        stderr,
        n_modes: count,
        n_realizations: estimate.n_realizations,
    }
}
