//! Tensor-product midpoint quadrature over a 3D box with step doubling and
//! Richardson extrapolation.
//!
//! The integrand is supplied one outer slice at a time so callers can hoist
//! work that depends only on the outer coordinate.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSpec {
    /// Stop when the estimated error is below `rel_tol·|I|` ...
    pub rel_tol: f64,
    /// ... or below this absolute value.
    pub abs_tol: f64,
    /// Points per axis on the first level.
    pub n_start: usize,
    /// Largest points per axis tried before giving up.
    pub n_max: usize,
    /// Half-width of the box in pump standard deviations (amplitude).
    pub half_width_sigmas: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-2,
            abs_tol: 0.0,
            n_start: 32,
            n_max: 256,
            half_width_sigmas: 5.0,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol >= 0.0 && self.abs_tol >= 0.0)
            || (self.rel_tol == 0.0 && self.abs_tol == 0.0)
        {
            return Err(Error::invalid(
                "quadrature",
                "need a positive rel_tol or abs_tol",
            ));
        }
        if self.n_start < 2 || self.n_max < 2 * self.n_start {
            return Err(Error::invalid(
                "quadrature",
                "need n_start >= 2 and n_max >= 2·n_start",
            ));
        }
        if !(self.half_width_sigmas >= 5.0) {
            return Err(Error::invalid(
                "quadrature",
                "box must cover at least 5σ of the pump",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// Estimated absolute error of `value`.
    pub error_estimate: f64,
    /// Points per axis on the finest level used.
    pub n_per_axis: usize,
}

/// Deterministic pairwise summation.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Midpoint nodes of `n` cells over `[center − half, center + half]`.
pub fn midpoint_nodes(center: f64, half: f64, n: usize) -> Vec<f64> {
    let h = 2.0 * half / n as f64;
    (0..n)
        .map(|i| center - half + (i as f64 + 0.5) * h)
        .collect()
}

/// One midpoint level with `n` points per axis.
///
/// `slice(u0, nodes1, nodes2)` returns the plain sum of the integrand over
/// the inner 2D node grid at outer coordinate `u0`.
pub fn midpoint_3d<F>(center: [f64; 3], half: [f64; 3], n: usize, slice: &mut F) -> Result<f64>
where
    F: FnMut(f64, &[f64], &[f64]) -> Result<f64>,
{
    let n0 = midpoint_nodes(center[0], half[0], n);
    let n1 = midpoint_nodes(center[1], half[1], n);
    let n2 = midpoint_nodes(center[2], half[2], n);
    let mut sums = Vec::with_capacity(n);
    for &u in &n0 {
        sums.push(slice(u, &n1, &n2)?);
    }
    let cell = 8.0 * half[0] * half[1] * half[2] / (n * n * n) as f64;
    Ok(pairwise_sum(&sums) * cell)
}

/// Refines by doubling the points per axis until two successive levels
/// agree. The result is the Richardson combination `(4·I₂ₙ − Iₙ)/3`; the
/// error estimate is `|I₂ₙ − Iₙ|/3`.
pub fn integrate_3d<F>(
    center: [f64; 3],
    half: [f64; 3],
    spec: &QuadratureSpec,
    mut slice: F,
) -> Result<QuadratureResult>
where
    F: FnMut(f64, &[f64], &[f64]) -> Result<f64>,
{
    spec.validate()?;
    let mut n = spec.n_start;
    let mut coarse = midpoint_3d(center, half, n, &mut slice)?;
    let mut last = QuadratureResult {
        value: coarse,
        error_estimate: f64::INFINITY,
        n_per_axis: n,
    };
    while 2 * n <= spec.n_max {
        n *= 2;
        let fine = midpoint_3d(center, half, n, &mut slice)?;
        let value = (4.0 * fine - coarse) / 3.0;
        let err = (fine - coarse).abs() / 3.0;
        last = QuadratureResult {
            value,
            error_estimate: err,
            n_per_axis: n,
        };
        if err <= spec.rel_tol * value.abs() || err <= spec.abs_tol {
            return Ok(last);
        }
        coarse = fine;
    }
    Err(Error::NotConverged {
        what: "quadrature",
        achieved: last.error_estimate / last.value.abs(),
        requested: spec.rel_tol,
    })
}
