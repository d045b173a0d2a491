//! Ensemble estimators of the mean mode occupation.
//!
//! The plain estimator is `⟨|α_out|²⟩ − 1/2`. The vacuum-referenced one
//! averages `|α_out|² − |α_in|²` over the same realizations: it has the same
//! expectation (the input is vacuum, `⟨|α_in|²⟩ = 1/2`) and a much smaller
//! variance at low gain, because the input fluctuations cancel.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::ComplexField;
use crate::quadrature::pairwise_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Plain,
    VacuumReferenced,
}

/// Per-mode running mean and sum of squared deviations.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxAccumulator {
    pub count: u64,
    pub mean: Vec<f64>,
    pub m2: Vec<f64>,
}

impl FluxAccumulator {
    pub fn new(n_modes: usize) -> Self {
        FluxAccumulator {
            count: 0,
            mean: vec![0.0; n_modes],
            m2: vec![0.0; n_modes],
        }
    }

    /// Adds one realization; `sample(i)` is the per-mode quantity.
    pub fn push_with<F: Fn(usize) -> f64>(&mut self, sample: F) {
        self.count += 1;
        let n = self.count as f64;
        for (i, (m, s)) in self.mean.iter_mut().zip(self.m2.iter_mut()).enumerate() {
            let x = sample(i);
            let d = x - *m;
            *m += d / n;
            *s += d * (x - *m);
        }
    }

    /// Adds one output field with the plain estimator's sample `|α|²`.
    pub fn push_plain(&mut self, out: &[Complex64]) {
        assert_eq!(out.len(), self.mean.len());
        self.push_with(|i| out[i].norm_sqr());
    }

    /// Adds one realization with the referenced sample `|α_out|² − |α_in|²`.
    pub fn push_referenced(&mut self, out: &[Complex64], input: &[Complex64]) {
        assert!(out.len() == self.mean.len() && input.len() == out.len());
        self.push_with(|i| out[i].norm_sqr() - input[i].norm_sqr());
    }

    /// Chan et al. parallel combination; `other` holds later realizations.
    pub fn merge(&mut self, other: &FluxAccumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        for i in 0..self.mean.len() {
            let d = other.mean[i] - self.mean[i];
            self.mean[i] += d * nb / n;
            self.m2[i] += other.m2[i] + d * d * na * nb / n;
        }
        self.count += other.count;
    }

    pub fn finish(&self, estimator: Estimator) -> FluxEstimate {
        let offset = match estimator {
            Estimator::Plain => 0.5,
            Estimator::VacuumReferenced => 0.0,
        };
        let n = self.count as f64;
        let stderr = (self.count > 1).then(|| {
            self.m2
                .iter()
                .map(|&s| (s / (n - 1.0) / n).sqrt())
                .collect()
        });
        FluxEstimate {
            flux: self.mean.iter().map(|&m| m - offset).collect(),
            stderr,
            n_realizations: self.count as usize,
            estimator,
        }
    }
}

/// Per-mode mean occupation with its standard error (absent for one realization).
#[derive(Debug, Clone, PartialEq)]
pub struct FluxEstimate {
    pub flux: Vec<f64>,
    pub stderr: Option<Vec<f64>>,
    pub n_realizations: usize,
    pub estimator: Estimator,
}

impl FluxEstimate {
    /// `Σ n̄` over all modes.
    pub fn total(&self) -> f64 {
        let partial: Vec<f64> = self.flux.chunks(4096).map(pairwise_sum).collect();
        pairwise_sum(&partial)
    }
}

/// Plain ensemble estimate from a set of output fields.
pub fn estimate_flux(fields: &[ComplexField]) -> FluxEstimate {
    assert!(!fields.is_empty(), "need at least one realization");
    let mut acc = FluxAccumulator::new(fields[0].len());
    for f in fields {
        acc.push_plain(&f.data);
    }
    acc.finish(Estimator::Plain)
}
