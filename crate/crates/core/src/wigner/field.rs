use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::SimulationGrid;
use crate::quadrature::pairwise_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Spectral,
    Position,
}

/// Complex amplitudes on a [`SimulationGrid`], in grid storage order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub data: Vec<Complex64>,
    pub shape: [usize; 3],
    pub domain: Domain,
    /// Propagation distance the field refers to [m].
    pub z: f64,
}

impl ComplexField {
    pub fn zeros(grid: &SimulationGrid, domain: Domain) -> Self {
        ComplexField {
            data: vec![Complex64::new(0.0, 0.0); grid.len()],
            shape: grid.shape(),
            domain,
            z: 0.0,
        }
    }

    pub fn from_data(grid: &SimulationGrid, data: Vec<Complex64>, domain: Domain) -> Self {
        assert_eq!(
            data.len(),
            grid.len(),
            "field length does not match the grid"
        );
        ComplexField {
            data,
            shape: grid.shape(),
            domain,
            z: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// `Σ|α|²`, summed pairwise.
    pub fn norm_sqr(&self) -> f64 {
        norm_sqr_sum(&self.data)
    }
}

pub fn norm_sqr_sum(data: &[Complex64]) -> f64 {
    // Chunked so the scratch buffer stays small for large grids.
    let partial: Vec<f64> = data
        .chunks(4096)
        .map(|c| {
            let v: Vec<f64> = c.iter().map(|a| a.norm_sqr()).collect();
            pairwise_sum(&v)
        })
        .collect();
    pairwise_sum(&partial)
}
