//! Ensembles of vacuum realizations, run in fixed batches.
//!
//! Realization `r` always draws the same vacuum and the estimators are fed
//! in realization order, so results are bit-identical for any thread count.

use num_complex::Complex64;

use parfluor_core::wigner::vacuum::fill_vacuum;
use parfluor_core::wigner::{
    ComplexField, Domain, EnsembleSpec, Estimator, FluxAccumulator, FluxEstimate,
};

use crate::propagate::Propagator;
use crate::Result;

pub const DEFAULT_BATCH: usize = 8;

/// Both estimators over the same realizations.
#[derive(Debug, Clone)]
pub struct EnsembleOutput {
    pub plain: FluxEstimate,
    pub referenced: FluxEstimate,
}

impl EnsembleOutput {
    pub fn get(&self, estimator: Estimator) -> &FluxEstimate {
        match estimator {
            Estimator::Plain => &self.plain,
            Estimator::VacuumReferenced => &self.referenced,
        }
    }
}

pub fn run_ensemble(
    prop: &Propagator,
    ensemble: &EnsembleSpec,
    batch_size: usize,
) -> Result<EnsembleOutput> {
    ensemble.validate()?;
    if batch_size == 0 {
        return Err(parfluor_core::Error::InvalidParameter {
            name: "batch_size",
            reason: "need at least one field per batch".into(),
        }
        .into());
    }
    let grid = *prop.grid();
    let n = grid.len();
    let batch = batch_size.min(ensemble.n_realizations);
    let mut fields: Vec<ComplexField> = (0..batch)
        .map(|_| ComplexField::zeros(&grid, Domain::Spectral))
        .collect();
    let mut inputs: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); n]; batch];
    let mut workspaces: Vec<_> = (0..batch).map(|_| prop.workspace()).collect();
    let mut plain = FluxAccumulator::new(n);
    let mut referenced = FluxAccumulator::new(n);

    let mut start = 0;
    while start < ensemble.n_realizations {
        let k = batch.min(ensemble.n_realizations - start);
        for (j, (f, inp)) in fields[..k].iter_mut().zip(&mut inputs[..k]).enumerate() {
            fill_vacuum(inp, ensemble.seed, (start + j) as u64);
            f.data.copy_from_slice(inp);
            f.domain = Domain::Spectral;
            f.z = 0.0;
        }
        prop.propagate_batch(&mut fields[..k], &mut workspaces[..k])?;
        for (f, inp) in fields[..k].iter().zip(&inputs[..k]) {
            plain.push_plain(&f.data);
            referenced.push_referenced(&f.data, inp);
        }
        log::debug!("realizations {}..{} done", start, start + k);
        start += k;
    }
    Ok(EnsembleOutput {
        plain: plain.finish(Estimator::Plain),
        referenced: referenced.finish(Estimator::VacuumReferenced),
    })
}
