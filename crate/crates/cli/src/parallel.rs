//! Multi-threaded null ensembles with the same output bits as
//! [`NullEnsemble::run`].

use corrscope_core::nulls::{EnsembleAccumulator, SimulationSample};
use corrscope_core::{NullEnsemble, NullEnsembleStats, Result};
use rayon::prelude::*;

/// Simulations evaluated per parallel batch; bounds the number of
/// `N x N` samples held at once.
pub const CHUNK: usize = 256;

/// Runs every simulation of `ensemble` on the rayon pool, folding samples
/// in simulation order. On failure the lowest failing simulation is
/// reported.
pub fn run_ensemble(ensemble: &NullEnsemble<'_>) -> Result<NullEnsembleStats> {
    let config = *ensemble.config();
    let sims = config.sims as u64;
    let mut acc = EnsembleAccumulator::new(config.n_assets, config.sims);
    let mut start = 0;
    while start < sims {
        let end = (start + CHUNK as u64).min(sims);
        let batch: Vec<Result<SimulationSample>> = (start..end).into_par_iter().map(|s| ensemble.sample(s)).collect();
        for sample in batch {
            acc.push(&sample?);
        }
        start = end;
    }
    Ok(acc.finish(config))
}
