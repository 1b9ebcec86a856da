//! End-to-end analysis: load, subset, roll, decompose, diagnose.

use std::path::PathBuf;

use corrscope_core::pca::adjusted_component_correlations_upto;
use corrscope_core::{
    asset_component_correlations, coefficient_moments, compute_log_returns, correlation_matrix, eigendecompose,
    participation, roll_windows, subset_by_class, variance_fractions, AssetClass, AssetMeta, NullConfig, NullEnsemble,
    NullEnsembleStats, NullKind, ReturnPanel,
};
use rayon::prelude::*;

use crate::cache::{BaselineCache, BaselineKey};
use crate::error::{Error, Result};
use crate::ingest::load_price_panel;
use crate::parallel::run_ensemble;
use crate::report::{emit_reports, WindowReport};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub prices_path: PathBuf,
    pub meta_path: PathBuf,
    pub window: usize,
    pub step: usize,
    pub sims: usize,
    pub master_seed: u64,
    pub null_kind: NullKind,
    pub max_rank: usize,
    /// Restrict the universe to these classes; `None` keeps every asset.
    pub classes: Option<Vec<AssetClass>>,
    pub output_dir: PathBuf,
    pub baseline_cache: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(prices_path: impl Into<PathBuf>, meta_path: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            prices_path: prices_path.into(),
            meta_path: meta_path.into(),
            window: 100,
            step: 1,
            sims: 10_000,
            master_seed: 0,
            null_kind: NullKind::Shuffled,
            max_rank: 6,
            classes: None,
            output_dir: output_dir.into(),
            baseline_cache: None,
        }
    }
}

/// Settings that only affect the numbers, not where they come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisParams {
    pub window: usize,
    pub step: usize,
    pub sims: usize,
    pub master_seed: u64,
    pub null_kind: NullKind,
    pub max_rank: usize,
}

impl From<&RunConfig> for AnalysisParams {
    fn from(c: &RunConfig) -> Self {
        Self {
            window: c.window,
            step: c.step,
            sims: c.sims,
            master_seed: c.master_seed,
            null_kind: c.null_kind,
            max_rank: c.max_rank,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOutput {
    pub meta: Vec<AssetMeta>,
    /// Number of returns in the analysed panel.
    pub num_returns: usize,
    pub reports: Vec<WindowReport>,
    pub baseline: NullEnsembleStats,
    pub baseline_key: BaselineKey,
    /// Whether `baseline` was read from the cache.
    pub baseline_cached: bool,
}

/// Loads and subsets the input files, then runs [`analyze_returns`].
pub fn run_analysis(config: &RunConfig) -> Result<AnalysisOutput> {
    let mut panel = load_price_panel(&config.prices_path, &config.meta_path)?;
    if let Some(classes) = &config.classes {
        if classes.is_empty() {
            return Err(Error::Config("--classes selects no asset class".into()));
        }
        panel = subset_by_class(&panel, classes).map_err(|e| Error::Config(e.to_string()))?;
    }
    let returns = compute_log_returns(&panel).map_err(Error::Panel)?;
    let cache = config.baseline_cache.as_ref().map(BaselineCache::new);
    analyze_returns(&returns, &AnalysisParams::from(config), cache.as_ref())
}

/// [`run_analysis`] followed by [`emit_reports`].
pub fn run(config: &RunConfig) -> Result<AnalysisOutput> {
    let out = run_analysis(config)?;
    emit_reports(&out, config)?;
    Ok(out)
}

pub fn validate(params: &AnalysisParams, n_assets: usize, num_returns: usize) -> Result<()> {
    let fail = |m: String| Err(Error::Config(m));
    if n_assets < 2 {
        return fail(format!("need at least 2 assets, found {n_assets}"));
    }
    if params.window < 2 {
        return fail(format!("window must be at least 2, found {}", params.window));
    }
    if params.step < 1 {
        return fail("step must be at least 1".into());
    }
    if params.sims < 1 {
        return fail("sims must be at least 1".into());
    }
    if params.window > num_returns {
        return fail(format!(
            "window {} exceeds the {num_returns} available returns",
            params.window
        ));
    }
    if params.max_rank < 1 || params.max_rank > n_assets {
        return fail(format!("max-rank must be in 1..={n_assets}, found {}", params.max_rank));
    }
    Ok(())
}

pub fn analyze_returns(
    returns: &ReturnPanel,
    params: &AnalysisParams,
    cache: Option<&BaselineCache>,
) -> Result<AnalysisOutput> {
    let n = returns.n_assets();
    validate(params, n, returns.len())?;
    let windows = roll_windows(returns, params.window, params.step).map_err(|e| Error::Config(e.to_string()))?;

    let null_config = NullConfig {
        n_assets: n,
        window_len: params.window,
        num_windows: 1,
        sims: params.sims,
        master_seed: params.master_seed,
        kind: params.null_kind,
    };
    let baseline_key = BaselineKey::new(&null_config, Some(returns));
    let (baseline, baseline_cached) = null_baseline(&null_config, &baseline_key, returns, cache)?;

    let results: Vec<Result<WindowReport>> = (0..windows.count_total())
        .into_par_iter()
        .map(|k| {
            let wrap = |source| {
                let end_date = returns.dates()[windows.start_of(k) + params.window - 1];
                Error::Window {
                    window_index: k,
                    end_date,
                    source,
                }
            };
            let w = windows.get(k).map_err(wrap)?;
            window_report(&w, &baseline, params.max_rank).map_err(wrap)
        })
        .collect();
    let reports = results.into_iter().collect::<Result<Vec<_>>>()?;

    Ok(AnalysisOutput {
        meta: returns.meta().to_vec(),
        num_returns: returns.len(),
        reports,
        baseline,
        baseline_key,
        baseline_cached,
    })
}

fn null_baseline(
    config: &NullConfig,
    key: &BaselineKey,
    returns: &ReturnPanel,
    cache: Option<&BaselineCache>,
) -> Result<(NullEnsembleStats, bool)> {
    if let Some(stats) = cache.and_then(|c| c.load(config, key)) {
        return Ok((stats, true));
    }
    let ensemble = NullEnsemble::new(*config, Some(returns)).map_err(Error::Baseline)?;
    let stats = run_ensemble(&ensemble).map_err(Error::Baseline)?;
    if let Some(c) = cache {
        c.store(key, &stats)?;
    }
    Ok((stats, false))
}

/// Every per-window diagnostic for one standardized window.
pub fn window_report(
    w: &corrscope_core::WindowView,
    baseline: &NullEnsembleStats,
    max_rank: usize,
) -> corrscope_core::Result<WindowReport> {
    let r = correlation_matrix(w)?;
    let moments = if r.n() >= 3 {
        Some(coefficient_moments(&r)?)
    } else {
        None
    };
    let d = eigendecompose(&r)?;
    let profile = variance_fractions(&d);
    let counts = corrscope_core::pca::significance_counts(&d, baseline)?;
    let acc = asset_component_correlations(&d)?;
    let adjusted = adjusted_component_correlations_upto(w, &d, max_rank)?;
    let n = d.n();
    let abs_r = (0..n).map(|i| acc.abs_r.row(i)[..max_rank].to_vec()).collect();
    let abs_r_adjusted = (0..n)
        .map(|i| (1..=max_rank).map(|k| adjusted.get(i, k)).collect())
        .collect();
    Ok(WindowReport {
        window_index: w.window_index,
        end_date: w.end_date,
        moments,
        eigenvalues: d.eigenvalues().to_vec(),
        fractions: profile.fractions,
        cumulative: profile.cumulative,
        pr: participation(&d).pr,
        kaiser_count: counts.kaiser_count,
        scree_count: counts.scree_count,
        scree_exceedances: counts.scree_exceedances,
        abs_r,
        abs_r_adjusted,
    })
}
