//! Null models: per-asset shuffled returns, i.i.d. Gaussian returns, planted
//! factor markets, and Monte Carlo baselines built from them.
//!
//! # Seeding
//!
//! Every random draw comes from [`stream_rng`]: a ChaCha8 generator keyed by
//! `seed_from_u64(seed)` with the ChaCha stream id set to a per-purpose
//! index. Streams are independent and each has period `2^68`, so
//! simulation `s` of an ensemble always sees the same draws regardless of how
//! many simulations run or in which order.
//!
//! | draw                               | seed          | stream      |
//! |------------------------------------|---------------|-------------|
//! | ensemble simulation `s`            | `master_seed` | `s`         |
//! | `shuffle_panel` asset `i`          | `seed`        | `i`         |
//! | `simulate_gaussian_panel` asset `i`| `seed`        | `i`         |
//! | factor `b` of a factor panel       | `seed`        | `b`         |
//! | noise of factor-panel asset `i`    | `seed`        | `K + i`     |

use alloc::boxed::Box;
use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::correlation::correlation_matrix;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::panel::{
    roll_windows, standardize_into, synthetic_weekly_dates, AssetClass, AssetMeta, ReturnPanel, WindowView,
};
use crate::pca::{asset_component_correlations, participation};
use crate::spectral::eigendecompose;
use crate::stats::nearest_rank_position;

/// Percentile reported in [`NullEnsembleStats::abs_corr_p99`].
pub const ABS_CORR_PERCENTILE: f64 = 99.0;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NullKind {
    Shuffled,
    Gaussian,
}

impl NullKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NullKind::Shuffled => "shuffled",
            NullKind::Gaussian => "gaussian",
        }
    }
}

impl core::str::FromStr for NullKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shuffled" => Ok(NullKind::Shuffled),
            "gaussian" => Ok(NullKind::Gaussian),
            _ => Err(Error::InvalidNullConfig("null kind must be `shuffled` or `gaussian`")),
        }
    }
}

impl core::fmt::Display for NullKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NullConfig {
    pub n_assets: usize,
    /// Window length T.
    pub window_len: usize,
    /// Windows produced by [`NullEnsemble::rolled_windows`]; ensemble
    /// statistics use one independent window per simulation instead.
    pub num_windows: usize,
    pub sims: usize,
    pub master_seed: u64,
    pub kind: NullKind,
}

impl NullConfig {
    pub fn gaussian(n_assets: usize, window_len: usize, sims: usize, master_seed: u64) -> Self {
        Self {
            n_assets,
            window_len,
            num_windows: 1,
            sims,
            master_seed,
            kind: NullKind::Gaussian,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_assets < 2 {
            return Err(Error::InvalidNullConfig("N must be at least 2"));
        }
        if self.window_len < 2 {
            return Err(Error::InvalidNullConfig("T must be at least 2"));
        }
        if self.sims < 1 {
            return Err(Error::InvalidNullConfig("sims must be at least 1"));
        }
        Ok(())
    }
}

fn synthetic_meta(prefix: &str, n: usize) -> Vec<AssetMeta> {
    let width = if n > 999 { digits(n) } else { 3 };
    (1..=n)
        .map(|i| AssetMeta::new(format!("{prefix}{i:0width$}"), AssetClass::Equities))
        .collect()
}

fn digits(mut n: usize) -> usize {
    let mut d = 1;
    while n >= 10 {
        n /= 10;
        d += 1;
    }
    d
}

/// Independently permutes each asset's full return series.
pub fn shuffle_panel(returns: &ReturnPanel, seed: u64) -> Result<ReturnPanel> {
    if returns.len() < 2 {
        return Err(Error::TooFewDates {
            found: returns.len(),
            required: 2,
        });
    }
    let mut out = returns.returns().clone();
    for i in 0..out.rows() {
        let mut rng = stream_rng(seed, i as u64);
        out.row_mut(i).shuffle(&mut rng);
    }
    ReturnPanel::new(returns.dates().to_vec(), out, returns.meta().to_vec())
}

/// N x L standard normal returns with tickers `SIM001, SIM002, ...`.
pub fn simulate_gaussian_panel(n: usize, len: usize, seed: u64) -> Result<ReturnPanel> {
    if n < 2 {
        return Err(Error::TooFewAssets { found: n });
    }
    if len < 2 {
        return Err(Error::TooFewDates {
            found: len,
            required: 2,
        });
    }
    let mut z = Matrix::zeros(n, len);
    for i in 0..n {
        let mut rng = stream_rng(seed, i as u64);
        for x in z.row_mut(i) {
            *x = rng.sample(StandardNormal);
        }
    }
    ReturnPanel::new(synthetic_weekly_dates(len), z, synthetic_meta("SIM", n))
}

/// Block factor market: asset `i` of block `b` returns
/// `loading_b f_b(t) + noise_std e_i(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorSpec {
    pub block_sizes: Vec<usize>,
    pub loadings: Vec<f64>,
    pub noise_std: f64,
}

impl FactorSpec {
    /// `factors` blocks of `block_size` assets sharing one loading.
    pub fn equal_blocks(factors: usize, block_size: usize, loading: f64, noise_std: f64) -> Self {
        Self {
            block_sizes: vec![block_size; factors],
            loadings: vec![loading; factors],
            noise_std,
        }
    }

    pub fn num_factors(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn n_assets(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    /// Block of every asset, in panel order.
    pub fn block_of_assets(&self) -> Vec<usize> {
        self.block_sizes
            .iter()
            .enumerate()
            .flat_map(|(b, &s)| core::iter::repeat_n(b, s))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.block_sizes.is_empty() {
            return Err(Error::InvalidFactorSpec("at least one block is required"));
        }
        if self.loadings.len() != self.block_sizes.len() {
            return Err(Error::InvalidFactorSpec("one loading per block is required"));
        }
        if self.loadings.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(Error::InvalidFactorSpec("loadings must lie in [0, 1]"));
        }
        if !(self.noise_std.is_finite() && self.noise_std > 0.0) {
            return Err(Error::InvalidFactorSpec("noise_std must be positive"));
        }
        if self.n_assets() < 2 {
            return Err(Error::InvalidFactorSpec("at least two assets are required"));
        }
        Ok(())
    }
}

pub fn synthetic_factor_panel(spec: &FactorSpec, len: usize, seed: u64) -> Result<ReturnPanel> {
    spec.validate()?;
    if len < 2 {
        return Err(Error::TooFewDates {
            found: len,
            required: 2,
        });
    }
    let k = spec.num_factors();
    let factors: Vec<Vec<f64>> = (0..k)
        .map(|b| {
            let mut rng = stream_rng(seed, b as u64);
            (0..len).map(|_| rng.sample(StandardNormal)).collect()
        })
        .collect();
    let blocks = spec.block_of_assets();
    let mut z = Matrix::zeros(blocks.len(), len);
    for (i, &b) in blocks.iter().enumerate() {
        let mut rng = stream_rng(seed, (k + i) as u64);
        let lam = spec.loadings[b];
        for (x, f) in z.row_mut(i).iter_mut().zip(&factors[b]) {
            let e: f64 = rng.sample(StandardNormal);
            *x = lam * f + spec.noise_std * e;
        }
    }
    ReturnPanel::new(synthetic_weekly_dates(len), z, synthetic_meta("FAC", blocks.len()))
}

/// Diagnostics of one null window.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSample {
    pub eigenvalues: Vec<f64>,
    pub pr: Vec<f64>,
    /// `|r(z_i, y_k)|` at `(i, k - 1)`.
    pub abs_r: Matrix,
}

/// Monte Carlo baselines for one `(N, T)` shape; every list has one entry
/// per rank.
#[derive(Debug, Clone, PartialEq)]
pub struct NullEnsembleStats {
    pub config: NullConfig,
    pub pr_mean: Vec<f64>,
    /// Sample standard deviation over simulations (0 for a single one).
    pub pr_std: Vec<f64>,
    /// Mean of the k-th largest eigenvalue.
    pub scree_mean: Vec<f64>,
    /// Nearest-rank 99th percentile of `|r(z_i, y_k)|` pooled over
    /// simulations and assets.
    pub abs_corr_p99: Vec<f64>,
}

/// Order-sensitive reducer over [`SimulationSample`]s; push samples in
/// simulation order to get reproducible bits.
#[derive(Debug, Clone)]
pub struct EnsembleAccumulator {
    n: usize,
    expected: usize,
    count: usize,
    pr_mean: Vec<f64>,
    pr_m2: Vec<f64>,
    scree_sum: Vec<f64>,
    keep: usize,
    // |r| >= 0, so IEEE bit patterns order like the values
    tails: Vec<BinaryHeap<Reverse<u64>>>,
}

impl EnsembleAccumulator {
    pub fn new(n: usize, sims: usize) -> Self {
        let pooled = sims * n;
        let keep = pooled - nearest_rank_position(pooled, ABS_CORR_PERCENTILE) + 1;
        Self {
            n,
            expected: sims,
            count: 0,
            pr_mean: vec![0.0; n],
            pr_m2: vec![0.0; n],
            scree_sum: vec![0.0; n],
            keep,
            tails: (0..n).map(|_| BinaryHeap::with_capacity(keep + 1)).collect(),
        }
    }

    pub fn push(&mut self, s: &SimulationSample) {
        assert!(self.count < self.expected, "more samples than configured simulations");
        assert_eq!(s.eigenvalues.len(), self.n);
        self.count += 1;
        let c = self.count as f64;
        for k in 0..self.n {
            let x = s.pr[k];
            let delta = x - self.pr_mean[k];
            self.pr_mean[k] += delta / c;
            self.pr_m2[k] += delta * (x - self.pr_mean[k]);
            self.scree_sum[k] += s.eigenvalues[k];
        }
        for i in 0..self.n {
            let row = s.abs_r.row(i);
            for (heap, &v) in self.tails.iter_mut().zip(row) {
                let bits = v.to_bits();
                if heap.len() < self.keep {
                    heap.push(Reverse(bits));
                } else if heap.peek().is_some_and(|&Reverse(m)| bits > m) {
                    heap.pop();
                    heap.push(Reverse(bits));
                }
            }
        }
    }

    pub fn finish(self, config: NullConfig) -> NullEnsembleStats {
        assert_eq!(self.count, self.expected, "ensemble is missing samples");
        let c = self.count as f64;
        let pr_std = self
            .pr_m2
            .iter()
            .map(|m2| {
                if self.count > 1 {
                    libm::sqrt(m2 / (c - 1.0))
                } else {
                    0.0
                }
            })
            .collect();
        let scree_mean = self.scree_sum.iter().map(|s| s / c).collect();
        let abs_corr_p99 = self
            .tails
            .iter()
            .map(|h| h.peek().map_or(f64::NAN, |&Reverse(b)| f64::from_bits(b)))
            .collect();
        NullEnsembleStats {
            config,
            pr_mean: self.pr_mean,
            pr_std,
            scree_mean,
            abs_corr_p99,
        }
    }
}

/// A null model bound to its configuration (and, for shuffled nulls, the
/// return panel being shuffled).
#[derive(Debug, Clone, Copy)]
pub struct NullEnsemble<'a> {
    config: NullConfig,
    source: Option<&'a ReturnPanel>,
}

impl<'a> NullEnsemble<'a> {
    pub fn new(config: NullConfig, source: Option<&'a ReturnPanel>) -> Result<Self> {
        config.validate()?;
        if config.kind == NullKind::Shuffled {
            let src = source.ok_or(Error::InvalidNullConfig("shuffled nulls need a source return panel"))?;
            if src.n_assets() != config.n_assets {
                return Err(Error::BaselineMismatch {
                    expected: config.n_assets,
                    found: src.n_assets(),
                });
            }
            if src.len() < config.window_len {
                return Err(Error::WindowOutOfRange {
                    start: 0,
                    window: config.window_len,
                    available: src.len(),
                });
            }
        }
        Ok(Self { config, source })
    }

    pub fn config(&self) -> &NullConfig {
        &self.config
    }

    /// Independent null window for simulation `sim`. Shuffled windows take
    /// the first T entries of a uniform random permutation of each asset's
    /// full series.
    pub fn window(&self, sim: u64) -> Result<WindowView> {
        let NullConfig {
            n_assets: n,
            window_len: t,
            master_seed,
            kind,
            ..
        } = self.config;
        let mut rng = stream_rng(master_seed, sim);
        let mut raw = Matrix::zeros(n, t);
        match kind {
            NullKind::Gaussian => {
                for i in 0..n {
                    for x in raw.row_mut(i) {
                        *x = rng.sample(StandardNormal);
                    }
                }
            }
            NullKind::Shuffled => {
                let src = self.source.expect("validated in new");
                let mut buf = Vec::with_capacity(src.len());
                for i in 0..n {
                    buf.clear();
                    buf.extend_from_slice(src.returns().row(i));
                    let (head, _) = buf.partial_shuffle(&mut rng, t);
                    raw.row_mut(i).copy_from_slice(head);
                }
            }
        }
        let end_date = synthetic_weekly_dates(t)[t - 1];
        let mut z_hat = Matrix::zeros(n, t);
        for i in 0..n {
            let ticker = self
                .source
                .map_or_else(|| format!("SIM{:03}", i + 1), |s| s.meta()[i].ticker.clone());
            standardize_into(raw.row(i), z_hat.row_mut(i)).ok_or(Error::ZeroVariance {
                window_index: sim as usize,
                asset: i,
                ticker,
            })?;
        }
        Ok(WindowView {
            window_index: sim as usize,
            start: 0,
            end_date,
            z_hat,
        })
    }

    pub fn sample(&self, sim: u64) -> Result<SimulationSample> {
        let wrap = |e: Error| Error::Simulation {
            index: sim,
            source: Box::new(e),
        };
        let w = self.window(sim).map_err(wrap)?;
        let r = correlation_matrix(&w).map_err(wrap)?;
        let d = eigendecompose(&r).map_err(wrap)?;
        let pr = participation(&d).pr;
        let abs_r = asset_component_correlations(&d).map_err(wrap)?.abs_r;
        Ok(SimulationSample {
            eigenvalues: d.eigenvalues().to_vec(),
            pr,
            abs_r,
        })
    }

    /// All baselines, running simulations `0..sims` in order.
    pub fn run(&self) -> Result<NullEnsembleStats> {
        let mut acc = EnsembleAccumulator::new(self.config.n_assets, self.config.sims);
        for s in 0..self.config.sims as u64 {
            acc.push(&self.sample(s)?);
        }
        Ok(acc.finish(self.config))
    }

    /// `num_windows` step-1 windows rolled through one null panel of length
    /// `T + num_windows - 1` generated from `master_seed`.
    pub fn rolled_windows(&self) -> Result<Vec<WindowView>> {
        let NullConfig {
            n_assets,
            window_len,
            num_windows,
            master_seed,
            kind,
            ..
        } = self.config;
        if num_windows == 0 {
            return Ok(Vec::new());
        }
        let len = window_len + num_windows - 1;
        let panel = match kind {
            NullKind::Gaussian => simulate_gaussian_panel(n_assets, len, master_seed)?,
            NullKind::Shuffled => {
                let src = self.source.expect("validated in new");
                if src.len() < len {
                    return Err(Error::WindowOutOfRange {
                        start: 0,
                        window: len,
                        available: src.len(),
                    });
                }
                shuffle_panel(src, master_seed)?
            }
        };
        roll_windows(&panel, window_len, 1)?.take(num_windows).collect()
    }
}

/// Participation-ratio baselines (mean and standard deviation per rank).
/// Shuffled configurations need [`NullEnsemble`] with a source panel.
pub fn pr_baseline_stats(config: &NullConfig) -> Result<NullEnsembleStats> {
    NullEnsemble::new(*config, None)?.run()
}

/// Mean sorted null eigenvalues per rank.
pub fn random_scree_profile(config: &NullConfig) -> Result<Vec<f64>> {
    Ok(NullEnsemble::new(*config, None)?.run()?.scree_mean)
}

/// 99th percentile of `|r(z_i, y_k)|` for ranks `1..=max_rank`.
pub fn abs_corr_percentile99(config: &NullConfig, max_rank: usize) -> Result<Vec<f64>> {
    if max_rank == 0 || max_rank > config.n_assets {
        return Err(Error::RankOutOfRange {
            rank: max_rank,
            n: config.n_assets,
        });
    }
    let mut p = NullEnsemble::new(*config, None)?.run()?.abs_corr_p99;
    p.truncate(max_rank);
    Ok(p)
}
