//! Small descriptive-statistics helpers shared by the analysis modules and
//! the Monte Carlo acceptance checks.

use alloc::vec;
use alloc::vec::Vec;

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population variance (divides by `n`), two-pass.
pub fn population_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

/// Population-convention Pearson correlation. `None` when either series has
/// zero spread.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    assert_eq!(a.len(), b.len());
    let (ma, mb) = (mean(a), mean(b));
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some((sab / libm::sqrt(saa * sbb)).clamp(-1.0, 1.0))
}

/// Nearest-rank percentile of an ascending-sorted sample: the value at
/// 1-based position `ceil(p / 100 * n)`.
pub fn nearest_rank(sorted: &[f64], percent: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of an empty sample");
    assert!((0.0..=100.0).contains(&percent));
    let n = sorted.len();
    let pos = nearest_rank_position(n, percent);
    sorted[pos - 1]
}

/// 1-based nearest-rank position, clamped to `1..=n`.
pub fn nearest_rank_position(n: usize, percent: f64) -> usize {
    let raw = libm::ceil(percent / 100.0 * n as f64) as usize;
    raw.clamp(1, n)
}

/// Fixed-width histogram over `[lo, hi)`; the last bin is closed at `hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    lo: f64,
    hi: f64,
    counts: Vec<u64>,
    total: u64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Self {
        assert!(hi > lo && bins > 0);
        Self {
            lo,
            hi,
            counts: vec![0; bins],
            total: 0,
        }
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    pub fn edges(&self, bin: usize) -> (f64, f64) {
        let w = self.width();
        (self.lo + w * bin as f64, self.lo + w * (bin + 1) as f64)
    }

    /// Adds one observation. Values outside the range still count toward
    /// the total used for normalization.
    pub fn add(&mut self, x: f64) {
        self.total += 1;
        if x < self.lo || x > self.hi || x.is_nan() {
            return;
        }
        let b = (((x - self.lo) / self.width()) as usize).min(self.counts.len() - 1);
        self.counts[b] += 1;
    }

    pub fn extend(&mut self, xs: impl IntoIterator<Item = f64>) {
        for x in xs {
            self.add(x);
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Probability mass per bin, relative to every observation added.
    pub fn masses(&self) -> Vec<f64> {
        let t = self.total.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / t).collect()
    }

    /// Density estimate per bin (mass divided by bin width).
    pub fn densities(&self) -> Vec<f64> {
        let w = self.width();
        self.masses().into_iter().map(|m| m / w).collect()
    }

    /// `sum |p_a - p_b|` over bins of two histograms on the same grid.
    pub fn l1_distance(&self, other: &Histogram) -> f64 {
        assert_eq!(self.counts.len(), other.counts.len());
        self.masses()
            .iter()
            .zip(other.masses())
            .map(|(a, b)| (a - b).abs())
            .sum()
    }
}
