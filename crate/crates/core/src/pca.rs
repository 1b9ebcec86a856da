//! Per-window principal-component diagnostics.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nulls::NullEnsembleStats;
use crate::panel::WindowView;
use crate::spectral::{SpectralDecomposition, PSD_TOLERANCE};
use crate::stats::pearson;

/// Adjusted components whose standard deviation falls below this are
/// reported as undefined. Standardized returns have unit spread, so the
/// floor is absolute.
pub const ADJUSTED_SPREAD_FLOOR: f64 = 1e-10;

/// Share of total variance carried by each component, `beta_k / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceProfile {
    pub window_index: usize,
    pub fractions: Vec<f64>,
    pub cumulative: Vec<f64>,
}

pub fn variance_fractions(d: &SpectralDecomposition) -> VarianceProfile {
    let n = d.n() as f64;
    let fractions: Vec<f64> = d.eigenvalues().iter().map(|b| b / n).collect();
    let cumulative = fractions
        .iter()
        .scan(0.0, |acc, f| {
            *acc += f;
            Some(*acc)
        })
        .collect();
    VarianceProfile {
        window_index: d.window_index,
        fractions,
        cumulative,
    }
}

/// Inverse participation ratio `I_k = sum_i omega_ki^4` and its reciprocal.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticipationSeries {
    pub window_index: usize,
    pub ipr: Vec<f64>,
    pub pr: Vec<f64>,
}

pub fn participation(d: &SpectralDecomposition) -> ParticipationSeries {
    let ipr: Vec<f64> = d
        .eigenvectors()
        .iter_rows()
        .map(|w| w.iter().map(|x| (x * x) * (x * x)).sum())
        .collect();
    let pr = ipr.iter().map(|i| 1.0 / i).collect();
    ParticipationSeries {
        window_index: d.window_index,
        ipr,
        pr,
    }
}

/// Components that explain more than their `1/N` share of the variance,
/// i.e. `beta_k > 1`.
pub fn kaiser_guttman_count(d: &SpectralDecomposition) -> usize {
    d.eigenvalues().iter().filter(|&&b| b > 1.0).count()
}

/// Length of the leading run of ranks with `observed[k] > baseline[k]`.
pub fn scree_prefix_count(observed: &[f64], baseline: &[f64]) -> usize {
    observed.iter().zip(baseline).take_while(|(o, b)| o > b).count()
}

/// Number of ranks anywhere in the spectrum with `observed[k] > baseline[k]`.
pub fn scree_exceedance_count(observed: &[f64], baseline: &[f64]) -> usize {
    observed.iter().zip(baseline).filter(|(o, b)| o > b).count()
}

fn check_baseline(d: &SpectralDecomposition, baseline: &NullEnsembleStats) -> Result<()> {
    let expected = baseline.scree_mean.len();
    if expected != d.n() {
        return Err(Error::BaselineMismatch { expected, found: d.n() });
    }
    Ok(())
}

/// Leading eigenvalues that beat the rank-matched null mean.
pub fn scree_significant_count(d: &SpectralDecomposition, baseline: &NullEnsembleStats) -> Result<usize> {
    check_baseline(d, baseline)?;
    Ok(scree_prefix_count(d.eigenvalues(), &baseline.scree_mean))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignificanceCounts {
    pub window_index: usize,
    pub kaiser_count: usize,
    /// Contiguous-prefix scree count.
    pub scree_count: usize,
    /// Total ranks above the null profile, prefix or not.
    pub scree_exceedances: usize,
}

pub fn significance_counts(d: &SpectralDecomposition, baseline: &NullEnsembleStats) -> Result<SignificanceCounts> {
    check_baseline(d, baseline)?;
    Ok(SignificanceCounts {
        window_index: d.window_index,
        kaiser_count: kaiser_guttman_count(d),
        scree_count: scree_prefix_count(d.eigenvalues(), &baseline.scree_mean),
        scree_exceedances: scree_exceedance_count(d.eigenvalues(), &baseline.scree_mean),
    })
}

/// `|r(z_i, w_k)|` for the first `ranks` components, `None` where the
/// adjusted component vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjustedCorrelations {
    n: usize,
    ranks: usize,
    values: Vec<Option<f64>>,
}

impl AdjustedCorrelations {
    pub fn n_assets(&self) -> usize {
        self.n
    }

    pub fn ranks(&self) -> usize {
        self.ranks
    }

    /// Entry for asset index `i` and 1-based `rank`.
    pub fn get(&self, i: usize, rank: usize) -> Option<f64> {
        assert!(i < self.n && (1..=self.ranks).contains(&rank));
        self.values[i * self.ranks + rank - 1]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssetComponentCorrelations {
    pub window_index: usize,
    /// `|r(z_i, y_k)|` at `(i, k - 1)`.
    pub abs_r: Matrix,
    pub abs_r_adjusted: Option<AdjustedCorrelations>,
}

impl AssetComponentCorrelations {
    pub fn with_adjusted(mut self, adjusted: AdjustedCorrelations) -> Self {
        self.abs_r_adjusted = Some(adjusted);
        self
    }
}

/// `|r(z_i, y_k)| = |omega_ki| sqrt(beta_k)`.
pub fn asset_component_correlations(d: &SpectralDecomposition) -> Result<AssetComponentCorrelations> {
    let n = d.n();
    let mut roots = Vec::with_capacity(n);
    for (k, &beta) in d.eigenvalues().iter().enumerate() {
        if beta < -PSD_TOLERANCE {
            return Err(Error::NegativeEigenvalue {
                rank: k + 1,
                value: beta,
            });
        }
        roots.push(libm::sqrt(beta.max(0.0)));
    }
    let omega = d.eigenvectors();
    let abs_r = Matrix::from_fn(n, n, |i, k| (omega[(k, i)].abs() * roots[k]).min(1.0));
    Ok(AssetComponentCorrelations {
        window_index: d.window_index,
        abs_r,
        abs_r_adjusted: None,
    })
}

/// Correlations with every adjusted component (all N ranks).
pub fn adjusted_component_correlations(window: &WindowView, d: &SpectralDecomposition) -> Result<AdjustedCorrelations> {
    adjusted_component_correlations_upto(window, d, d.n())
}

/// Correlation of each asset with the components rebuilt without that
/// asset, `w_k(t) = sum_{j != i} omega_kj z_j(t)`, for ranks `1..=max_rank`.
pub fn adjusted_component_correlations_upto(
    window: &WindowView,
    d: &SpectralDecomposition,
    max_rank: usize,
) -> Result<AdjustedCorrelations> {
    let n = d.n();
    if window.n_assets() != n {
        return Err(Error::ShapeMismatch {
            what: "window assets vs decomposition",
            expected: n,
            found: window.n_assets(),
        });
    }
    if max_rank > n {
        return Err(Error::RankOutOfRange { rank: max_rank, n });
    }
    let z = &window.z_hat;
    let t = z.cols();
    let mut values = alloc::vec![None; n * max_rank];
    let mut y = alloc::vec![0.0; t];
    let mut w = alloc::vec![0.0; t];
    for k in 0..max_rank {
        let omega = d.eigenvectors().row(k);
        y.iter_mut().for_each(|v| *v = 0.0);
        for (j, &o) in omega.iter().enumerate() {
            for (yt, zt) in y.iter_mut().zip(z.row(j)) {
                *yt += o * zt;
            }
        }
        for i in 0..n {
            let zi = z.row(i);
            for ((wt, yt), zt) in w.iter_mut().zip(&y).zip(zi) {
                *wt = yt - omega[i] * zt;
            }
            let m = w.iter().sum::<f64>() / t as f64;
            let var = w.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / t as f64;
            if libm::sqrt(var) <= ADJUSTED_SPREAD_FLOOR {
                continue;
            }
            values[i * max_rank + k] = pearson(zi, &w).map(f64::abs);
        }
    }
    Ok(AdjustedCorrelations {
        n,
        ranks: max_rank,
        values,
    })
}

/// Per rank `k <= max_rank`, the samples `abs_r[i][k] - abs_r_adjusted[i][k]`
/// over assets with a defined adjusted value.
pub fn self_correlation_deltas(acc: &AssetComponentCorrelations, max_rank: usize) -> Result<Vec<Vec<f64>>> {
    let adj = acc.abs_r_adjusted.as_ref().ok_or(Error::MissingAdjusted)?;
    if max_rank > adj.ranks() {
        return Err(Error::RankOutOfRange {
            rank: max_rank,
            n: adj.ranks(),
        });
    }
    Ok((1..=max_rank)
        .map(|rank| {
            (0..adj.n_assets())
                .filter_map(|i| adj.get(i, rank).map(|a| acc.abs_r[(i, rank - 1)] - a))
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nulls::NullConfig;
    use crate::panel::synthetic_weekly_dates;
    use alloc::vec;

    fn decomposition(values: Vec<f64>, vectors: Matrix) -> SpectralDecomposition {
        SpectralDecomposition::from_eigenpairs(0, values, vectors)
    }

    fn baseline(scree: Vec<f64>) -> NullEnsembleStats {
        let n = scree.len();
        NullEnsembleStats {
            config: NullConfig::gaussian(n, 10, 1, 0),
            pr_mean: vec![0.0; n],
            pr_std: vec![0.0; n],
            scree_mean: scree,
            abs_corr_p99: vec![0.0; n],
        }
    }

    #[test]
    fn variance_fraction_examples() {
        let v = variance_fractions(&decomposition(vec![2.0, 1.0, 1.0, 0.0], Matrix::identity(4)));
        assert_eq!(v.fractions, [0.5, 0.25, 0.25, 0.0]);
        assert_eq!(v.cumulative, [0.5, 0.75, 1.0, 1.0]);
        let v = variance_fractions(&decomposition(vec![3.0, 0.0, 0.0], Matrix::identity(3)));
        assert_eq!(v.fractions, [1.0, 0.0, 0.0]);
        let v = variance_fractions(&decomposition(vec![1.0; 5], Matrix::identity(5)));
        assert!(v.fractions.iter().all(|&f| f == 0.2));
    }

    #[test]
    fn participation_limits() {
        let n = 4;
        let uniform = Matrix::from_fn(n, n, |_, _| 0.5);
        let p = participation(&decomposition(vec![1.0; n], uniform));
        assert!((p.ipr[0] - 0.25).abs() < 1e-15 && (p.pr[0] - 4.0).abs() < 1e-12);
        let p = participation(&decomposition(vec![1.0; n], Matrix::identity(n)));
        assert!(p.pr.iter().all(|&x| x == 1.0));
        let h = libm::sqrt(0.5);
        let two = Matrix::from_rows(&[[h, h, 0.0], [0.0, 0.0, 1.0], [h, -h, 0.0]]);
        let p = participation(&decomposition(vec![2.0, 1.0, 0.0], two));
        assert!((p.ipr[0] - 0.5).abs() < 1e-15 && (p.pr[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn kaiser_examples() {
        let id = Matrix::identity(4);
        assert_eq!(
            kaiser_guttman_count(&decomposition(vec![2.5, 1.2, 0.9, 0.4], id.clone())),
            2
        );
        assert_eq!(kaiser_guttman_count(&decomposition(vec![1.0; 4], id.clone())), 0);
        assert_eq!(kaiser_guttman_count(&decomposition(vec![4.0, 0.0, 0.0, 0.0], id)), 1);
    }

    #[test]
    fn scree_examples() {
        let d = decomposition(vec![5.0, 2.0, 0.5, 0.3], Matrix::identity(4));
        let b = baseline(vec![3.0, 1.5, 1.2, 0.1]);
        assert_eq!(scree_significant_count(&d, &b).unwrap(), 2);
        let c = significance_counts(&d, &b).unwrap();
        assert_eq!((c.scree_count, c.scree_exceedances), (2, 3));
        let same = baseline(d.eigenvalues().to_vec());
        assert_eq!(scree_significant_count(&d, &same).unwrap(), 0);
        let wrong = baseline(vec![1.0; 3]);
        assert_eq!(
            scree_significant_count(&d, &wrong).unwrap_err(),
            Error::BaselineMismatch { expected: 3, found: 4 }
        );
    }

    #[test]
    fn asset_component_examples() {
        let h = libm::sqrt(0.5);
        let d = decomposition(vec![2.0, 0.0], Matrix::from_rows(&[[h, h], [h, -h]]));
        let acc = asset_component_correlations(&d).unwrap();
        assert!((acc.abs_r[(0, 0)] - 1.0).abs() < 1e-15);
        assert_eq!(acc.abs_r[(0, 1)], 0.0);

        let d = decomposition(vec![1.0, 1.0], Matrix::identity(2));
        let acc = asset_component_correlations(&d).unwrap();
        assert_eq!(acc.abs_r, Matrix::identity(2));

        let d = decomposition(vec![2.0, -1e-6], Matrix::identity(2));
        assert!(matches!(
            asset_component_correlations(&d),
            Err(Error::NegativeEigenvalue { rank: 2, .. })
        ));
        let d = decomposition(vec![2.0, -1e-10], Matrix::identity(2));
        assert_eq!(asset_component_correlations(&d).unwrap().abs_r[(1, 1)], 0.0);
    }

    fn window(rows: &[&[f64]]) -> WindowView {
        WindowView {
            window_index: 0,
            start: 0,
            end_date: synthetic_weekly_dates(1)[0],
            z_hat: Matrix::from_rows(rows),
        }
    }

    #[test]
    fn adjusted_duplicate_assets() {
        let w = window(&[&[1.0, -1.0, 1.0, -1.0], &[1.0, -1.0, 1.0, -1.0]]);
        let h = libm::sqrt(0.5);
        let d = decomposition(vec![2.0, 0.0], Matrix::from_rows(&[[h, h], [h, -h]]));
        let adj = adjusted_component_correlations(&w, &d).unwrap();
        assert!((adj.get(0, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!((adj.get(1, 1).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn adjusted_localized_is_undefined() {
        let w = window(&[&[1.0, -1.0, 1.0, -1.0], &[1.0, 1.0, -1.0, -1.0]]);
        let d = decomposition(vec![1.0, 1.0], Matrix::identity(2));
        let adj = adjusted_component_correlations(&w, &d).unwrap();
        assert_eq!(adj.get(0, 1), None);
        // remainder for asset 1 on rank 1 is z_0, orthogonal to z_1
        assert_eq!(adj.get(1, 1), Some(0.0));

        let acc = asset_component_correlations(&d).unwrap().with_adjusted(adj);
        let deltas = self_correlation_deltas(&acc, 2).unwrap();
        assert_eq!(deltas[0], [0.0]);
        assert_eq!(deltas[1], [0.0]);
    }

    #[test]
    fn deltas_vanish_when_equal() {
        let d = decomposition(vec![1.5, 0.5], Matrix::identity(2));
        let mut acc = asset_component_correlations(&d).unwrap();
        let vals = (0..2)
            .flat_map(|i| (0..2).map(move |k| (i, k)))
            .map(|(i, k)| Some(acc.abs_r[(i, k)]))
            .collect();
        acc.abs_r_adjusted = Some(AdjustedCorrelations {
            n: 2,
            ranks: 2,
            values: vals,
        });
        for ds in self_correlation_deltas(&acc, 2).unwrap() {
            assert_eq!(ds.len(), 2);
            assert!(ds.iter().all(|&x| x == 0.0));
        }
        assert!(self_correlation_deltas(&acc, 3).is_err());
    }
}
