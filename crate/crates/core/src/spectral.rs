//! Eigen-spectra of correlation matrices and the Marchenko–Pastur reference.
//!
//! Decompositions are of `R` itself, so the eigenvalues sum to `N`.
//!
//! Eigenvectors carry a fixed sign: each `omega_k` has a positive entry sum,
//! or, when the sum is within `1e-12` of zero, a positive largest-magnitude
//! entry (first such index on ties).

use alloc::vec::Vec;

use crate::correlation::CorrelationMatrix;
use crate::eigen::{symmetric_eigen, EigenMethod};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Eigenvalues below this are treated as round-off around zero.
pub const PSD_TOLERANCE: f64 = 1e-8;

const SIGN_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub window_index: usize,
    eigenvalues: Vec<f64>,
    eigenvectors: Matrix,
}

impl SpectralDecomposition {
    /// Builds a decomposition from eigenpairs in any order, sorting them by
    /// descending eigenvalue and applying the sign convention.
    pub fn from_eigenpairs(window_index: usize, values: Vec<f64>, vectors: Matrix) -> Self {
        let n = values.len();
        assert_eq!(vectors.rows(), n);
        let mut order: Vec<usize> = (0..n).collect();
        // stable: equal eigenvalues keep solver order
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        let eigenvalues = order.iter().map(|&k| values[k]).collect();
        let mut eigenvectors = vectors.select_rows(&order);
        for k in 0..n {
            apply_sign_convention(eigenvectors.row_mut(k));
        }
        Self {
            window_index,
            eigenvalues,
            eigenvectors,
        }
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `beta_1 >= ... >= beta_N`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Row `k - 1` is `omega_k`.
    pub fn eigenvectors(&self) -> &Matrix {
        &self.eigenvectors
    }

    /// `beta_k` for 1-based `rank`.
    pub fn eigenvalue(&self, rank: usize) -> Result<f64> {
        self.check_rank(rank)?;
        Ok(self.eigenvalues[rank - 1])
    }

    /// `omega_k` for 1-based `rank`.
    pub fn eigenvector(&self, rank: usize) -> Result<&[f64]> {
        self.check_rank(rank)?;
        Ok(self.eigenvectors.row(rank - 1))
    }

    pub(crate) fn check_rank(&self, rank: usize) -> Result<()> {
        if rank == 0 || rank > self.n() {
            return Err(Error::RankOutOfRange { rank, n: self.n() });
        }
        Ok(())
    }

    /// `Omega^T D Omega`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.n();
        let mut out = Matrix::zeros(n, n);
        for (k, &beta) in self.eigenvalues.iter().enumerate() {
            let w = self.eigenvectors.row(k);
            for i in 0..n {
                let bi = beta * w[i];
                for (o, wj) in out.row_mut(i).iter_mut().zip(w) {
                    *o += bi * wj;
                }
            }
        }
        out
    }

    /// Principal-component time series `Y = Omega Z`.
    pub fn components(&self, z_hat: &Matrix) -> Matrix {
        self.eigenvectors.matmul(z_hat)
    }
}

fn apply_sign_convention(w: &mut [f64]) {
    let sum: f64 = w.iter().sum();
    let flip = if sum.abs() > SIGN_SUM_TOLERANCE {
        sum < 0.0
    } else {
        let mut best = 0;
        for (i, x) in w.iter().enumerate() {
            if x.abs() > w[best].abs() {
                best = i;
            }
        }
        w.get(best).is_some_and(|&x| x < 0.0)
    };
    if flip {
        for x in w {
            *x = -*x;
        }
    }
}

/// Eigendecomposition with the default solver.
pub fn eigendecompose(m: &CorrelationMatrix) -> Result<SpectralDecomposition> {
    eigendecompose_with(m, EigenMethod::default())
}

pub fn eigendecompose_with(m: &CorrelationMatrix, method: EigenMethod) -> Result<SpectralDecomposition> {
    let eig = symmetric_eigen(m.values(), method)?;
    let d = SpectralDecomposition::from_eigenpairs(m.window_index, eig.values, eig.vectors);
    if let Some(&min) = d.eigenvalues.last() {
        if min < -PSD_TOLERANCE {
            return Err(Error::NotPositiveSemidefinite {
                window_index: m.window_index,
                min_eigenvalue: min,
            });
        }
    }
    Ok(d)
}

/// Support and parameters of the Marchenko–Pastur density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MPBounds {
    pub gamma_minus: f64,
    pub gamma_plus: f64,
    pub q: f64,
    pub sigma2: f64,
}

/// `gamma_pm = sigma2 (1 + 1/Q +- 2 sqrt(1/Q))` for `Q = T/N >= 1`.
pub fn mp_bounds(q: f64, sigma2: f64) -> Result<MPBounds> {
    if !(q.is_finite() && q >= 1.0) {
        return Err(Error::InvalidQ(q));
    }
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(Error::InvalidVariance(sigma2));
    }
    let inv_q = 1.0 / q;
    let root = 2.0 * libm::sqrt(inv_q);
    Ok(MPBounds {
        gamma_minus: sigma2 * (1.0 + inv_q - root),
        gamma_plus: sigma2 * (1.0 + inv_q + root),
        q,
        sigma2,
    })
}

/// `rho(gamma) = Q / (2 pi sigma2) sqrt((gamma_+ - gamma)(gamma - gamma_-)) / gamma`
/// on `(gamma_-, gamma_+]`, zero elsewhere.
pub fn mp_density(gamma: f64, bounds: &MPBounds) -> f64 {
    let MPBounds {
        gamma_minus,
        gamma_plus,
        q,
        sigma2,
    } = *bounds;
    if !(gamma > gamma_minus && gamma <= gamma_plus) || gamma <= 0.0 {
        return 0.0;
    }
    let radicand = (gamma_plus - gamma) * (gamma - gamma_minus);
    q / (2.0 * core::f64::consts::PI * sigma2) * libm::sqrt(radicand.max(0.0)) / gamma
}

/// `sqrt(N) omega_ki` for `i = 1..N`, the unit-variance scaling used for
/// comparison with Gaussian-orthogonal-ensemble eigenvector statistics.
pub fn eigenvector_zscores(d: &SpectralDecomposition, rank: usize) -> Result<Vec<f64>> {
    let w = d.eigenvector(rank)?;
    let s = libm::sqrt(d.n() as f64);
    Ok(w.iter().map(|x| s * x).collect())
}
