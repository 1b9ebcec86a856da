//! Per-window correlation matrices and the moments of their off-diagonal
//! coefficients.

use alloc::vec::Vec;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::panel::WindowView;

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub window_index: usize,
    pub end_date: NaiveDate,
    values: Matrix,
}

impl CorrelationMatrix {
    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.rows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    /// Upper-triangle coefficients `r(i, j)`, `i < j`, in row order.
    pub fn off_diagonal(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            out.extend_from_slice(&self.values.row(i)[i + 1..]);
        }
        out
    }

    /// Wraps an externally built matrix, enforcing symmetry and a unit
    /// diagonal.
    pub fn from_matrix(window_index: usize, end_date: NaiveDate, mut values: Matrix) -> Result<Self> {
        if !values.is_square() {
            return Err(Error::ShapeMismatch {
                what: "correlation matrix columns",
                expected: values.rows(),
                found: values.cols(),
            });
        }
        let n = values.rows();
        for i in 0..n {
            for j in 0..n {
                if !values[(i, j)].is_finite() {
                    return Err(Error::NonFinite {
                        what: "correlation",
                        row: i,
                        col: j,
                    });
                }
            }
        }
        for i in 0..n {
            values[(i, i)] = 1.0;
            for j in i + 1..n {
                let s = 0.5 * (values[(i, j)] + values[(j, i)]);
                values[(i, j)] = s;
                values[(j, i)] = s;
            }
        }
        Ok(Self {
            window_index,
            end_date,
            values,
        })
    }
}

/// `R = (1/T) Z Z^T` for a standardized window.
pub fn correlation_matrix(window: &WindowView) -> Result<CorrelationMatrix> {
    let z = &window.z_hat;
    let (n, t) = (z.rows(), z.cols());
    let inv_t = 1.0 / t as f64;
    let mut r = Matrix::zeros(n, n);
    for i in 0..n {
        let zi = z.row(i);
        for j in i + 1..n {
            let dot: f64 = zi.iter().zip(z.row(j)).map(|(a, b)| a * b).sum();
            let v = (dot * inv_t).clamp(-1.0, 1.0);
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    what: "correlation",
                    row: i,
                    col: j,
                });
            }
            r[(i, j)] = v;
            r[(j, i)] = v;
        }
        r[(i, i)] = 1.0;
    }
    Ok(CorrelationMatrix {
        window_index: window.window_index,
        end_date: window.end_date,
        values: r,
    })
}

/// Moments of the `N(N-1)/2` upper-triangle coefficients.
///
/// Skewness and kurtosis are the third and fourth standardized central
/// moments (population convention, kurtosis not excess: Gaussian gives 3).
/// Both are `None` when the coefficients have no spread.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientMoments {
    pub mean: f64,
    pub std: f64,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
}

impl CoefficientMoments {
    pub fn from_sample(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
        for x in xs {
            let d = x - mean;
            let d2 = d * d;
            m2 += d2;
            m3 += d2 * d;
            m4 += d2 * d2;
        }
        m2 /= n;
        m3 /= n;
        m4 /= n;
        let std = libm::sqrt(m2);
        // exact zero only; a tiny but nonzero spread still has a shape
        if m2 == 0.0 {
            return Self {
                mean,
                std,
                skewness: None,
                kurtosis: None,
            };
        }
        Self {
            mean,
            std,
            skewness: Some(m3 / (m2 * std)),
            kurtosis: Some(m4 / (m2 * m2)),
        }
    }
}

pub fn coefficient_moments(m: &CorrelationMatrix) -> Result<CoefficientMoments> {
    if m.n() < 3 {
        return Err(Error::TooFewAssets { found: m.n() });
    }
    Ok(CoefficientMoments::from_sample(&m.off_diagonal()))
}
