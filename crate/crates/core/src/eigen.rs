//! Dense symmetric eigensolvers.
//!
//! [`EigenMethod::HouseholderQl`] reduces to tridiagonal form with
//! Householder reflections and then runs implicit QL with Wilkinson-style
//! shifts. [`EigenMethod::Jacobi`] is the cyclic Jacobi rotation method; it
//! is slower but structurally independent, which makes it a useful
//! cross-check.
//!
//! Both return eigenpairs in no particular order with eigenvectors stored as
//! matrix rows.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenMethod {
    #[default]
    HouseholderQl,
    Jacobi,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Row `k` is the unit eigenvector of `values[k]`.
    pub vectors: Matrix,
}

/// Eigendecomposition of the symmetric matrix `a`. Only the lower triangle
/// is read by the QL path; Jacobi reads the whole matrix.
pub fn symmetric_eigen(a: &Matrix, method: EigenMethod) -> Result<SymmetricEigen> {
    assert!(a.is_square(), "symmetric_eigen needs a square matrix");
    match method {
        EigenMethod::HouseholderQl => householder_ql(a),
        EigenMethod::Jacobi => jacobi(a),
    }
}

/// Rotation budget shared by both solvers, `100 N^2`.
fn rotation_budget(n: usize) -> usize {
    100 * n.max(1) * n.max(1)
}

fn householder_ql(a: &Matrix) -> Result<SymmetricEigen> {
    let n = a.rows();
    if n == 0 {
        return Ok(SymmetricEigen {
            values: Vec::new(),
            vectors: Matrix::zeros(0, 0),
        });
    }
    let mut v = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut v, &mut d, &mut e);
    // QL updates pairs of eigenvector columns; work on the transpose so the
    // inner loop runs over contiguous rows.
    let mut w = v.transpose();
    tridiagonal_ql(&mut d, &mut e, &mut w, rotation_budget(n))?;
    Ok(SymmetricEigen { values: d, vectors: w })
}

/// Householder reduction to tridiagonal form. On return `d` holds the
/// diagonal, `e[1..]` the subdiagonal and `v` the accumulated orthogonal
/// transform (columns).
fn tridiagonalize(v: &mut Matrix, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for &dk in &d[..i] {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for dk in &mut d[..i] {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = libm::sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in &mut e[..i] {
                *ej = 0.0;
            }

            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n - 1 {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL on the tridiagonal `(d, e)`; `w` rows are rotated along,
/// ending as eigenvectors.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], w: &mut Matrix, budget: usize) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0_f64;
    let mut rotations = 0usize;

    for l in 0..n {
        // find a negligible subdiagonal element
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }

        if m > l {
            loop {
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = libm::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in &mut d[l + 2..] {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = libm::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    rotate_rows(w, i, i + 1, c, s);
                    rotations += 1;
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
                if rotations > budget {
                    return Err(Error::NoConvergence {
                        iterations: rotations,
                        residual: e[l].abs(),
                    });
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// `(row_a, row_b) <- (c row_a - s row_b, s row_a + c row_b)`.
#[inline]
fn rotate_rows(w: &mut Matrix, a: usize, b: usize, c: f64, s: f64) {
    let (ra, rb) = w.two_rows_mut(a, b);
    for (x, y) in ra.iter_mut().zip(rb.iter_mut()) {
        let h = *y;
        *y = s * *x + c * h;
        *x = c * *x - s * h;
    }
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    libm::sqrt(s)
}

fn jacobi(a: &Matrix) -> Result<SymmetricEigen> {
    let n = a.rows();
    let mut m = a.clone();
    // rows of `v` become eigenvectors
    let mut v = Matrix::identity(n);
    let budget = rotation_budget(n);
    let mut rotations = 0usize;
    let scale = libm::sqrt(a.as_slice().iter().map(|x| x * x).sum::<f64>()).max(f64::MIN_POSITIVE);

    loop {
        let off = off_diagonal_norm(&m);
        if off <= 1e-14 * scale {
            break;
        }
        if rotations > budget {
            return Err(Error::NoConvergence {
                iterations: rotations,
                residual: off,
            });
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;

                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                rotate_rows(&mut v, p, q, c, s);
                rotations += 1;
            }
        }
    }
    let values = (0..n).map(|i| m[(i, i)]).collect();
    Ok(SymmetricEigen { values, vectors: v })
}
