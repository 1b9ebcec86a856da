//! Independent oracles for the numerical kernels.

use corrscope_core::eigen::{symmetric_eigen, EigenMethod};
use corrscope_core::spectral::eigendecompose_with;
use corrscope_core::*;

fn gaussian_window(n: usize, t: usize, seed: u64) -> WindowView {
    let p = simulate_gaussian_panel(n, t, seed).unwrap();
    standardize_window(&p, 0, t, seed as usize).unwrap()
}

fn factor_window(seed: u64) -> WindowView {
    let spec = FactorSpec::equal_blocks(2, 4, 0.7, 0.5);
    let p = synthetic_factor_panel(&spec, 30, seed).unwrap();
    standardize_window(&p, 0, 30, 0).unwrap()
}

/// Pairwise Pearson correlation straight from the raw returns.
fn pairwise_oracle(raw: &[f64], other: &[f64]) -> f64 {
    let t = raw.len() as f64;
    let ma = raw.iter().sum::<f64>() / t;
    let mb = other.iter().sum::<f64>() / t;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for k in 0..raw.len() {
        cov += (raw[k] - ma) * (other[k] - mb);
        va += (raw[k] - ma).powi(2);
        vb += (other[k] - mb).powi(2);
    }
    cov / (va * vb).sqrt()
}

#[test]
fn correlation_matches_pairwise_loop() {
    for seed in 0..20 {
        let panel = synthetic_factor_panel(&FactorSpec::equal_blocks(3, 3, 0.6, 0.8), 40, seed).unwrap();
        let w = standardize_window(&panel, 5, 30, 0).unwrap();
        let r = correlation_matrix(&w).unwrap();
        let raw = panel.returns();
        for i in 0..9 {
            for j in 0..9 {
                let expect = if i == j {
                    1.0
                } else {
                    pairwise_oracle(&raw.row(i)[5..35], &raw.row(j)[5..35])
                };
                assert!((r.get(i, j) - expect).abs() < 1e-12, "({i},{j})");
            }
        }
        assert_eq!(r.values().trace(), 9.0);
    }
}

/// det(R - x I) for a symmetric 3x3 matrix.
fn char_poly(r: &Matrix, x: f64) -> f64 {
    let a = |i, j| r[(i, j)] - if i == j { x } else { 0.0 };
    a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
        + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
}

/// Roots of the characteristic polynomial by grid scan plus bisection.
fn char_poly_roots(r: &Matrix) -> Vec<f64> {
    let (lo, hi) = (-0.5, 3.5);
    let steps = 40_000;
    let mut roots = Vec::new();
    let h = (hi - lo) / steps as f64;
    for s in 0..steps {
        let (mut a, mut b) = (lo + h * s as f64, lo + h * (s + 1) as f64);
        let (fa, fb) = (char_poly(r, a), char_poly(r, b));
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fa * fb < 0.0 {
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if char_poly(r, a) * char_poly(r, m) <= 0.0 {
                    b = m;
                } else {
                    a = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    roots
}

#[test]
fn eigenvalues_match_characteristic_polynomial() {
    for seed in 0..10 {
        let w = gaussian_window(3, 6, 100 + seed);
        let r = correlation_matrix(&w).unwrap();
        let roots = char_poly_roots(r.values());
        assert_eq!(roots.len(), 3, "seed {seed}: {roots:?}");
        let d = eigendecompose(&r).unwrap();
        for (b, x) in d.eigenvalues().iter().zip(&roots) {
            assert!((b - x).abs() < 1e-8, "{b} vs {x}");
        }
    }
}

fn assert_decomposition_invariants(r: &CorrelationMatrix, d: &SpectralDecomposition) {
    let n = r.n();
    let omega = d.eigenvectors();
    for j in 0..n {
        for k in 0..n {
            let dot: f64 = omega.row(j).iter().zip(omega.row(k)).map(|(a, b)| a * b).sum();
            if j == k {
                assert!((dot - 1.0).abs() <= 1e-10);
            } else {
                assert!(dot.abs() <= 1e-8);
            }
        }
        assert!(omega.row(j).iter().sum::<f64>() >= -1e-12);
    }
    assert!(r.values().max_abs_diff(&d.reconstruct()) <= 1e-8);
    assert!((d.eigenvalues().iter().sum::<f64>() - n as f64).abs() <= 1e-8);
    assert!(*d.eigenvalues().last().unwrap() >= -1e-8);
    assert!(d.eigenvalues().windows(2).all(|p| p[0] >= p[1]));
}

#[test]
fn decomposition_invariants_on_random_windows() {
    for seed in 0..30 {
        let (n, t) = (2 + (seed as usize % 19), 5 + (seed as usize * 7) % 60);
        let w = gaussian_window(n, t, seed);
        let r = correlation_matrix(&w).unwrap();
        assert_decomposition_invariants(&r, &eigendecompose(&r).unwrap());
        assert_decomposition_invariants(&r, &eigendecompose_with(&r, EigenMethod::Jacobi).unwrap());
    }
}

#[test]
fn qr_and_jacobi_agree_on_nondegenerate_spectra() {
    for seed in 0..10 {
        let r = correlation_matrix(&factor_window(seed)).unwrap();
        let a = eigendecompose(&r).unwrap();
        let b = eigendecompose_with(&r, EigenMethod::Jacobi).unwrap();
        for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
            assert!((x - y).abs() < 1e-10);
        }
        let gaps_ok = a.eigenvalues().windows(2).all(|p| p[0] - p[1] > 1e-6);
        if gaps_ok {
            assert!(a.eigenvectors().max_abs_diff(b.eigenvectors()) < 1e-8);
        }
    }
}

#[test]
fn degenerate_spectrum_subspace() {
    // two identical blocks of perfectly correlated pairs: eigenvalue 2 twice
    let m = Matrix::from_rows(&[
        [1.0, 1.0, 0.0, 0.0],
        [1.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 1.0],
        [0.0, 0.0, 1.0, 1.0],
    ]);
    let r = CorrelationMatrix::from_matrix(0, NaiveDate::from_ymd_opt(2001, 1, 5).unwrap(), m).unwrap();
    let d = eigendecompose(&r).unwrap();
    assert!((d.eigenvalues()[0] - 2.0).abs() < 1e-12 && (d.eigenvalues()[1] - 2.0).abs() < 1e-12);
    // projector onto the top eigenspace equals R / 2
    let mut proj = Matrix::zeros(4, 4);
    for k in 0..2 {
        let w = d.eigenvectors().row(k);
        for i in 0..4 {
            for j in 0..4 {
                proj[(i, j)] += w[i] * w[j];
            }
        }
    }
    let half = Matrix::from_fn(4, 4, |i, j| 0.5 * r.get(i, j));
    assert!(proj.max_abs_diff(&half) < 1e-12);
}

#[test]
fn decomposition_is_deterministic() {
    let r = correlation_matrix(&gaussian_window(15, 20, 3)).unwrap();
    let a = eigendecompose(&r).unwrap();
    let b = eigendecompose(&r).unwrap();
    assert_eq!(a.eigenvectors().as_slice(), b.eigenvectors().as_slice());
    assert_eq!(a.eigenvalues(), b.eigenvalues());
}

#[test]
fn solver_handles_raw_symmetric_input() {
    let a = Matrix::from_rows(&[[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]]);
    let mut vals = symmetric_eigen(&a, EigenMethod::HouseholderQl).unwrap().values;
    vals.sort_by(f64::total_cmp);
    let s = 2f64.sqrt();
    for (v, e) in vals.iter().zip([2.0 - s, 2.0, 2.0 + s]) {
        assert!((v - e).abs() < 1e-14);
    }
}

/// Adaptive Simpson on `[a, b]`.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
            + rec(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, m, fm, whole, tol, 50)
}

#[test]
fn mp_density_integrates_to_one() {
    for (q, s2) in [(1.0, 1.0), (1.02, 1.0), (2.0, 0.7), (4.0, 1.0), (25.0, 2.0)] {
        let b = mp_bounds(q, s2).unwrap();
        let span = b.gamma_plus - b.gamma_minus;
        // gamma = gamma_- + span sin^2(theta) removes both endpoint singularities
        let integrand = |theta: f64| {
            let (s, c) = theta.sin_cos();
            let g = b.gamma_minus + span * s * s;
            mp_density(g, &b) * 2.0 * span * s * c
        };
        let total = adaptive_simpson(&integrand, 0.0, std::f64::consts::FRAC_PI_2, 1e-11);
        assert!((total - 1.0).abs() < 1e-6, "Q={q}: {total}");
    }
}

#[test]
fn abs_r_matches_pearson_with_components() {
    for seed in 0..25 {
        let n = 2 + seed as usize % 15;
        let w = if seed % 2 == 0 {
            gaussian_window(n, 40, seed)
        } else {
            factor_window(seed)
        };
        let r = correlation_matrix(&w).unwrap();
        let d = eigendecompose(&r).unwrap();
        let acc = asset_component_correlations(&d).unwrap();
        let y = d.components(&w.z_hat);
        for k in 0..d.n() {
            if d.eigenvalues()[k] < 1e-9 {
                continue;
            }
            for i in 0..d.n() {
                let direct = corrscope_core::stats::pearson(w.z_hat.row(i), y.row(k)).unwrap().abs();
                assert!((acc.abs_r[(i, k)] - direct).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn adjusted_matches_explicit_sum() {
    let w = factor_window(4);
    let d = eigendecompose(&correlation_matrix(&w).unwrap()).unwrap();
    let adj = corrscope_core::pca::adjusted_component_correlations(&w, &d).unwrap();
    let n = d.n();
    let t = w.len();
    for k in 0..n {
        for i in 0..n {
            let wk: Vec<f64> = (0..t)
                .map(|s| {
                    (0..n)
                        .filter(|&j| j != i)
                        .map(|j| d.eigenvectors()[(k, j)] * w.z_hat[(j, s)])
                        .sum()
                })
                .collect();
            let expect = corrscope_core::stats::pearson(w.z_hat.row(i), &wk).unwrap().abs();
            assert!((adj.get(i, k + 1).unwrap() - expect).abs() < 1e-10);
        }
    }
}
