//! Random instance generators and independent reference implementations
//! shared by the integration tests.
#![allow(dead_code)]

pub mod accounting;
pub mod socp;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use riskbudget::linalg::{Matrix, SymMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Positive definite covariance with weekly-return-like scale: random
/// factor loadings, idiosyncratic noise and per-asset volatilities.
pub fn random_cov(n: usize, rng: &mut impl Rng) -> SymMatrix {
    let k = n + 3;
    let a = DMatrix::from_fn(n, k, |_, _| rng.gen_range(-1.0..1.0));
    let mut c = &a * a.transpose() / k as f64;
    for i in 0..n {
        c[(i, i)] += rng.gen_range(0.05..0.5);
    }
    let vols: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..0.06)).collect();
    let d = c.diagonal().map(f64::sqrt);
    SymMatrix::from_upper_fn(n, |i, j| c[(i, j)] / (d[i] * d[j]) * vols[i] * vols[j])
}

/// Point on the simplex with every coordinate bounded away from zero.
pub fn random_simplex(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = v.iter().sum();
    v.iter().map(|x| x / s).collect()
}

pub fn to_na(c: &SymMatrix) -> DMatrix<f64> {
    let n = c.dim();
    DMatrix::from_fn(n, n, |i, j| c[(i, j)])
}

pub fn from_na(m: &DMatrix<f64>) -> Matrix {
    Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn quad(c: &SymMatrix, x: &[f64]) -> f64 {
    let n = x.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += x[i] * c[(i, j)] * x[j];
        }
    }
    s
}

pub fn contributions(c: &SymMatrix, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let total = quad(c, x);
    (0..n)
        .map(|i| x[i] * (0..n).map(|j| c[(i, j)] * x[j]).sum::<f64>() / total)
        .collect()
}

/// `V · max(Λ, eps) · Vᵀ` of the symmetric part, computed with nalgebra.
pub fn eigen_clip(x: &Matrix, eps: f64) -> DMatrix<f64> {
    let n = x.rows();
    let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (x[(i, j)] + x[(j, i)]));
    let e = SymmetricEigen::new(m);
    let lam = e.eigenvalues.map(|l| l.max(eps));
    &e.eigenvectors * DMatrix::from_diagonal(&lam) * e.eigenvectors.transpose()
}

/// Two-pass sample covariance.
pub fn two_pass_cov(obs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let t = obs.len();
    let n = obs[0].len();
    let mean: Vec<f64> = (0..n).map(|i| obs.iter().map(|o| o[i]).sum::<f64>() / t as f64).collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    obs.iter().map(|o| (o[i] - mean[i]) * (o[j] - mean[j])).sum::<f64>() / (t - 1) as f64
                })
                .collect()
        })
        .collect()
}

/// Long-only minimum-variance weights by enumerating supports: on each
/// support the equality-constrained optimum is `C_S⁻¹1 / 1ᵀC_S⁻¹1`; the
/// answer is the feasible candidate of least variance.
pub fn min_variance_oracle(c: &SymMatrix) -> Vec<f64> {
    let n = c.dim();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let k = support.len();
        let cs = DMatrix::from_fn(k, k, |a, b| c[(support[a], support[b])]);
        let Some(inv1) = cs.cholesky().map(|ch| ch.solve(&DVector::from_element(k, 1.0))) else {
            continue;
        };
        let total: f64 = inv1.sum();
        if inv1.iter().any(|v| *v < 0.0) {
            continue;
        }
        let mut x = vec![0.0; n];
        for (a, &i) in support.iter().enumerate() {
            x[i] = inv1[a] / total;
        }
        let var = quad(c, &x);
        if best.as_ref().map_or(true, |(v, _)| var < *v) {
            best = Some((var, x));
        }
    }
    best.expect("some support is feasible").1
}

/// Dense grid search for two assets over `x₁ ∈ [0, 1]` in steps of `step`,
/// honouring `contribᵢ ≥ bᵢ`, non-negative marginal risk and bounds.
#[allow(clippy::too_many_arguments)]
pub fn grid_search_two(
    c: &SymMatrix,
    b: &[f64],
    r: &[f64],
    lambda: f64,
    mu: f64,
    x0: &[f64],
    lower: &[f64],
    upper: &[f64],
    step: f64,
) -> Option<(Vec<f64>, f64)> {
    let steps = (1.0 / step).round() as usize;
    let mut best: Option<(Vec<f64>, f64)> = None;
    for k in 0..=steps {
        let x1 = k as f64 / steps as f64;
        let x = vec![x1, 1.0 - x1];
        if (0..2).any(|i| x[i] < lower[i] - 1e-12 || x[i] > upper[i] + 1e-12) {
            continue;
        }
        let var = quad(c, &x);
        if var <= 0.0 {
            continue;
        }
        let rc = contributions(c, &x);
        // A zero budget still keeps the asset's marginal risk non-negative,
        // the convex reading of `xᵢ(Cx)ᵢ ≥ 0`.
        let marginal = |i: usize| c[(i, 0)] * x[0] + c[(i, 1)] * x[1];
        if (0..2).any(|i| rc[i] < b[i] - 1e-12 || marginal(i) < -1e-15) {
            continue;
        }
        let obj = -(r[0] * x[0] + r[1] * x[1])
            + lambda * var.sqrt()
            + mu * ((x[0] - x0[0]).abs() + (x[1] - x0[1]).abs());
        if best.as_ref().map_or(true, |(_, o)| obj < *o) {
            best = Some((x, obj));
        }
    }
    best
}

/// Geometric random walk of weekly prices, `drift` per week on average.
pub fn random_panel(weeks: usize, n: usize, drift: f64, rng: &mut impl Rng) -> riskbudget::data::WeeklyPanel {
    let start = chrono::NaiveDate::from_ymd_opt(2021, 1, 1).unwrap();
    let vols: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..0.05)).collect();
    let mut p: Vec<f64> = (0..n).map(|_| rng.gen_range(20.0..200.0)).collect();
    let mut rows = Vec::with_capacity(weeks);
    for _ in 0..weeks {
        rows.push(p.clone());
        for (i, v) in p.iter_mut().enumerate() {
            *v *= 1.0 + drift + vols[i] * rng.gen_range(-1.7..1.7);
        }
    }
    let dates = (0..weeks).map(|k| start + chrono::Duration::weeks(k as i64)).collect();
    let assets = (0..n).map(|i| format!("S{i}")).collect();
    riskbudget::data::WeeklyPanel::new(dates, assets, rows).unwrap()
}
