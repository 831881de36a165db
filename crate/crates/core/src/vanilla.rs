//! Classical risk budgeting: find long-only weights whose fractional risk
//! contributions `xᵢ(Cx)ᵢ / xᵀCx` equal prescribed budgets `bᵢ`.
//!
//! The weights are obtained from the strictly convex problem
//! `min ½xᵀCx − Σ bᵢ log xᵢ` over `x > 0`, whose stationarity conditions
//! `(Cx)ᵢ = bᵢ / xᵢ` are the budget conditions at unit variance. The
//! minimizer is then rescaled onto the simplex; the budget conditions are
//! invariant under positive scaling.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{cholesky, dot, norm_inf, LinalgError, SymMatrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VanillaError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid risk budgets: {0}")]
    InvalidBudgets(String),
    #[error("no convergence after {iterations} iterations (KKT residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("degenerate portfolio: xᵀCx = {variance:.3e}")]
    DegeneratePortfolio { variance: f64 },
}

/// Per-asset fractional risk budgets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RiskBudgetSpec(Vec<f64>);

impl RiskBudgetSpec {
    /// Budgets with `bᵢ ≥ 0` and `Σbᵢ ≤ 1`, the floor semantics used by the
    /// allocation problem.
    pub fn new(budgets: Vec<f64>) -> Result<Self, VanillaError> {
        if budgets.is_empty() {
            return Err(VanillaError::InvalidBudgets("no assets".into()));
        }
        if let Some(i) = budgets.iter().position(|b| !b.is_finite() || *b < 0.0) {
            return Err(VanillaError::InvalidBudgets(format!(
                "budget {i} = {} is not a non-negative number",
                budgets[i]
            )));
        }
        let total: f64 = budgets.iter().sum();
        if total > 1.0 + 1e-12 {
            return Err(VanillaError::InvalidBudgets(format!(
                "budgets sum to {total}, more than 1"
            )));
        }
        Ok(RiskBudgetSpec(budgets))
    }

    pub fn uniform(n: usize) -> Self {
        RiskBudgetSpec(vec![1.0 / n as f64; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    fn check_vanilla(&self) -> Result<(), VanillaError> {
        if let Some(i) = self.0.iter().position(|&b| b <= 0.0) {
            return Err(VanillaError::InvalidBudgets(format!(
                "budget {i} is zero; drop zero-budget assets before solving"
            )));
        }
        let total = self.total();
        if (total - 1.0).abs() > 1e-10 {
            return Err(VanillaError::InvalidBudgets(format!(
                "budgets sum to {total}, expected 1"
            )));
        }
        Ok(())
    }
}

/// Fractional holdings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PortfolioWeights(Vec<f64>);

impl PortfolioWeights {
    pub fn new(weights: Vec<f64>) -> Self {
        PortfolioWeights(weights)
    }

    pub fn zeros(n: usize) -> Self {
        PortfolioWeights(vec![0.0; n])
    }

    pub fn equal(n: usize) -> Self {
        PortfolioWeights(vec![1.0 / n as f64; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for PortfolioWeights {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VanillaMethod {
    /// Damped Newton, falling back to coordinate descent if it stalls.
    Auto,
    Newton,
    CoordinateDescent,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VanillaOptions {
    /// Target for `max |(Cx)ᵢ − bᵢ/xᵢ| / (1 + ‖Cx‖∞)`.
    pub tol: f64,
    pub max_newton_iters: usize,
    pub max_sweeps: usize,
    pub method: VanillaMethod,
}

impl Default for VanillaOptions {
    fn default() -> Self {
        VanillaOptions {
            tol: 1e-10,
            max_newton_iters: 100,
            max_sweeps: 100_000,
            method: VanillaMethod::Auto,
        }
    }
}

/// Risk-budget weights on the simplex for budgets summing to one.
pub fn solve_vanilla(
    c: &SymMatrix,
    spec: &RiskBudgetSpec,
    tol: f64,
) -> Result<PortfolioWeights, VanillaError> {
    solve_vanilla_with(
        c,
        spec,
        &VanillaOptions {
            tol,
            ..VanillaOptions::default()
        },
    )
}

pub fn solve_vanilla_with(
    c: &SymMatrix,
    spec: &RiskBudgetSpec,
    opts: &VanillaOptions,
) -> Result<PortfolioWeights, VanillaError> {
    let x = solve_unit_variance(c, spec, opts)?;
    let total: f64 = x.iter().sum();
    Ok(PortfolioWeights(x.iter().map(|v| v / total).collect()))
}

/// Stationary point of `½xᵀCx − Σ bᵢ log xᵢ` before rescaling; satisfies
/// `xᵀCx = Σbᵢ = 1`.
pub fn solve_unit_variance(
    c: &SymMatrix,
    spec: &RiskBudgetSpec,
    opts: &VanillaOptions,
) -> Result<Vec<f64>, VanillaError> {
    let n = c.dim();
    if spec.len() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            found: spec.len(),
        }
        .into());
    }
    spec.check_vanilla()?;
    // Fails early with the offending pivot if C is not positive definite.
    cholesky(c)?;
    let b = spec.as_slice();

    let mut x: Vec<f64> = (0..n).map(|i| (b[i] / c[(i, i)]).sqrt()).collect();
    let var = c.quad_form(&x);
    let k = 1.0 / var.sqrt();
    x.iter_mut().for_each(|v| *v *= k);

    match opts.method {
        VanillaMethod::Newton => newton(c, b, x, opts).map_err(|(_, e)| e),
        VanillaMethod::CoordinateDescent => coordinate_descent(c, b, x, opts),
        VanillaMethod::Auto => match newton(c, b, x, opts) {
            Ok(x) => Ok(x),
            Err((last, _)) => coordinate_descent(c, b, last, opts),
        },
    }
}

fn kkt_residual(c: &SymMatrix, b: &[f64], x: &[f64]) -> f64 {
    let cx = c.mul_vec(x);
    let worst = cx
        .iter()
        .zip(b.iter().zip(x))
        .map(|(cxi, (bi, xi))| (cxi - bi / xi).abs())
        .fold(0.0, f64::max);
    worst / (1.0 + norm_inf(&cx))
}

fn objective(c: &SymMatrix, b: &[f64], x: &[f64]) -> f64 {
    0.5 * c.quad_form(x) - b.iter().zip(x).map(|(bi, xi)| bi * xi.ln()).sum::<f64>()
}

type NewtonFailure = (Vec<f64>, VanillaError);

fn newton(
    c: &SymMatrix,
    b: &[f64],
    mut x: Vec<f64>,
    opts: &VanillaOptions,
) -> Result<Vec<f64>, NewtonFailure> {
    let n = x.len();
    for iter in 0..opts.max_newton_iters {
        let residual = kkt_residual(c, b, &x);
        if residual <= opts.tol {
            return Ok(x);
        }
        let cx = c.mul_vec(&x);
        let grad: Vec<f64> = (0..n).map(|i| cx[i] - b[i] / x[i]).collect();
        let hess = SymMatrix::from_upper_fn(n, |i, j| {
            if i == j {
                c[(i, i)] + b[i] / (x[i] * x[i])
            } else {
                c[(i, j)]
            }
        });
        let step = match cholesky(&hess) {
            Ok(f) => f.solve(&grad.iter().map(|g| -g).collect::<Vec<_>>()),
            Err(e) => return Err((x, e.into())),
        };

        // Stay strictly inside the positive orthant.
        let mut alpha: f64 = 1.0;
        for i in 0..n {
            if step[i] < 0.0 {
                alpha = alpha.min(-0.99 * x[i] / step[i]);
            }
        }
        let f0 = objective(c, b, &x);
        let slope = dot(&grad, &step);
        let mut accepted = false;
        while alpha > 1e-14 {
            let trial: Vec<f64> = (0..n).map(|i| x[i] + alpha * step[i]).collect();
            let f1 = objective(c, b, &trial);
            // Near the optimum f stalls at rounding level while the residual
            // still improves; accept those steps too.
            if f1 <= f0 + 1e-4 * alpha * slope
                || (f1 - f0).abs() <= 1e-15 * f0.abs().max(1.0)
                    && kkt_residual(c, b, &trial) < residual
            {
                x = trial;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            return Err((
                x,
                VanillaError::NonConvergence {
                    iterations: iter + 1,
                    residual,
                },
            ));
        }
    }
    let residual = kkt_residual(c, b, &x);
    if residual <= opts.tol {
        Ok(x)
    } else {
        Err((
            x,
            VanillaError::NonConvergence {
                iterations: opts.max_newton_iters,
                residual,
            },
        ))
    }
}

/// Cyclic coordinate descent; each update solves `Cᵢᵢxᵢ² + qᵢxᵢ − bᵢ = 0`
/// with `qᵢ = Σ_{j≠i} Cᵢⱼxⱼ` for its positive root.
fn coordinate_descent(
    c: &SymMatrix,
    b: &[f64],
    mut x: Vec<f64>,
    opts: &VanillaOptions,
) -> Result<Vec<f64>, VanillaError> {
    let n = x.len();
    if x.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        x = (0..n).map(|i| (b[i] / c[(i, i)]).sqrt()).collect();
    }
    let mut cx = c.mul_vec(&x);
    for sweep in 0..opts.max_sweeps {
        for i in 0..n {
            let cii = c[(i, i)];
            let q = cx[i] - cii * x[i];
            let disc = (q * q + 4.0 * cii * b[i]).sqrt();
            let xi = if q >= 0.0 {
                2.0 * b[i] / (q + disc)
            } else {
                (disc - q) / (2.0 * cii)
            };
            let delta = xi - x[i];
            if delta != 0.0 {
                let row = c.as_matrix().row(i);
                for (k, cxk) in cx.iter_mut().enumerate() {
                    *cxk += row[k] * delta;
                }
                x[i] = xi;
            }
        }
        if sweep % 8 == 7 || sweep + 1 == opts.max_sweeps {
            cx = c.mul_vec(&x);
            if kkt_residual(c, b, &x) <= opts.tol {
                return Ok(x);
            }
        }
    }
    Err(VanillaError::NonConvergence {
        iterations: opts.max_sweeps,
        residual: kkt_residual(c, b, &x),
    })
}

/// Fractional risk contributions `xᵢ(Cx)ᵢ / xᵀCx`.
pub fn risk_contributions(c: &SymMatrix, x: &[f64]) -> Result<Vec<f64>, VanillaError> {
    if x.len() != c.dim() {
        return Err(LinalgError::DimensionMismatch {
            expected: c.dim(),
            found: x.len(),
        }
        .into());
    }
    let cx = c.mul_vec(x);
    let parts: Vec<f64> = x.iter().zip(&cx).map(|(a, b)| a * b).collect();
    let total: f64 = parts.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(VanillaError::DegeneratePortfolio { variance: total });
    }
    Ok(parts.iter().map(|p| p / total).collect())
}
