//! Mean-variance allocation with minimum risk budgets, encoded as a
//! second-order cone program.
//!
//! ```text
//! minimize    −rᵀx + λ‖Rx‖ + μ‖x − x₀‖₁
//! subject to  xᵢ(Cx)ᵢ ≥ bᵢ xᵀCx   for every asset i
//!             1ᵀx = 1,  l ≤ x ≤ u
//! ```
//!
//! with `C = RᵀR`. Each budget constraint is a rotated cone and is emitted as
//! `‖(xᵢ − (Cx)ᵢ, 2√bᵢ Rx)‖ ≤ xᵢ + (Cx)ᵢ`. The budget rows are built from
//! `C / κ` with `κ` the mean variance; the constraint is homogeneous in `C`
//! so this only improves conditioning. The objective is divided by `√κ` for
//! the same reason: volatilities and weekly returns are far below one, which
//! would make the solver's gap test effectively absolute.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cone::{self, Cone, ConeProgram, Residuals, SolveStatus, SolverOptions, SparseMatrix};
use crate::linalg::{cholesky, dot, LinalgError, SymMatrix};
use crate::vanilla::{risk_contributions, PortfolioWeights};

/// Gap below which a budget constraint is reported as binding.
pub const BINDING_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BudgetOrientation {
    /// `contribᵢ ≥ bᵢ`, the only orientation with a cone encoding.
    #[default]
    Min,
    Max,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AllocationProblem {
    pub assets: Vec<String>,
    pub cov: SymMatrix,
    pub forecasts: Vec<f64>,
    pub lambda: f64,
    pub mu: f64,
    pub prev_weights: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub budgets: Vec<f64>,
    pub orientation: BudgetOrientation,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AllocationError {
    #[error("invalid allocation problem: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("covariance: {0}")]
    Covariance(LinalgError),
    #[error("malformed cone program: {}", .0.join("; "))]
    Program(Vec<String>),
    #[error("infeasible: {0}")]
    Infeasible(InfeasibilityReport),
    #[error("solver stopped with status {status:?} after {iterations} iterations")]
    Solver { status: SolveStatus, iterations: usize },
}

/// Best-effort explanation of an infeasible problem.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InfeasibilityReport {
    pub lower_sum: Option<f64>,
    pub upper_sum: Option<f64>,
    /// `(asset, budget, contribution reachable at its upper bound)`.
    pub budget_conflicts: Vec<(String, f64, f64)>,
}

impl InfeasibilityReport {
    pub fn is_empty(&self) -> bool {
        self.lower_sum.is_none() && self.upper_sum.is_none() && self.budget_conflicts.is_empty()
    }
}

impl fmt::Display for InfeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(s) = self.lower_sum {
            parts.push(format!("lower bounds sum to {s} > 1"));
        }
        if let Some(s) = self.upper_sum {
            parts.push(format!("upper bounds sum to {s} < 1"));
        }
        for (name, b, reach) in &self.budget_conflicts {
            parts.push(format!(
                "{name}: budget {b} above the {reach:.4} contribution reachable at its upper bound"
            ));
        }
        if parts.is_empty() {
            parts.push("solver certificate, no simple cause found".into());
        }
        f.write_str(&parts.join("; "))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverSummary {
    pub status: SolveStatus,
    pub iterations: usize,
    pub objective: f64,
    pub residuals: Residuals,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AllocationResult {
    pub weights: PortfolioWeights,
    /// `−rᵀx + λ√(xᵀCx) + μ‖x − x₀‖₁` at the returned weights.
    pub objective: f64,
    pub risk_contribs: Vec<f64>,
    pub solver_stats: SolverSummary,
    pub binding_budgets: Vec<bool>,
}

/// Column layout of the program emitted by [`build_program`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProgramLayout {
    pub n: usize,
    /// Epigraph variable of `‖Rx‖`, present when `λ > 0`.
    pub t: Option<usize>,
    /// First columns of `d⁺` and `d⁻`, present when `μ > 0`.
    pub turnover: Option<(usize, usize)>,
    /// Program objective times this factor is the objective in return units.
    pub objective_scale: f64,
}

impl AllocationProblem {
    /// Problem with default settings: no forecasts, `λ = 1`, `μ = 0`, bounds
    /// `[0, 1]` and zero previous weights.
    pub fn new(cov: SymMatrix, budgets: Vec<f64>) -> Self {
        let n = cov.dim();
        AllocationProblem {
            assets: default_names(n),
            cov,
            forecasts: vec![0.0; n],
            lambda: 1.0,
            mu: 0.0,
            prev_weights: vec![0.0; n],
            lower: vec![0.0; n],
            upper: vec![1.0; n],
            budgets,
            orientation: BudgetOrientation::Min,
        }
    }

    pub fn n(&self) -> usize {
        self.cov.dim()
    }

    pub fn validate(&self) -> Result<(), AllocationError> {
        let n = self.n();
        let mut problems = Vec::new();
        if n == 0 {
            problems.push("cov: no assets".to_string());
        }
        if !self.cov.is_finite() {
            problems.push("cov: non-finite entry".to_string());
        }
        let vectors: [(&str, &[f64]); 5] = [
            ("r", &self.forecasts),
            ("x0", &self.prev_weights),
            ("l", &self.lower),
            ("u", &self.upper),
            ("b", &self.budgets),
        ];
        for (name, v) in vectors {
            if v.len() != n {
                problems.push(format!("{name}: expected {n} entries, found {}", v.len()));
            } else if let Some(i) = v.iter().position(|x| !x.is_finite()) {
                problems.push(format!("{name}[{i}]: not a finite number"));
            }
        }
        if self.assets.len() != n {
            problems.push(format!("assets: expected {n} names, found {}", self.assets.len()));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            problems.push(format!("lambda: {} is not a non-negative number", self.lambda));
        }
        if !(self.mu >= 0.0) || !self.mu.is_finite() {
            problems.push(format!("mu: {} is not a non-negative number", self.mu));
        }
        if self.orientation == BudgetOrientation::Max {
            problems.push(
                "budget_orientation: max-risk budgets have no cone encoding; use min".to_string(),
            );
        }
        if problems.is_empty() {
            for i in 0..n {
                if self.lower[i] < 0.0 {
                    problems.push(format!("l[{i}]: negative lower bound {}", self.lower[i]));
                }
                if self.lower[i] > self.upper[i] {
                    problems.push(format!(
                        "l[{i}] = {} exceeds u[{i}] = {}",
                        self.lower[i], self.upper[i]
                    ));
                }
                if self.budgets[i] < 0.0 {
                    problems.push(format!("b[{i}]: negative budget {}", self.budgets[i]));
                }
            }
            let total: f64 = self.budgets.iter().sum();
            if total > 1.0 + 1e-12 {
                problems.push(format!("b: budgets sum to {total}, more than 1"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(AllocationError::Invalid(problems))
        }
    }

    /// Cheap infeasibility checks on bounds and budgets.
    pub fn diagnose(&self) -> InfeasibilityReport {
        let mut report = InfeasibilityReport::default();
        let lsum: f64 = self.lower.iter().sum();
        let usum: f64 = self.upper.iter().sum();
        if lsum > 1.0 + 1e-12 {
            report.lower_sum = Some(lsum);
        }
        if usum < 1.0 - 1e-12 {
            report.upper_sum = Some(usum);
        }
        let n = self.n();
        for i in 0..n {
            if self.budgets[i] <= 0.0 || n < 2 {
                continue;
            }
            // Asset i at its cap, the remainder spread evenly over the rest.
            let xi = self.upper[i].min(1.0);
            let rest = (1.0 - xi) / (n - 1) as f64;
            let x: Vec<f64> = (0..n).map(|k| if k == i { xi } else { rest }).collect();
            if let Ok(rc) = risk_contributions(&self.cov, &x) {
                if rc[i] < self.budgets[i] {
                    report
                        .budget_conflicts
                        .push((self.assets[i].clone(), self.budgets[i], rc[i]));
                }
            }
        }
        report
    }
}

pub fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("asset{i}")).collect()
}

/// Standard-form encoding of the allocation problem.
pub fn build_program(p: &AllocationProblem) -> Result<(ConeProgram, ProgramLayout), AllocationError> {
    p.validate()?;
    let n = p.n();
    let chol = cholesky(&p.cov).map_err(AllocationError::Covariance)?;
    let r = chol.upper();

    let kappa = p.cov.diag().iter().sum::<f64>() / n as f64;
    let cs = p.cov.scale(1.0 / kappa);
    let rs = r.scale(1.0 / kappa.sqrt());

    let mut cols = n;
    let t = (p.lambda > 0.0).then(|| {
        cols += 1;
        cols - 1
    });
    let turnover = (p.mu > 0.0).then(|| {
        cols += 2 * n;
        (cols - 2 * n, cols - n)
    });

    let objective_scale = kappa.sqrt();
    let mut c = vec![0.0; cols];
    for i in 0..n {
        c[i] = -p.forecasts[i] / objective_scale;
    }
    if let Some(t) = t {
        c[t] = p.lambda / objective_scale;
    }
    if let Some((dp, dm)) = turnover {
        for i in 0..n {
            c[dp + i] = p.mu / objective_scale;
            c[dm + i] = p.mu / objective_scale;
        }
    }

    let mut entries = Vec::new();
    let mut b = Vec::new();
    let mut cones = Vec::new();
    let mut row = 0usize;

    // Budget: 1ᵀx = 1, plus the turnover split x − d⁺ + d⁻ = x₀.
    let mut eq = 1;
    for i in 0..n {
        entries.push((row, i, 1.0));
    }
    b.push(1.0);
    row += 1;
    if let Some((dp, dm)) = turnover {
        for i in 0..n {
            entries.push((row, i, 1.0));
            entries.push((row, dp + i, -1.0));
            entries.push((row, dm + i, 1.0));
            b.push(p.prev_weights[i]);
            row += 1;
        }
        eq += n;
    }
    cones.push(Cone::Zero(eq));

    // Bounds: x ≥ l, x ≤ u (caps at or above 1 are implied by the simplex),
    // and d± ≥ 0.
    let mut ineq = 0;
    for i in 0..n {
        entries.push((row, i, -1.0));
        b.push(-p.lower[i]);
        row += 1;
        ineq += 1;
    }
    for i in 0..n {
        if p.upper[i] < 1.0 {
            entries.push((row, i, 1.0));
            b.push(p.upper[i]);
            row += 1;
            ineq += 1;
        }
    }
    if let Some((dp, _)) = turnover {
        for k in 0..2 * n {
            entries.push((row, dp + k, -1.0));
            b.push(0.0);
            row += 1;
            ineq += 1;
        }
    }
    cones.push(Cone::NonNeg(ineq));

    // Epigraph t ≥ ‖Rx‖.
    if let Some(t) = t {
        entries.push((row, t, -1.0));
        b.push(0.0);
        row += 1;
        for k in 0..n {
            for j in k..n {
                let v = r[(k, j)];
                if v != 0.0 {
                    entries.push((row, j, -v));
                }
            }
            b.push(0.0);
            row += 1;
        }
        cones.push(Cone::SecondOrder(n + 1));
    }

    // Per-asset budget cones.
    let csm = cs.as_matrix();
    for i in 0..n {
        let crow = csm.row(i);
        for j in 0..n {
            let plus = crow[j] + if i == j { 1.0 } else { 0.0 };
            let minus = if i == j { 1.0 } else { 0.0 } - crow[j];
            if plus != 0.0 {
                entries.push((row, j, -plus));
            }
            if minus != 0.0 {
                entries.push((row + 1, j, -minus));
            }
        }
        b.push(0.0);
        b.push(0.0);
        row += 2;
        let k = 2.0 * p.budgets[i].sqrt();
        for q in 0..n {
            if k != 0.0 {
                for j in q..n {
                    let v = rs[(q, j)];
                    if v != 0.0 {
                        entries.push((row, j, -k * v));
                    }
                }
            }
            b.push(0.0);
            row += 1;
        }
        cones.push(Cone::SecondOrder(n + 2));
    }

    let program = ConeProgram {
        c,
        a: SparseMatrix {
            rows: row,
            cols,
            entries,
        },
        b,
        cones,
    };
    let defects = program.validate();
    if !defects.is_empty() {
        return Err(AllocationError::Program(
            defects.iter().map(|d| d.to_string()).collect(),
        ));
    }
    Ok((
        program,
        ProgramLayout {
            n,
            t,
            turnover,
            objective_scale,
        },
    ))
}

pub fn solve_allocation(
    p: &AllocationProblem,
    opts: &SolverOptions,
) -> Result<AllocationResult, AllocationError> {
    let report = {
        p.validate()?;
        p.diagnose()
    };
    if report.lower_sum.is_some() || report.upper_sum.is_some() {
        return Err(AllocationError::Infeasible(report));
    }
    let (program, layout) = build_program(p)?;
    let sol = cone::solve(&program, opts)
        .map_err(|e| AllocationError::Program(e.0.iter().map(|d| d.to_string()).collect()))?;
    let summary = SolverSummary {
        status: sol.status,
        iterations: sol.iterations,
        objective: sol.objective * layout.objective_scale,
        residuals: sol.residuals,
    };
    match sol.status {
        SolveStatus::Optimal => {}
        SolveStatus::Infeasible => return Err(AllocationError::Infeasible(report)),
        status => {
            return Err(AllocationError::Solver {
                status,
                iterations: sol.iterations,
            })
        }
    }

    let n = p.n();
    let mut x: Vec<f64> = (0..n)
        .map(|i| sol.primal[i].clamp(p.lower[i], p.upper[i]))
        .collect();
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= total);

    let risk_contribs = risk_contributions(&p.cov, &x).map_err(|_| AllocationError::Solver {
        status: SolveStatus::NumericalFailure,
        iterations: sol.iterations,
    })?;
    let binding_budgets = risk_contribs
        .iter()
        .zip(&p.budgets)
        .map(|(rc, b)| (rc - b).abs() <= BINDING_TOL)
        .collect();
    let weights = PortfolioWeights::new(x);
    Ok(AllocationResult {
        objective: objective_value(p, &weights),
        weights,
        risk_contribs,
        solver_stats: summary,
        binding_budgets,
    })
}

/// `−rᵀx + λ√(xᵀCx) + μ‖x − x₀‖₁`.
pub fn objective_value(p: &AllocationProblem, w: &PortfolioWeights) -> f64 {
    let (ret, sd) = expected_stats(p, w);
    let turnover: f64 = w
        .as_slice()
        .iter()
        .zip(&p.prev_weights)
        .map(|(x, x0)| (x - x0).abs())
        .sum();
    -ret + p.lambda * sd + p.mu * turnover
}

/// Ex-ante `(rᵀw, √(wᵀCw))`.
pub fn expected_stats(p: &AllocationProblem, w: &PortfolioWeights) -> (f64, f64) {
    let ret = dot(&p.forecasts, w.as_slice());
    let var = p.cov.quad_form(w.as_slice());
    (ret, var.max(0.0).sqrt())
}

/// Long-only minimum-variance portfolio.
pub fn min_variance(
    cov: &SymMatrix,
    opts: &SolverOptions,
) -> Result<PortfolioWeights, AllocationError> {
    // The volatility objective is flat at the optimum, so weight error scales
    // like the square root of the gap; solve tighter than the caller asked.
    // If that precision is out of reach, settle for the requested one.
    let mut tight = opts.clone();
    tight.tol_gap = opts.tol_gap.min(1e-11);
    tight.tol_feas = opts.tol_feas.min(1e-11);
    let p = AllocationProblem::new(cov.clone(), vec![0.0; cov.dim()]);
    match solve_allocation(&p, &tight) {
        Err(AllocationError::Solver { .. }) => solve_allocation(&p, opts).map(|r| r.weights),
        r => r.map(|r| r.weights),
    }
}

/// JSON form of an [`AllocationProblem`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assets: Option<Vec<String>>,
    /// Row-major covariance.
    pub cov: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<f64>>,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default)]
    pub mu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
    pub b: Vec<f64>,
    #[serde(default)]
    pub budget_orientation: BudgetOrientation,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Error)]
pub enum ProblemParseError {
    #[error("{path}: {message}")]
    Json { path: String, message: String },
    #[error(transparent)]
    Invalid(#[from] AllocationError),
}

impl ProblemDocument {
    pub fn into_problem(self) -> Result<AllocationProblem, AllocationError> {
        let n = self.cov.len();
        let mut problems = Vec::new();
        for (i, row) in self.cov.iter().enumerate() {
            if row.len() != n {
                problems.push(format!("cov[{i}]: expected {n} entries, found {}", row.len()));
            }
        }
        if !problems.is_empty() {
            return Err(AllocationError::Invalid(problems));
        }
        let scale = self
            .cov
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            for j in 0..i {
                let (a, b) = (self.cov[i][j], self.cov[j][i]);
                if (a - b).abs() > 1e-12 * scale {
                    problems.push(format!("cov[{i}][{j}] = {a} differs from cov[{j}][{i}] = {b}"));
                }
            }
        }
        if !problems.is_empty() {
            return Err(AllocationError::Invalid(problems));
        }
        let cov = SymMatrix::from_upper_fn(n, |i, j| 0.5 * (self.cov[i][j] + self.cov[j][i]));
        let p = AllocationProblem {
            assets: self.assets.unwrap_or_else(|| default_names(n)),
            cov,
            forecasts: self.r.unwrap_or_else(|| vec![0.0; n]),
            lambda: self.lambda,
            mu: self.mu,
            prev_weights: self.x0.unwrap_or_else(|| vec![0.0; n]),
            lower: self.l.unwrap_or_else(|| vec![0.0; n]),
            upper: self.u.unwrap_or_else(|| vec![1.0; n]),
            budgets: self.b,
            orientation: self.budget_orientation,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn from_problem(p: &AllocationProblem) -> Self {
        ProblemDocument {
            assets: Some(p.assets.clone()),
            cov: p.cov.as_matrix().to_rows(),
            r: Some(p.forecasts.clone()),
            lambda: p.lambda,
            mu: p.mu,
            x0: Some(p.prev_weights.clone()),
            l: Some(p.lower.clone()),
            u: Some(p.upper.clone()),
            b: p.budgets.clone(),
            budget_orientation: p.orientation,
        }
    }
}

/// Parses and validates a JSON problem document; errors name the offending
/// field.
pub fn parse_problem(json: &str) -> Result<AllocationProblem, ProblemParseError> {
    let de = &mut serde_json::Deserializer::from_str(json);
    let doc: ProblemDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        ProblemParseError::Json {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        }
    })?;
    Ok(doc.into_problem()?)
}

pub fn problem_to_json(p: &AllocationProblem) -> String {
    serde_json::to_string_pretty(&ProblemDocument::from_problem(p))
        .expect("problem documents always serialize")
}
