//! Second-order cone programs in slack standard form and an interior-point
//! solver for them.
//!
//! A [`ConeProgram`] reads
//!
//! ```text
//! minimize    cᵀx
//! subject to  A x + s = b,   s ∈ K
//! ```
//!
//! where `x` is free and `K` is the product of the [`Cone`] blocks listed in
//! row order. A `Zero` block pins its rows to equalities, a `NonNeg` block
//! turns them into `≤` inequalities and a `SecondOrder(d)` block requires
//! `s₀ ≥ ‖(s₁, …, s_{d−1})‖`.

mod dump;
mod ipm;
mod soc;

pub use dump::{read_program, write_program, DumpError};
pub use ipm::{solve, solve_from};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cone {
    Zero(usize),
    NonNeg(usize),
    SecondOrder(usize),
}

impl Cone {
    pub fn dim(&self) -> usize {
        match *self {
            Cone::Zero(d) | Cone::NonNeg(d) | Cone::SecondOrder(d) => d,
        }
    }
}

/// Sparse matrix in triplet form; duplicate entries are summed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        if value != 0.0 {
            self.entries.push((row, col, value));
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        for &(i, j, v) in &self.entries {
            out[i] += v * x[j];
        }
        out
    }

    pub fn tr_mul_vec(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for &(i, j, v) in &self.entries {
            out[j] += v * y[i];
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConeProgram {
    pub c: Vec<f64>,
    pub a: SparseMatrix,
    pub b: Vec<f64>,
    pub cones: Vec<Cone>,
}

/// A structural problem with a [`ConeProgram`].
#[derive(Clone, Debug, PartialEq)]
pub enum Defect {
    SocTooSmall { cone: usize, dim: usize },
    EmptyCone { cone: usize },
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    EntryOutOfRange { entry: usize, row: usize, col: usize },
    NonFinite { what: &'static str, index: usize },
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defect::SocTooSmall { cone, dim } => {
                write!(f, "cone {cone}: second-order cone dimension {dim} < 2")
            }
            Defect::EmptyCone { cone } => write!(f, "cone {cone}: dimension 0"),
            Defect::DimensionMismatch {
                what,
                expected,
                found,
            } => write!(f, "dimension mismatch in {what}: expected {expected}, found {found}"),
            Defect::EntryOutOfRange { entry, row, col } => {
                write!(f, "A entry {entry} at ({row}, {col}) lies outside the matrix")
            }
            Defect::NonFinite { what, index } => write!(f, "non-finite value in {what}[{index}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("malformed cone program: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ValidationError(pub Vec<Defect>);

impl ConeProgram {
    /// Lists every structural defect; empty iff the program is well formed.
    pub fn validate(&self) -> Vec<Defect> {
        let mut defects = Vec::new();
        for (k, cone) in self.cones.iter().enumerate() {
            match *cone {
                Cone::SecondOrder(d) if d < 2 => {
                    defects.push(Defect::SocTooSmall { cone: k, dim: d })
                }
                Cone::Zero(0) | Cone::NonNeg(0) => defects.push(Defect::EmptyCone { cone: k }),
                _ => {}
            }
        }
        if self.a.cols != self.c.len() {
            defects.push(Defect::DimensionMismatch {
                what: "A columns vs c",
                expected: self.c.len(),
                found: self.a.cols,
            });
        }
        if self.a.rows != self.b.len() {
            defects.push(Defect::DimensionMismatch {
                what: "A rows vs b",
                expected: self.b.len(),
                found: self.a.rows,
            });
        }
        let cone_rows: usize = self.cones.iter().map(Cone::dim).sum();
        if cone_rows != self.b.len() {
            defects.push(Defect::DimensionMismatch {
                what: "cone dimensions vs b",
                expected: self.b.len(),
                found: cone_rows,
            });
        }
        for (e, &(i, j, v)) in self.a.entries.iter().enumerate() {
            if i >= self.a.rows || j >= self.a.cols {
                defects.push(Defect::EntryOutOfRange {
                    entry: e,
                    row: i,
                    col: j,
                });
            }
            if !v.is_finite() {
                defects.push(Defect::NonFinite {
                    what: "A",
                    index: e,
                });
            }
        }
        for (what, v) in [("c", &self.c), ("b", &self.b)] {
            if let Some(i) = v.iter().position(|x| !x.is_finite()) {
                defects.push(Defect::NonFinite { what, index: i });
            }
        }
        defects
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub fn num_rows(&self) -> usize {
        self.b.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    MaxIters,
    NumericalFailure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol_feas: f64,
    pub tol_gap: f64,
    pub tol_infeas: f64,
    /// Allowed cone-membership violation of the returned slack.
    pub tol_cone: f64,
    pub max_iters: usize,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_backoff: f64,
    pub static_reg: f64,
    pub refine_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol_feas: 1e-8,
            tol_gap: 1e-8,
            tol_infeas: 1e-8,
            tol_cone: 1e-8,
            max_iters: 200,
            step_backoff: 0.99,
            static_reg: 1e-10,
            refine_steps: 3,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `‖Ax + s − b‖ / (1 + ‖b‖)`
    pub primal: f64,
    /// `‖Aᵀy + c‖ / (1 + ‖c‖)`
    pub dual: f64,
    /// `|cᵀx − dual objective| / max(1, min(|primal obj|, |dual obj|))`
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeSolution {
    pub status: SolveStatus,
    /// Primal variables `x`.
    pub primal: Vec<f64>,
    /// Slack `s = b − Ax`, one entry per row.
    pub slack: Vec<f64>,
    /// Dual variables, one per row of `A`.
    pub dual: Vec<f64>,
    pub objective: f64,
    pub dual_objective: f64,
    pub iterations: usize,
    pub residuals: Residuals,
}


#[cfg(test)]
mod solve_tests {
    use super::*;

    #[test]
    fn forced_equality() {
        // min x  s.t.  x = 5,  x ≥ 0
        let mut a = SparseMatrix::new(2, 1);
        a.push(0, 0, 1.0);
        a.push(1, 0, -1.0);
        let p = ConeProgram {
            c: vec![1.0],
            a,
            b: vec![5.0, 0.0],
            cones: vec![Cone::Zero(1), Cone::NonNeg(1)],
        };
        let sol = solve(&p, &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective - 5.0).abs() < 1e-8, "{sol:?}");
    }

    #[test]
    fn euclidean_norm() {
        // min t  s.t.  (t, 3, 4) ∈ SOC  → s = (t, 3, 4) = b − A[t]
        let mut a = SparseMatrix::new(3, 1);
        a.push(0, 0, -1.0);
        let p = ConeProgram {
            c: vec![1.0],
            a,
            b: vec![0.0, 3.0, 4.0],
            cones: vec![Cone::SecondOrder(3)],
        };
        let sol = solve(&p, &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective - 5.0).abs() < 1e-8, "{sol:?}");
    }
}
