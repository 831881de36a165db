//! Dense symmetric linear algebra used throughout the crate.
//!
//! Everything here works on small dense matrices (a few hundred rows at
//! most) and is written for clarity over blocking or SIMD.

mod cholesky;
mod covariance;
mod eigen;
mod lu;
mod matrix;
mod psd;
mod sym;

pub use cholesky::{cholesky, CholFactor};
pub use covariance::covariance;
pub use eigen::{sym_eigen, JacobiOptions, SymEigen};
pub use lu::LuFactor;
pub use matrix::{axpy, dot, norm2, norm_inf, Matrix};
pub use psd::{default_psd_eps, nearest_psd};
pub use sym::SymMatrix;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not positive definite (non-positive pivot at index {pivot})")]
    NotPositiveDefinite { pivot: usize },
    #[error("matrix is not symmetric: entry ({row}, {col}) differs from its transpose")]
    NotSymmetric { row: usize, col: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix must have dimension at least 1")]
    Empty,
    #[error("insufficient history: {observations} observation(s), need at least 2")]
    InsufficientHistory { observations: usize },
    #[error("non-finite value encountered")]
    NonFinite,
    #[error("matrix is singular to working precision")]
    Singular,
}
