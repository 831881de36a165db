//! Risk-budgeting portfolio construction.
//!
//! - [`linalg`]: dense symmetric matrices, Cholesky, Jacobi eigensolver,
//!   nearest positive semidefinite repair and sample covariance.
//! - [`cone`]: second-order cone programs and an interior-point solver.
//! - [`vanilla`]: classical risk budgeting with budgets summing to one.
//! - [`allocation`]: mean-variance allocation with minimum risk budgets,
//!   bounds and turnover cost, built on [`cone`].
//! - [`data`]: daily price CSV ingestion and weekly median panels.
//! - [`backtest`]: weekly-rebalance simulation of the strategies.
//! - [`analytics`]: drawdowns and summary statistics over ledgers.

pub mod allocation;
pub mod analytics;
pub mod backtest;
pub mod cone;
pub mod data;
pub mod linalg;
pub mod vanilla;
