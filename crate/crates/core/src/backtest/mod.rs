//! Weekly-rebalance simulation of the risk-budgeting strategies and their
//! constant-rebalance benchmarks.
//!
//! Week `t` is traded at its median price using only information available
//! at the end of week `t−1`: the covariance of the weekly returns observed so
//! far, last week's return as the forecast and the cumulative return since
//! the first week. Holdings drift with returns between rebalances and
//! turnover is measured against the drifted holdings.

mod config;
mod engine;
mod ledger;

pub use config::{
    parse_run_config, AssetValues, BacktestConfig, BudgetRule, BudgetsDoc, ConfigError, RunConfig,
    Strategy,
};
pub use engine::{
    benchmark_crb_smart, budget_rule_half_norm, run, strategy_weights, Decision, DecisionInputs,
};
pub use ledger::{read_ledger_csv, write_ledger_csv, BacktestLedger, LedgerRow};

use chrono::NaiveDate;
use thiserror::Error;

/// Starting portfolio value, held in cash before the first trade.
pub const INITIAL_VALUE: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BacktestError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("panel has {weeks} weeks; at least {needed} are needed")]
    InsufficientHistory { weeks: usize, needed: usize },
    #[error("{date}: portfolio value {value} is not positive")]
    NonPositiveValue { date: NaiveDate, value: f64 },
}
