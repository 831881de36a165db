use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::BacktestError;
use crate::cone::SolverOptions;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    /// Equal weights, rebalanced weekly.
    #[serde(rename = "CRB")]
    Crb,
    /// Weights proportional to positive cumulative returns.
    #[serde(rename = "CRB_SMART", alias = "CRB.SMART")]
    CrbSmart,
    /// Risk-budgeted mean-variance allocation.
    #[serde(rename = "MRB")]
    Mrb,
    /// MRB, liquidating when the expected return is negative.
    #[serde(rename = "MRBA")]
    Mrba,
    /// MRBA levered to the ex-ante volatility of CRB.
    #[serde(rename = "MRBAL")]
    Mrbal,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Crb,
        Strategy::CrbSmart,
        Strategy::Mrb,
        Strategy::Mrba,
        Strategy::Mrbal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Crb => "CRB",
            Strategy::CrbSmart => "CRB_SMART",
            Strategy::Mrb => "MRB",
            Strategy::Mrba => "MRBA",
            Strategy::Mrbal => "MRBAL",
        }
    }

    pub fn uses_optimizer(self) -> bool {
        matches!(self, Strategy::Mrb | Strategy::Mrba | Strategy::Mrbal)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let norm = s.trim().to_ascii_uppercase().replace(['.', '-'], "_");
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == norm)
            .ok_or_else(|| format!("unknown strategy `{s}` (expected one of CRB, CRB_SMART, MRB, MRBA, MRBAL)"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BudgetRule {
    /// Budgets in panel asset order.
    Fixed(Vec<f64>),
    /// Half of the normalized positive cumulative returns.
    HalfNormCumRet,
}

/// Settings for a single strategy run.
#[derive(Clone, Debug, PartialEq)]
pub struct BacktestConfig {
    pub strategy: Strategy,
    pub budgets: BudgetRule,
    pub lambda: f64,
    pub mu: f64,
    pub leverage_cap: f64,
    /// Eigenvalue floor for covariance repair; `None` scales with the
    /// covariance.
    pub psd_eps: Option<f64>,
    /// Weekly returns observed before the first trade; at least 2.
    pub warmup: usize,
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,
    pub solver: SolverOptions,
}

impl BacktestConfig {
    pub fn new(strategy: Strategy, budgets: BudgetRule) -> Self {
        BacktestConfig {
            strategy,
            budgets,
            lambda: 1.0,
            mu: 0.0,
            leverage_cap: 1.5,
            psd_eps: None,
            warmup: 2,
            lower: None,
            upper: None,
            solver: SolverOptions::default(),
        }
    }

    pub fn validate(&self, n: usize) -> Result<(), BacktestError> {
        let bad = |m: String| Err(BacktestError::Config(m));
        if !(self.leverage_cap >= 1.0) || !self.leverage_cap.is_finite() {
            return bad(format!("leverage_cap {} must be at least 1", self.leverage_cap));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return bad(format!("lambda {} must be non-negative", self.lambda));
        }
        if !(self.mu >= 0.0) || !self.mu.is_finite() {
            return bad(format!("mu {} must be non-negative", self.mu));
        }
        if let Some(eps) = self.psd_eps {
            if !(eps >= 0.0) || !eps.is_finite() {
                return bad(format!("psd_eps {eps} must be non-negative"));
            }
        }
        if self.warmup < 2 {
            return bad(format!("warmup {} must be at least 2", self.warmup));
        }
        if let BudgetRule::Fixed(b) = &self.budgets {
            if b.len() != n {
                return bad(format!("{} budgets for {n} assets", b.len()));
            }
            if b.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                return bad("budgets must be non-negative".into());
            }
            let total: f64 = b.iter().sum();
            if total > 1.0 + 1e-12 {
                return bad(format!("budgets sum to {total}, more than 1"));
            }
        }
        for (name, v) in [("lower", &self.lower), ("upper", &self.upper)] {
            if let Some(v) = v {
                if v.len() != n {
                    return bad(format!("{} {name} bounds for {n} assets", v.len()));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return bad(format!("{name} bounds must be finite"));
                }
            }
        }
        Ok(())
    }
}

/// Per-asset values keyed by ticker or listed in panel order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AssetValues {
    ByTicker(BTreeMap<String, f64>),
    InOrder(Vec<f64>),
}

impl AssetValues {
    /// Values in `assets` order; tickers missing from a map get `default`.
    pub fn resolve(&self, assets: &[String], default: f64, what: &str) -> Result<Vec<f64>, BacktestError> {
        match self {
            AssetValues::InOrder(v) => {
                if v.len() != assets.len() {
                    return Err(BacktestError::Config(format!(
                        "{what}: {} values for {} assets",
                        v.len(),
                        assets.len()
                    )));
                }
                Ok(v.clone())
            }
            AssetValues::ByTicker(m) => {
                if let Some(k) = m.keys().find(|k| !assets.contains(k)) {
                    return Err(BacktestError::Config(format!("{what}: unknown ticker {k}")));
                }
                Ok(assets.iter().map(|a| m.get(a).copied().unwrap_or(default)).collect())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetsDoc {
    Fixed(AssetValues),
    HalfNormCumRet,
}

/// JSON configuration of a backtest invocation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "all_strategies")]
    pub strategies: Vec<Strategy>,
    #[serde(default = "half_norm")]
    pub budgets: BudgetsDoc,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default)]
    pub mu: f64,
    #[serde(default = "default_cap")]
    pub leverage_cap: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psd_eps: Option<f64>,
    #[serde(default = "default_warmup")]
    pub warmup: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<AssetValues>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<AssetValues>,
}

fn all_strategies() -> Vec<Strategy> {
    Strategy::ALL.to_vec()
}

fn half_norm() -> BudgetsDoc {
    BudgetsDoc::HalfNormCumRet
}

fn one() -> f64 {
    1.0
}

fn default_cap() -> f64 {
    1.5
}

fn default_warmup() -> usize {
    2
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            strategies: all_strategies(),
            budgets: half_norm(),
            lambda: 1.0,
            mu: 0.0,
            leverage_cap: default_cap(),
            psd_eps: None,
            warmup: default_warmup(),
            lower: None,
            upper: None,
        }
    }
}

impl RunConfig {
    /// One validated config per requested strategy.
    pub fn resolve(
        &self,
        assets: &[String],
        solver: &SolverOptions,
    ) -> Result<Vec<BacktestConfig>, BacktestError> {
        let budgets = match &self.budgets {
            BudgetsDoc::Fixed(v) => BudgetRule::Fixed(v.resolve(assets, 0.0, "budgets")?),
            BudgetsDoc::HalfNormCumRet => BudgetRule::HalfNormCumRet,
        };
        let lower = self.lower.as_ref().map(|v| v.resolve(assets, 0.0, "lower")).transpose()?;
        let upper = self.upper.as_ref().map(|v| v.resolve(assets, 1.0, "upper")).transpose()?;
        self.strategies
            .iter()
            .map(|&strategy| {
                let cfg = BacktestConfig {
                    strategy,
                    budgets: budgets.clone(),
                    lambda: self.lambda,
                    mu: self.mu,
                    leverage_cap: self.leverage_cap,
                    psd_eps: self.psd_eps,
                    warmup: self.warmup,
                    lower: lower.clone(),
                    upper: upper.clone(),
                    solver: solver.clone(),
                };
                cfg.validate(assets.len())?;
                Ok(cfg)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{path}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

pub fn parse_run_config(json: &str) -> Result<RunConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(json);
    serde_path_to_error::deserialize(de).map_err(|e| ConfigError {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}
