use log::{debug, warn};

use super::{BacktestConfig, BacktestError, BacktestLedger, BudgetRule, LedgerRow, Strategy, INITIAL_VALUE};
use crate::allocation::{expected_stats, solve_allocation, AllocationProblem};
use crate::data::{returns, WeeklyPanel};
use crate::linalg::{covariance, default_psd_eps, nearest_psd, SymMatrix};
use crate::vanilla::{PortfolioWeights, RiskBudgetSpec};

/// Smallest eigenvalue floor used when repairing a covariance, so that a
/// window of flat prices still yields a positive definite matrix.
const MIN_PSD_EPS: f64 = 1e-14;

/// Point-in-time inputs of one rebalancing decision.
#[derive(Clone, Debug)]
pub struct DecisionInputs<'a> {
    pub assets: &'a [String],
    /// Weekly returns strictly before the trading week, oldest first.
    pub past_returns: &'a [Vec<f64>],
    /// Return of the week before the trading week.
    pub forecast: &'a [f64],
    /// Cumulative return from the first week to the week before trading.
    pub cum_returns: &'a [f64],
    /// Holdings after drifting with the trading week's returns.
    pub drifted: &'a [f64],
    pub prev_leverage: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decision {
    /// Exposure per asset as a fraction of portfolio value.
    pub weights: Vec<f64>,
    pub leverage: f64,
    pub abstained: bool,
    pub note: String,
}

impl Decision {
    fn hold(weights: Vec<f64>) -> Self {
        Decision {
            weights,
            leverage: 1.0,
            abstained: false,
            note: String::new(),
        }
    }

    fn abstain(n: usize, note: String) -> Self {
        Decision {
            weights: vec![0.0; n],
            leverage: 0.0,
            abstained: true,
            note,
        }
    }
}

fn positive_parts(cum: &[f64]) -> Option<Vec<f64>> {
    let pos: Vec<f64> = cum.iter().map(|c| c.max(0.0)).collect();
    let total: f64 = pos.iter().sum();
    (total > 0.0).then(|| pos.iter().map(|p| p / total).collect())
}

/// `bᵢ = ½ max(cumᵢ, 0) / Σⱼ max(cumⱼ, 0)`, or `½/n` each when no cumulative
/// return is positive.
pub fn budget_rule_half_norm(cum_returns: &[f64]) -> RiskBudgetSpec {
    let n = cum_returns.len();
    let b = match positive_parts(cum_returns) {
        Some(w) => w.iter().map(|v| 0.5 * v).collect(),
        None => vec![0.5 / n as f64; n],
    };
    RiskBudgetSpec::new(b).expect("half-normalized budgets are valid")
}

/// Weights proportional to positive cumulative returns, uniform when none is
/// positive.
pub fn benchmark_crb_smart(cum_returns: &[f64]) -> PortfolioWeights {
    let n = cum_returns.len();
    PortfolioWeights::new(positive_parts(cum_returns).unwrap_or_else(|| vec![1.0 / n as f64; n]))
}

fn psd_covariance(cfg: &BacktestConfig, past: &[Vec<f64>]) -> Result<SymMatrix, String> {
    let sample = covariance(past).map_err(|e| format!("covariance: {e}"))?;
    let eps = cfg
        .psd_eps
        .unwrap_or_else(|| default_psd_eps(sample.as_matrix()).max(MIN_PSD_EPS));
    nearest_psd(sample.as_matrix(), eps).map_err(|e| format!("covariance repair: {e}"))
}

/// Target exposures for one week.
pub fn strategy_weights(cfg: &BacktestConfig, inp: &DecisionInputs<'_>) -> Decision {
    let n = inp.assets.len();
    match cfg.strategy {
        Strategy::Crb => Decision::hold(vec![1.0 / n as f64; n]),
        Strategy::CrbSmart => Decision::hold(benchmark_crb_smart(inp.cum_returns).into_vec()),
        Strategy::Mrb | Strategy::Mrba | Strategy::Mrbal => optimized(cfg, inp),
    }
}

fn optimized(cfg: &BacktestConfig, inp: &DecisionInputs<'_>) -> Decision {
    let n = inp.assets.len();
    let cov = match psd_covariance(cfg, inp.past_returns) {
        Ok(c) => c,
        Err(note) => return Decision::abstain(n, note),
    };
    let budgets = match &cfg.budgets {
        BudgetRule::Fixed(b) => b.clone(),
        BudgetRule::HalfNormCumRet => budget_rule_half_norm(inp.cum_returns).into_vec(),
    };
    // MRBAL solves for the unlevered portfolio, so its turnover anchor is the
    // drifted book with the previous leverage taken out.
    let prev_weights = if cfg.strategy == Strategy::Mrbal && inp.prev_leverage > 0.0 {
        inp.drifted.iter().map(|h| h / inp.prev_leverage).collect()
    } else {
        inp.drifted.to_vec()
    };
    let problem = AllocationProblem {
        assets: inp.assets.to_vec(),
        cov,
        forecasts: inp.forecast.to_vec(),
        lambda: cfg.lambda,
        mu: cfg.mu,
        prev_weights,
        lower: cfg.lower.clone().unwrap_or_else(|| vec![0.0; n]),
        upper: cfg.upper.clone().unwrap_or_else(|| vec![1.0; n]),
        budgets,
        orientation: Default::default(),
    };
    let result = match solve_allocation(&problem, &cfg.solver) {
        Ok(r) => r,
        Err(e) => {
            warn!("{}: allocation failed, abstaining: {e}", cfg.strategy);
            return Decision::abstain(n, e.to_string());
        }
    };
    let (exp_ret, sd_mrb) = expected_stats(&problem, &result.weights);
    if cfg.strategy != Strategy::Mrb && exp_ret < 0.0 {
        return Decision::abstain(n, format!("expected return {exp_ret:.3e} below zero"));
    }
    let mut decision = Decision::hold(result.weights.into_vec());
    if cfg.strategy == Strategy::Mrbal {
        let (_, sd_crb) = expected_stats(&problem, &PortfolioWeights::equal(n));
        let lev = if sd_mrb > 0.0 {
            (sd_crb / sd_mrb).min(cfg.leverage_cap)
        } else {
            cfg.leverage_cap
        };
        decision.weights.iter_mut().for_each(|w| *w *= lev);
        decision.leverage = lev;
    }
    decision
}

/// Simulates one strategy over the panel.
pub fn run(panel: &WeeklyPanel, cfg: &BacktestConfig) -> Result<BacktestLedger, BacktestError> {
    let n = panel.n_assets();
    cfg.validate(n)?;
    // Prices p₀..p_w give w returns; the first trade happens in week w + 1.
    let first = cfg.warmup + 1;
    if panel.len() <= first {
        return Err(BacktestError::InsufficientHistory {
            weeks: panel.len(),
            needed: first + 1,
        });
    }
    let rets = returns(panel);
    let p0 = panel.row(0);

    let mut rows = Vec::with_capacity(panel.len() - first);
    let mut value = INITIAL_VALUE;
    let mut holdings = vec![0.0; n];
    let mut leverage = 0.0;
    for t in first..panel.len() {
        // Mark the book to this week's prices.
        let r_t = &rets.rows[t - 1];
        let growth = 1.0 + holdings.iter().zip(r_t).map(|(h, r)| h * r).sum::<f64>();
        let pre_value = value * growth;
        let drifted: Vec<f64> = if growth > 0.0 {
            holdings.iter().zip(r_t).map(|(h, r)| h * (1.0 + r) / growth).collect()
        } else {
            vec![0.0; n]
        };
        let date = panel.dates()[t];
        if !(pre_value > 0.0) {
            return Err(BacktestError::NonPositiveValue { date, value: pre_value });
        }

        let prev = panel.row(t - 1);
        let cum: Vec<f64> = prev.iter().zip(p0).map(|(p, q)| p / q - 1.0).collect();
        let inputs = DecisionInputs {
            assets: panel.assets(),
            past_returns: &rets.rows[..t - 1],
            forecast: &rets.rows[t - 2],
            cum_returns: &cum,
            drifted: &drifted,
            prev_leverage: leverage,
        };
        let d = strategy_weights(cfg, &inputs);

        let turnover: f64 = d.weights.iter().zip(&drifted).map(|(w, h)| (w - h).abs()).sum();
        let cost = cfg.mu * turnover * pre_value;
        value = pre_value - cost;
        if !(value > 0.0) {
            return Err(BacktestError::NonPositiveValue { date, value });
        }
        debug!("{} {date}: value {value:.6} turnover {turnover:.4} leverage {:.3}", cfg.strategy, d.leverage);
        holdings = d.weights.clone();
        leverage = d.leverage;
        rows.push(LedgerRow {
            date,
            value,
            weights: d.weights,
            leverage: d.leverage,
            cost,
            turnover,
            abstained: d.abstained,
            fill_prices: panel.row(t).to_vec(),
            note: d.note,
        });
    }
    Ok(BacktestLedger {
        strategy: cfg.strategy.name().to_string(),
        assets: panel.assets().to_vec(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_norm_budgets() {
        let b = budget_rule_half_norm(&[0.3, 0.1]).into_vec();
        assert!((b[0] - 0.375).abs() < 1e-15 && (b[1] - 0.125).abs() < 1e-15);
        assert_eq!(budget_rule_half_norm(&[-0.2, -0.1]).into_vec(), vec![0.25, 0.25]);
        assert_eq!(budget_rule_half_norm(&[0.5]).into_vec(), vec![0.5]);
        assert_eq!(budget_rule_half_norm(&[0.2, -0.4]).into_vec(), vec![0.5, 0.0]);
    }

    #[test]
    fn smart_benchmark_weights() {
        let w = benchmark_crb_smart(&[0.3, 0.1]).into_vec();
        assert!((w[0] - 0.75).abs() < 1e-15 && (w[1] - 0.25).abs() < 1e-15);
        assert_eq!(benchmark_crb_smart(&[0.2, 0.2]).into_vec(), vec![0.5, 0.5]);
        assert_eq!(benchmark_crb_smart(&[-0.1, 0.0, -0.3]).into_vec(), vec![1.0 / 3.0; 3]);
    }
}
