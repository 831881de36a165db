//! Share-and-cash bookkeeping for the backtest fixture, written without
//! reference to the engine's weight-drift formulation.

use super::{eigen_clip, two_pass_cov};
use riskbudget::backtest::{BacktestConfig, BacktestLedger, BudgetRule, Strategy};
use riskbudget::data::{read_panel_csv, WeeklyPanel};
use riskbudget::linalg::Matrix;

#[derive(Clone, Debug)]
pub struct OracleRow {
    pub value: f64,
    pub weights: Vec<f64>,
    pub leverage: f64,
    pub cost: f64,
    pub turnover: f64,
    pub abstained: bool,
}

pub struct FixtureSpec<'a> {
    pub prices: &'a [Vec<f64>],
    pub warmup: usize,
    pub mu: f64,
    /// Weights every optimizing strategy is pinned to by its bounds.
    pub pinned: &'a [f64],
    pub leverage_cap: f64,
}

fn ret(prices: &[Vec<f64>], k: usize) -> Vec<f64> {
    prices[k].iter().zip(&prices[k - 1]).map(|(a, b)| a / b - 1.0).collect()
}

/// Repaired covariance of the returns realised at price times `1..t`.
fn point_in_time_cov(prices: &[Vec<f64>], t: usize) -> Vec<Vec<f64>> {
    let obs: Vec<Vec<f64>> = (1..t).map(|k| ret(prices, k)).collect();
    let c = two_pass_cov(&obs);
    let n = c.len();
    let mean_diag = (0..n).map(|i| c[i][i]).sum::<f64>() / n as f64;
    let eps = (1e-8 * mean_diag).max(1e-14);
    let e = nalgebra::SymmetricEigen::new(nalgebra::DMatrix::from_fn(n, n, |i, j| c[i][j]));
    if e.eigenvalues.min() >= eps {
        return c;
    }
    let clipped = eigen_clip(&Matrix::from_rows(&c).unwrap(), eps);
    (0..n).map(|i| (0..n).map(|j| clipped[(i, j)]).collect()).collect()
}

fn stdev(c: &[Vec<f64>], w: &[f64]) -> f64 {
    let n = w.len();
    let mut v = 0.0;
    for i in 0..n {
        for j in 0..n {
            v += w[i] * c[i][j] * w[j];
        }
    }
    v.sqrt()
}

pub fn run(spec: &FixtureSpec<'_>, strategy: &str) -> Vec<OracleRow> {
    let p = spec.prices;
    let n = p[0].len();
    let mut shares = vec![0.0; n];
    let mut cash = 1.0;
    let mut out = Vec::new();
    for t in spec.warmup + 1..p.len() {
        let marked: f64 = shares.iter().zip(&p[t]).map(|(s, q)| s * q).sum();
        let v_pre = cash + marked;
        let held: Vec<f64> = shares.iter().zip(&p[t]).map(|(s, q)| s * q / v_pre).collect();

        let forecast = ret(p, t - 1);
        let expected: f64 = forecast.iter().zip(spec.pinned).map(|(f, w)| f * w).sum();
        let (target, leverage, abstained) = match strategy {
            "CRB" => (vec![1.0 / n as f64; n], 1.0, false),
            "CRB_SMART" => {
                let pos: Vec<f64> = (0..n).map(|i| (p[t - 1][i] / p[0][i] - 1.0).max(0.0)).collect();
                let s: f64 = pos.iter().sum();
                if s > 0.0 {
                    (pos.iter().map(|v| v / s).collect(), 1.0, false)
                } else {
                    (vec![1.0 / n as f64; n], 1.0, false)
                }
            }
            "MRB" => (spec.pinned.to_vec(), 1.0, false),
            "MRBA" | "MRBAL" if expected < 0.0 => (vec![0.0; n], 0.0, true),
            "MRBA" => (spec.pinned.to_vec(), 1.0, false),
            "MRBAL" => {
                let c = point_in_time_cov(p, t);
                let ratio = stdev(&c, &vec![1.0 / n as f64; n]) / stdev(&c, spec.pinned);
                let lev = ratio.min(spec.leverage_cap);
                (spec.pinned.iter().map(|w| w * lev).collect(), lev, false)
            }
            other => panic!("unknown strategy {other}"),
        };

        let turnover: f64 = target.iter().zip(&held).map(|(a, b)| (a - b).abs()).sum();
        let cost = spec.mu * turnover * v_pre;
        let v_post = v_pre - cost;
        shares = (0..n).map(|i| target[i] * v_post / p[t][i]).collect();
        cash = v_post - shares.iter().zip(&p[t]).map(|(s, q)| s * q).sum::<f64>();
        out.push(OracleRow {
            value: v_post,
            weights: target,
            leverage,
            cost,
            turnover,
            abstained,
        });
    }
    out
}

pub const FIXTURE_CSV: &str = include_str!("../data/backtest_fixture.csv");
pub const FIXTURE_PINNED: [f64; 2] = [0.6, 0.4];
pub const FIXTURE_MU: f64 = 0.001;
pub const FIXTURE_WARMUP: usize = 3;

/// Engine settings matching the fixture oracle: bounds pin the optimizer to
/// [`FIXTURE_PINNED`] and small fixed budgets keep the problem feasible.
pub fn fixture_config(strategy: Strategy) -> BacktestConfig {
    let mut cfg = BacktestConfig::new(strategy, BudgetRule::Fixed(vec![0.02, 0.02]));
    cfg.mu = FIXTURE_MU;
    cfg.warmup = FIXTURE_WARMUP;
    cfg.lower = Some(FIXTURE_PINNED.to_vec());
    cfg.upper = Some(FIXTURE_PINNED.to_vec());
    cfg
}

pub fn fixture_panel() -> WeeklyPanel {
    read_panel_csv(FIXTURE_CSV).unwrap()
}

/// Largest absolute discrepancy between an engine ledger and the oracle.
pub fn compare(ledger: &BacktestLedger, oracle: &[OracleRow]) -> f64 {
    assert_eq!(ledger.rows.len(), oracle.len());
    let mut worst = 0.0f64;
    for (row, want) in ledger.rows.iter().zip(oracle) {
        assert_eq!(row.abstained, want.abstained, "{}", row.date);
        worst = worst
            .max((row.value - want.value).abs())
            .max((row.cost - want.cost).abs())
            .max((row.turnover - want.turnover).abs())
            .max((row.leverage - want.leverage).abs())
            .max(super::max_abs_diff(&row.weights, &want.weights));
    }
    worst
}

/// Fixture oracle rows for `strategy`.
pub fn fixture_oracle(strategy: Strategy) -> Vec<OracleRow> {
    let panel = fixture_panel();
    let spec = FixtureSpec {
        prices: panel.rows(),
        warmup: FIXTURE_WARMUP,
        mu: FIXTURE_MU,
        pinned: &FIXTURE_PINNED,
        leverage_cap: 1.5,
    };
    run(&spec, strategy.name())
}
