mod common;

use common::accounting::{compare, fixture_config, fixture_oracle, fixture_panel};
use riskbudget::backtest::{
    read_ledger_csv, run, write_ledger_csv, BacktestConfig, BudgetRule, Strategy,
};
use riskbudget::data::{returns, WeeklyPanel};
use riskbudget::linalg::covariance;

fn default_cfg(strategy: Strategy) -> BacktestConfig {
    BacktestConfig::new(strategy, BudgetRule::HalfNormCumRet)
}

#[test]
fn fixture_ledgers_match_accounting_oracle() {
    let panel = fixture_panel();
    for s in Strategy::ALL {
        let ledger = run(&panel, &fixture_config(s)).unwrap();
        let oracle = fixture_oracle(s);
        let err = compare(&ledger, &oracle);
        assert!(err <= 1e-12, "{s}: {err:e}");
    }
}

#[test]
fn fixture_exercises_abstain_and_costs() {
    let mrba = fixture_oracle(Strategy::Mrba);
    assert_eq!(mrba.iter().map(|r| r.abstained).collect::<Vec<_>>(), [false, true, true]);
    let mrbal = fixture_oracle(Strategy::Mrbal);
    assert!(mrbal[0].leverage > 0.0 && mrbal[0].leverage < 1.5);
    // The liquidation in an abstain week pays for its turnover.
    assert!(mrba[1].cost > 0.0 && mrba[2].cost == 0.0);
}

#[test]
fn total_cost_matches_turnover_times_value() {
    let panel = fixture_panel();
    for s in Strategy::ALL {
        let ledger = run(&panel, &fixture_config(s)).unwrap();
        let oracle = fixture_oracle(s);
        let want: f64 = oracle.iter().map(|r| r.cost).sum();
        assert!((ledger.total_cost() - want).abs() <= 1e-12);
    }
}

#[test]
fn truncation_leaves_earlier_periods_unchanged() {
    let mut r = common::rng(41);
    let panel = common::random_panel(26, 4, 0.002, &mut r);
    for s in Strategy::ALL {
        let mut cfg = default_cfg(s);
        cfg.mu = 0.001;
        let full = run(&panel, &cfg).unwrap();
        for len in [4, 9, 17, 25] {
            let part = run(&panel.truncate(len), &cfg).unwrap();
            assert_eq!(part.rows[..], full.rows[..part.rows.len()], "{s} len {len}");
        }
    }
}

#[test]
fn altering_future_prices_leaves_the_past_alone() {
    let mut r = common::rng(42);
    let panel = common::random_panel(20, 3, 0.0, &mut r);
    let cut = 12;
    let mut rows = panel.rows().to_vec();
    rows[cut + 1..].reverse();
    for row in &mut rows[cut + 1..] {
        row.iter_mut().for_each(|p| *p *= 1.3);
    }
    let shuffled = WeeklyPanel::new(panel.dates().to_vec(), panel.assets().to_vec(), rows).unwrap();
    for s in Strategy::ALL {
        let a = run(&panel, &default_cfg(s)).unwrap();
        let b = run(&shuffled, &default_cfg(s)).unwrap();
        let k = cut - 2; // rows start at week 3
        assert_eq!(a.rows[..k], b.rows[..k], "{s}");
    }
}

#[test]
fn abstaining_beats_holding_in_a_falling_market() {
    let mut r = common::rng(43);
    let base = common::random_panel(30, 3, 0.0, &mut r);
    // Every asset falls every week.
    let mut rows = vec![base.row(0).to_vec()];
    for t in 1..30 {
        let prev = rows[t - 1].clone();
        rows.push(prev.iter().enumerate().map(|(i, p)| p * (0.99 - 0.004 * i as f64 - 0.001 * (t % 3) as f64)).collect());
    }
    let panel = WeeklyPanel::new(base.dates().to_vec(), base.assets().to_vec(), rows).unwrap();
    let mut mrb = default_cfg(Strategy::Mrb);
    mrb.mu = 0.001;
    let mut mrba = mrb.clone();
    mrba.strategy = Strategy::Mrba;
    let hold = run(&panel, &mrb).unwrap();
    let out = run(&panel, &mrba).unwrap();
    assert!(out.values().last() >= hold.values().last());
    assert!(out.rows.iter().all(|r| r.abstained));
}

#[test]
fn leverage_stays_within_cap() {
    let mut r = common::rng(44);
    for k in 0..6 {
        let panel = common::random_panel(30, 2 + k, 0.003, &mut r);
        let mut cfg = default_cfg(Strategy::Mrbal);
        cfg.mu = 0.001;
        let ledger = run(&panel, &cfg).unwrap();
        for row in &ledger.rows {
            assert!((0.0..=1.5).contains(&row.leverage), "{}", row.leverage);
            if row.abstained {
                assert!(row.weights.iter().all(|w| *w == 0.0));
            }
            let gross: f64 = row.weights.iter().sum();
            assert!((gross - row.leverage).abs() <= 1e-12);
        }
    }
}

#[test]
fn mrbal_leverage_is_volatility_ratio() {
    // Cap binds when the optimized book is much calmer than equal weight.
    let mut r = common::rng(45);
    let panel = common::random_panel(40, 5, 0.004, &mut r);
    let mut cfg = default_cfg(Strategy::Mrbal);
    cfg.leverage_cap = 1.5;
    let ledger = run(&panel, &cfg).unwrap();
    let rets = returns(&panel);
    for (k, row) in ledger.rows.iter().enumerate().filter(|(_, r)| !r.abstained) {
        let t = cfg.warmup + 1 + k;
        let cov = covariance(&rets.rows[..t - 1]).unwrap();
        let unlevered: Vec<f64> = row.weights.iter().map(|w| w / row.leverage).collect();
        let q = |w: &[f64]| cov.quad_form(w).sqrt();
        let ratio = q(&vec![1.0 / 5.0; 5]) / q(&unlevered);
        assert!((row.leverage - ratio.min(1.5)).abs() <= 1e-9, "{} vs {ratio}", row.leverage);
    }
}

#[test]
fn equal_weight_benchmark_ignores_optimizer_settings() {
    let mut r = common::rng(46);
    let panel = common::random_panel(15, 3, 0.001, &mut r);
    let base = run(&panel, &default_cfg(Strategy::Crb)).unwrap();
    let mut other = BacktestConfig::new(Strategy::Crb, BudgetRule::Fixed(vec![0.3, 0.3, 0.3]));
    other.lambda = 7.0;
    other.lower = Some(vec![0.2; 3]);
    let alt = run(&panel, &other).unwrap();
    assert_eq!(base, alt);
    for row in &base.rows {
        assert_eq!(row.weights, vec![1.0 / 3.0; 3]);
    }
}

#[test]
fn flat_prices_only_pay_entry_cost() {
    let dates: Vec<_> = (0..8)
        .map(|k| chrono::NaiveDate::from_ymd_opt(2022, 1, 7).unwrap() + chrono::Duration::weeks(k))
        .collect();
    let panel = WeeklyPanel::new(dates, vec!["X".into(), "Y".into()], vec![vec![10.0, 20.0]; 8]).unwrap();
    for s in [Strategy::Crb, Strategy::CrbSmart, Strategy::Mrb] {
        let mut cfg = default_cfg(s);
        cfg.mu = 0.001;
        let ledger = run(&panel, &cfg).unwrap();
        let entry = ledger.rows[0].cost;
        assert!((entry - 0.001).abs() <= 1e-15, "{s}");
        for row in &ledger.rows[1..] {
            assert!(row.cost.abs() <= 1e-12, "{s}");
            assert!((row.value - (1.0 - entry)).abs() <= 1e-12, "{s}");
        }
    }
}

#[test]
fn mrb_two_asset_weights_match_grid_search() {
    let mut r = common::rng(47);
    let panel = common::random_panel(16, 2, 0.002, &mut r);
    // Enough history for a full-rank covariance.
    let mut cfg = default_cfg(Strategy::Mrb);
    cfg.warmup = 6;
    let ledger = run(&panel, &cfg).unwrap();
    let rets = returns(&panel);
    for (k, row) in ledger.rows.iter().enumerate() {
        let t = cfg.warmup + 1 + k;
        let c = covariance(&rets.rows[..t - 1]).unwrap();
        let cum: Vec<f64> = (0..2).map(|i| panel.row(t - 1)[i] / panel.row(0)[i] - 1.0).collect();
        let pos: Vec<f64> = cum.iter().map(|v| v.max(0.0)).collect();
        let s: f64 = pos.iter().sum();
        let b: Vec<f64> = if s > 0.0 { pos.iter().map(|p| 0.5 * p / s).collect() } else { vec![0.25; 2] };
        let (gx, _) = common::grid_search_two(
            &c, &b, &rets.rows[t - 2], 1.0, 0.0, &[0.0; 2], &[0.0; 2], &[1.0; 2], 1e-5,
        )
        .unwrap();
        assert!(common::max_abs_diff(&row.weights, &gx) <= 1e-3, "week {t}");
    }
}

#[test]
fn ledger_csv_round_trips() {
    let panel = fixture_panel();
    for s in Strategy::ALL {
        let ledger = run(&panel, &fixture_config(s)).unwrap();
        let back = read_ledger_csv(&write_ledger_csv(&ledger), s.name()).unwrap();
        assert_eq!(back, ledger);
    }
}

#[test]
fn solver_failure_abstains_with_note() {
    // Budgets no long-only portfolio can meet under these caps.
    let mut r = common::rng(48);
    let panel = common::random_panel(8, 2, 0.0, &mut r);
    let mut cfg = BacktestConfig::new(Strategy::Mrb, BudgetRule::Fixed(vec![0.9, 0.0]));
    cfg.upper = Some(vec![0.05, 1.0]);
    let ledger = run(&panel, &cfg).unwrap();
    assert!(ledger.rows.iter().all(|r| r.abstained && r.note.contains("infeasible")));
}
