mod common;

use common::{contributions, max_abs_diff, quad};
use proptest::prelude::*;
use rand::Rng;
use riskbudget::allocation::min_variance;
use riskbudget::cone::SolverOptions;
use riskbudget::linalg::SymMatrix;
use riskbudget::vanilla::{
    risk_contributions, solve_vanilla, solve_vanilla_with, RiskBudgetSpec, VanillaMethod,
    VanillaOptions,
};
use std::time::Instant;

#[test]
fn budgets_are_met_on_random_instances() {
    let mut r = common::rng(11);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for k in 0..100 {
        let n = [2, 5, 10, 50, 100][k % 5];
        let c = common::random_cov(n, &mut r);
        let b = common::random_simplex(n, &mut r);
        let x = solve_vanilla(&c, &RiskBudgetSpec::new(b.clone()).unwrap(), 1e-10).unwrap();
        assert!((x.sum() - 1.0).abs() < 1e-12);
        // Contributions recomputed here rather than through the crate.
        worst = worst.max(max_abs_diff(&contributions(&c, x.as_slice()), &b));
    }
    assert!(worst <= 1e-7, "{worst:e}");
    assert!(start.elapsed().as_secs_f64() < 10.0);
}

#[test]
fn diagonal_covariance_closed_form() {
    let mut r = common::rng(12);
    for n in [2, 3, 7, 20] {
        let sig: Vec<f64> = (0..n).map(|_| r.gen_range(0.01..0.08)).collect();
        let c = SymMatrix::diagonal(&sig.iter().map(|s| s * s).collect::<Vec<_>>());
        let b = common::random_simplex(n, &mut r);
        let x = solve_vanilla(&c, &RiskBudgetSpec::new(b.clone()).unwrap(), 1e-12).unwrap();
        let raw: Vec<f64> = (0..n).map(|i| b[i].sqrt() / sig[i]).collect();
        let s: f64 = raw.iter().sum();
        let want: Vec<f64> = raw.iter().map(|v| v / s).collect();
        assert!(max_abs_diff(x.as_slice(), &want) <= 1e-8);
    }
}

#[test]
fn two_asset_equal_risk_closed_form() {
    for rho in [-0.5, 0.0, 0.5, 0.9] {
        let (s1, s2) = (0.03, 0.012);
        let c = SymMatrix::from_rows(&[[s1 * s1, rho * s1 * s2], [rho * s1 * s2, s2 * s2]]).unwrap();
        let x = solve_vanilla(&c, &RiskBudgetSpec::uniform(2), 1e-12).unwrap();
        let want = [s2 / (s1 + s2), s1 / (s1 + s2)];
        assert!(max_abs_diff(x.as_slice(), &want) <= 1e-8, "rho {rho}");
    }
}

#[test]
fn newton_and_coordinate_descent_agree() {
    let mut r = common::rng(13);
    for n in [3, 8, 15] {
        let c = common::random_cov(n, &mut r);
        let spec = RiskBudgetSpec::new(common::random_simplex(n, &mut r)).unwrap();
        let solve = |method| {
            solve_vanilla_with(&c, &spec, &VanillaOptions { method, ..Default::default() }).unwrap()
        };
        let a = solve(VanillaMethod::Newton);
        let b = solve(VanillaMethod::CoordinateDescent);
        assert!(max_abs_diff(a.as_slice(), b.as_slice()) <= 1e-9);
    }
}

#[test]
fn invalid_budgets_are_rejected() {
    let c = SymMatrix::identity(2);
    assert!(RiskBudgetSpec::new(vec![0.7, 0.7]).is_err());
    assert!(RiskBudgetSpec::new(vec![-0.1, 1.1]).is_err());
    let partial = RiskBudgetSpec::new(vec![0.3, 0.3]).unwrap();
    assert!(solve_vanilla(&c, &partial, 1e-10).is_err());
    let with_zero = RiskBudgetSpec::new(vec![0.0, 1.0]).unwrap();
    assert!(solve_vanilla(&c, &with_zero, 1e-10).is_err());
}

#[test]
fn variance_sandwich() {
    let mut r = common::rng(14);
    let opts = SolverOptions::default();
    for k in 0..50 {
        let n = 2 + k % 9;
        let c = common::random_cov(n, &mut r);
        let b = common::random_simplex(n, &mut r);
        let x = solve_vanilla(&c, &RiskBudgetSpec::new(b.clone()).unwrap(), 1e-10).unwrap();
        let mv = min_variance(&c, &opts).unwrap();
        let (lo, mid, hi) = (
            quad(&c, mv.as_slice()).sqrt(),
            quad(&c, x.as_slice()).sqrt(),
            quad(&c, &b).sqrt(),
        );
        assert!(lo <= mid + 1e-9 && mid <= hi + 1e-9, "instance {k}: {lo} {mid} {hi}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn scaling_covariance_leaves_weights(seed in any::<u64>(), n in 2usize..12, k in 1e-4f64..1e4) {
        let mut r = common::rng(seed);
        let c = common::random_cov(n, &mut r);
        let spec = RiskBudgetSpec::new(common::random_simplex(n, &mut r)).unwrap();
        let x = solve_vanilla(&c, &spec, 1e-10).unwrap();
        let y = solve_vanilla(&c.scale(k), &spec, 1e-10).unwrap();
        prop_assert!(max_abs_diff(x.as_slice(), y.as_slice()) <= 1e-8);
    }

    #[test]
    fn contributions_sum_to_one(seed in any::<u64>(), n in 1usize..20) {
        let mut r = common::rng(seed);
        let c = common::random_cov(n, &mut r);
        let w: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..1.0)).collect();
        prop_assume!(w.iter().any(|v| *v > 1e-3));
        let rc = risk_contributions(&c, &w).unwrap();
        prop_assert!((rc.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }
}
