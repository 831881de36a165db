use std::path::Path;

use anyhow::{Context, Result};
use riskbudget::allocation::{parse_problem, solve_allocation, AllocationError};
use riskbudget::cone::SolverOptions;
use serde_json::json;

/// Exit code 0 on an optimal solution, 2 when infeasible.
pub fn run(path: &Path, opts: &SolverOptions) -> Result<u8> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let problem = parse_problem(&text).with_context(|| format!("{}", path.display()))?;
    match solve_allocation(&problem, opts) {
        Ok(res) => {
            let doc = json!({
                "status": res.solver_stats.status,
                "assets": problem.assets,
                "weights": res.weights,
                "risk_contribs": res.risk_contribs,
                "binding_budgets": res.binding_budgets,
                "objective": res.objective,
                "solver": res.solver_stats,
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
            println!();
            let width = problem.assets.iter().map(|a| a.len()).max().unwrap_or(0).max(5);
            println!("{:<width$}  {:>10}  {:>10}  {:>10}  binding", "asset", "weight", "contrib", "budget");
            for i in 0..problem.n() {
                println!(
                    "{:<width$}  {:>10.6}  {:>10.6}  {:>10.6}  {}",
                    problem.assets[i],
                    res.weights[i],
                    res.risk_contribs[i],
                    problem.budgets[i],
                    if res.binding_budgets[i] { "yes" } else { "no" }
                );
            }
            println!(
                "objective {:.6e}  iterations {}  primal residual {:.1e}  dual residual {:.1e}",
                res.objective,
                res.solver_stats.iterations,
                res.solver_stats.residuals.primal,
                res.solver_stats.residuals.dual
            );
            Ok(0)
        }
        Err(AllocationError::Infeasible(report)) => {
            println!("{}", serde_json::to_string_pretty(&json!({ "status": "Infeasible", "diagnostics": report }))?);
            eprintln!("infeasible: {report}");
            Ok(2)
        }
        Err(e) => Err(e.into()),
    }
}
