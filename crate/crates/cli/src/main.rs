use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod backtest;
mod output;
mod report;
mod solve;

#[derive(Parser)]
#[command(name = "riskbudget", version, about = "Risk-budgeting allocation, backtests and drawdown reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct SolverArgs {
    /// Feasibility and duality-gap tolerance of the cone solver.
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration limit of the cone solver.
    #[arg(long)]
    max_iters: Option<usize>,
}

impl SolverArgs {
    fn options(self) -> riskbudget::cone::SolverOptions {
        let mut opts = riskbudget::cone::SolverOptions::default();
        if let Some(t) = self.tol {
            opts.tol_feas = t;
            opts.tol_gap = t;
            opts.tol_infeas = t;
            opts.tol_cone = t;
        }
        if let Some(m) = self.max_iters {
            opts.max_iters = m;
        }
        opts
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve one allocation problem given as JSON.
    Solve {
        problem: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Run strategy backtests over a price history.
    Backtest {
        /// Daily CSV files (`date,ticker,close` or per-ticker `date,close`)
        /// or one weekly panel CSV (`date,T1,...,TN`).
        #[arg(long, required = true, num_args = 1..)]
        prices: Vec<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
        /// Comma-separated subset of CRB, CRB_SMART, MRB, MRBA, MRBAL;
        /// overrides the config file.
        #[arg(long, value_delimiter = ',')]
        strategies: Option<Vec<String>>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Summary statistics and top drawdowns of ledger CSVs.
    Report {
        #[arg(required = true)]
        ledgers: Vec<PathBuf>,
        /// Episodes per strategy in the drawdown table.
        #[arg(long, default_value_t = 5)]
        top: usize,
        /// Also write `summary.csv` and `drawdowns.csv` here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve { problem, solver } => solve::run(&problem, &solver.options()),
        Command::Backtest {
            prices,
            config,
            out_dir,
            strategies,
            solver,
        } => backtest::run(&prices, config.as_deref(), &out_dir, strategies, &solver.options()).map(|()| 0),
        Command::Report { ledgers, top, out_dir } => report::run(&ledgers, top, out_dir.as_deref()).map(|()| 0),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
