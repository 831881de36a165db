use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use log::info;
use riskbudget::analytics::{dated_drawdowns, summary, DrawdownEpisode};
use riskbudget::backtest::{self, parse_run_config, write_ledger_csv, BacktestLedger, RunConfig, Strategy};
use riskbudget::cone::SolverOptions;
use riskbudget::data::{load_csv_path, read_panel_csv, to_weekly, write_panel_csv, DailyPrices, WeeklyPanel};
use serde_json::json;

use crate::output::{sha256_hex, write_atomic};
use crate::report::render;

pub const TOP_K: usize = 5;

fn load_prices(paths: &[PathBuf]) -> Result<WeeklyPanel> {
    if let [only] = paths {
        let text = std::fs::read_to_string(only).with_context(|| format!("reading {}", only.display()))?;
        let header = text.lines().next().unwrap_or_default();
        let cols: Vec<String> = header.split(',').map(|c| c.trim().to_ascii_lowercase()).collect();
        if cols.first().map(String::as_str) == Some("date") && !cols.iter().any(|c| c == "close") {
            return read_panel_csv(&text).with_context(|| format!("{}", only.display()));
        }
    }
    let mut daily = DailyPrices::default();
    for p in paths {
        let prices = load_csv_path(p).with_context(|| format!("{}", p.display()))?;
        daily.merge(prices).with_context(|| format!("{}", p.display()))?;
    }
    Ok(to_weekly(&daily)?)
}

pub fn episodes(ledger: &BacktestLedger) -> Vec<DrawdownEpisode> {
    dated_drawdowns(&ledger.dates(), &ledger.values()).unwrap_or_default()
}

pub fn run(
    prices: &[PathBuf],
    config: Option<&Path>,
    out_dir: &Path,
    strategies: Option<Vec<String>>,
    solver: &SolverOptions,
) -> Result<()> {
    let mut inputs = Vec::new();
    for p in prices.iter().map(PathBuf::as_path).chain(config) {
        let bytes = std::fs::read(p).with_context(|| format!("reading {}", p.display()))?;
        inputs.push(json!({ "path": p.display().to_string(), "sha256": sha256_hex(&bytes) }));
    }
    let panel = load_prices(prices)?;
    let mut run_cfg = match config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            parse_run_config(&text).with_context(|| format!("{}", p.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(names) = strategies {
        run_cfg.strategies = names
            .iter()
            .map(|s| s.parse::<Strategy>().map_err(|e| anyhow!(e)))
            .collect::<Result<_>>()?;
    }
    if run_cfg.strategies.is_empty() {
        bail!("no strategies requested");
    }
    let configs = run_cfg.resolve(panel.assets(), solver)?;
    info!(
        "{} weeks x {} assets, strategies {:?}",
        panel.len(),
        panel.n_assets(),
        run_cfg.strategies
    );

    let results: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|cfg| scope.spawn(|| backtest::run(&panel, cfg)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("backtest thread panicked"))
            .collect()
    });
    let mut ledgers = Vec::new();
    for (cfg, res) in configs.iter().zip(results) {
        ledgers.push(res.with_context(|| format!("strategy {}", cfg.strategy))?);
    }

    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut outputs: Vec<(String, Vec<u8>)> = vec![("weekly_panel.csv".into(), write_panel_csv(&panel).into_bytes())];
    for l in &ledgers {
        outputs.push((format!("ledger_{}.csv", l.strategy), write_ledger_csv(l).into_bytes()));
    }
    let named: Vec<(String, BacktestLedger)> = ledgers.iter().map(|l| (l.strategy.clone(), l.clone())).collect();
    let rendered = render(&named, TOP_K);
    outputs.push(("summary.csv".into(), rendered.summary_csv.into_bytes()));
    outputs.push(("drawdowns.csv".into(), rendered.drawdowns_csv.into_bytes()));
    outputs.push(("report.txt".into(), rendered.text.clone().into_bytes()));

    let mut hashes = Vec::new();
    for (name, bytes) in &outputs {
        write_atomic(&out_dir.join(name), bytes)?;
        hashes.push(json!({ "file": name, "sha256": sha256_hex(bytes) }));
    }
    let stats: Vec<_> = ledgers.iter().map(|l| json!({ "strategy": l.strategy, "summary": summary(l) })).collect();
    let manifest = json!({
        "tool": "riskbudget",
        "version": env!("CARGO_PKG_VERSION"),
        "timestamp": chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        "config": run_cfg,
        "solver": solver,
        "inputs": inputs,
        "panel": {
            "weeks": panel.len(),
            "assets": panel.assets(),
            "first": panel.dates().first(),
            "last": panel.dates().last(),
        },
        "outputs": hashes,
        "stats": stats,
    });
    write_atomic(&out_dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    print!("{}", rendered.text);
    Ok(())
}
