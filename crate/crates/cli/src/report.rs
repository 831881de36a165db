use std::path::Path;

use anyhow::{Context, Result};
use riskbudget::analytics::{
    episode_table_text, summary, summary_csv, summary_text, top_drawdowns_csv, top_drawdowns_text,
};
use riskbudget::backtest::{read_ledger_csv, BacktestLedger};

use crate::backtest::episodes;
use crate::output::write_atomic;

pub struct Rendered {
    pub text: String,
    pub summary_csv: String,
    pub drawdowns_csv: String,
}

pub fn render(ledgers: &[(String, BacktestLedger)], top: usize) -> Rendered {
    let stats: Vec<_> = ledgers.iter().map(|(n, l)| (n.clone(), summary(l))).collect();
    let eps: Vec<_> = ledgers.iter().map(|(n, l)| (n.clone(), episodes(l))).collect();
    let mut text = summary_text(&stats);
    text.push('\n');
    text.push_str(&top_drawdowns_text(&eps, top));
    for (name, e) in &eps {
        text.push('\n');
        text.push_str(&episode_table_text(name, e, top));
    }
    Rendered {
        text,
        summary_csv: summary_csv(&stats),
        drawdowns_csv: top_drawdowns_csv(&eps, top),
    }
}

/// Strategy label from a ledger file name: `ledger_MRB.csv` → `MRB`.
fn label(path: &Path) -> String {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("ledger");
    stem.strip_prefix("ledger_").unwrap_or(stem).to_string()
}

pub fn run(paths: &[std::path::PathBuf], top: usize, out_dir: Option<&Path>) -> Result<()> {
    let mut ledgers = Vec::new();
    for p in paths {
        let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        let name = label(p);
        let ledger = read_ledger_csv(&text, &name).with_context(|| format!("{}", p.display()))?;
        ledgers.push((name, ledger));
    }
    let rendered = render(&ledgers, top);
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        write_atomic(&dir.join("summary.csv"), rendered.summary_csv.as_bytes())?;
        write_atomic(&dir.join("drawdowns.csv"), rendered.drawdowns_csv.as_bytes())?;
    }
    print!("{}", rendered.text);
    Ok(())
}
