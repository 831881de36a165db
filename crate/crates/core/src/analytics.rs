//! Performance statistics and drawdown tables over backtest ledgers.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backtest::{BacktestLedger, INITIAL_VALUE};

/// Weekly observations per year.
pub const PERIODS_PER_YEAR: f64 = 52.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticsError {
    #[error("need at least 2 values, found {0}")]
    EmptySeries(usize),
    #[error("value {value} at position {index} is not positive")]
    NonPositive { index: usize, value: f64 },
    #[error("{dates} dates for {values} values")]
    LengthMismatch { dates: usize, values: usize },
}

/// A peak-to-recovery window, by position in the series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Episode {
    pub peak: usize,
    pub trough: usize,
    /// Recovery point, or the last point if the series ends under water.
    pub end: usize,
    pub depth: f64,
    pub recovered: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DrawdownEpisode {
    pub from_date: NaiveDate,
    pub trough_date: NaiveDate,
    pub to_date: NaiveDate,
    pub depth: f64,
    pub recovered: bool,
}

/// Every drawdown episode in chronological order. An episode opens when the
/// series falls below its running peak and closes when it gets back to that
/// peak.
pub fn drawdowns(values: &[f64]) -> Result<Vec<Episode>, AnalyticsError> {
    if values.len() < 2 {
        return Err(AnalyticsError::EmptySeries(values.len()));
    }
    if let Some(index) = values.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(AnalyticsError::NonPositive {
            index,
            value: values[index],
        });
    }
    let mut episodes = Vec::new();
    let mut peak = 0;
    let mut trough: Option<usize> = None;
    for (k, &v) in values.iter().enumerate().skip(1) {
        if v >= values[peak] {
            if let Some(tr) = trough.take() {
                episodes.push(Episode {
                    peak,
                    trough: tr,
                    end: k,
                    depth: 1.0 - values[tr] / values[peak],
                    recovered: true,
                });
            }
            peak = k;
        } else if trough.map_or(true, |tr| v < values[tr]) {
            trough = Some(k);
        }
    }
    if let Some(tr) = trough {
        episodes.push(Episode {
            peak,
            trough: tr,
            end: values.len() - 1,
            depth: 1.0 - values[tr] / values[peak],
            recovered: false,
        });
    }
    Ok(episodes)
}

pub fn dated_drawdowns(
    dates: &[NaiveDate],
    values: &[f64],
) -> Result<Vec<DrawdownEpisode>, AnalyticsError> {
    if dates.len() != values.len() {
        return Err(AnalyticsError::LengthMismatch {
            dates: dates.len(),
            values: values.len(),
        });
    }
    Ok(drawdowns(values)?
        .into_iter()
        .map(|e| DrawdownEpisode {
            from_date: dates[e.peak],
            trough_date: dates[e.trough],
            to_date: dates[e.end],
            depth: e.depth,
            recovered: e.recovered,
        })
        .collect())
}

/// The `k` deepest episodes, deepest first; ties keep chronological order.
pub fn top_drawdowns(mut episodes: Vec<DrawdownEpisode>, k: usize) -> Vec<DrawdownEpisode> {
    episodes.sort_by(|a, b| b.depth.total_cmp(&a.depth));
    episodes.truncate(k);
    episodes
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub periods: usize,
    pub final_value: f64,
    /// Final value over the initial capital, minus one.
    pub total_return: f64,
    /// Sample standard deviation of weekly value changes, annualized.
    pub annualized_vol: f64,
    pub max_drawdown: f64,
    pub turnover: f64,
    pub total_cost: f64,
    pub abstained_periods: usize,
}

pub fn summary(ledger: &BacktestLedger) -> Summary {
    let values = ledger.values();
    let rets: Vec<f64> = values.windows(2).map(|w| w[1] / w[0] - 1.0).collect();
    let vol = if rets.len() >= 2 {
        let mean = rets.iter().sum::<f64>() / rets.len() as f64;
        let var = rets.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (rets.len() - 1) as f64;
        (var * PERIODS_PER_YEAR).sqrt()
    } else {
        0.0
    };
    let max_drawdown = drawdowns(&values)
        .ok()
        .and_then(|eps| eps.iter().map(|e| e.depth).reduce(f64::max))
        .unwrap_or(0.0);
    let final_value = values.last().copied().unwrap_or(INITIAL_VALUE);
    Summary {
        periods: values.len(),
        final_value,
        total_return: final_value / INITIAL_VALUE - 1.0,
        annualized_vol: vol,
        max_drawdown,
        turnover: ledger.rows.iter().map(|r| r.turnover).sum(),
        total_cost: ledger.total_cost(),
        abstained_periods: ledger.rows.iter().filter(|r| r.abstained).count(),
    }
}

fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(c, s)| format!("{s:>w$}", w = widths[c]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn to_csv(rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV output is UTF-8")
}

/// Rank column plus one `DD.<strategy>` column per strategy.
fn top_table(strategies: &[(String, Vec<DrawdownEpisode>)], k: usize, fmt: impl Fn(f64) -> String) -> Vec<Vec<String>> {
    let mut rows = vec![std::iter::once(String::new())
        .chain(strategies.iter().map(|(s, _)| format!("DD.{s}")))
        .collect::<Vec<_>>()];
    let tops: Vec<Vec<DrawdownEpisode>> = strategies
        .iter()
        .map(|(_, e)| top_drawdowns(e.clone(), k))
        .collect();
    for rank in 0..k {
        let mut row = vec![(rank + 1).to_string()];
        row.extend(tops.iter().map(|t| t.get(rank).map(|e| fmt(e.depth)).unwrap_or_default()));
        rows.push(row);
    }
    rows
}

pub fn top_drawdowns_csv(strategies: &[(String, Vec<DrawdownEpisode>)], k: usize) -> String {
    to_csv(&top_table(strategies, k, |d| d.to_string()))
}

pub fn top_drawdowns_text(strategies: &[(String, Vec<DrawdownEpisode>)], k: usize) -> String {
    aligned(&top_table(strategies, k, |d| format!("{d:.3}")))
}

/// Rank, dates and depth of the `k` deepest episodes of one strategy.
pub fn episode_table_text(strategy: &str, episodes: &[DrawdownEpisode], k: usize) -> String {
    let mut rows = vec![vec![
        String::new(),
        "From".into(),
        "Trough".into(),
        "To".into(),
        format!("Drawdown.{strategy}"),
    ]];
    for (rank, e) in top_drawdowns(episodes.to_vec(), k).iter().enumerate() {
        rows.push(vec![
            (rank + 1).to_string(),
            e.from_date.to_string(),
            e.trough_date.to_string(),
            e.to_date.to_string(),
            format!("{:.3}", e.depth),
        ]);
    }
    aligned(&rows)
}

fn summary_rows(stats: &[(String, Summary)], fmt: impl Fn(f64) -> String) -> Vec<Vec<String>> {
    let mut rows = vec![[
        "strategy",
        "periods",
        "final_value",
        "total_return",
        "annualized_vol",
        "max_drawdown",
        "turnover",
        "total_cost",
        "abstained",
    ]
    .map(String::from)
    .to_vec()];
    for (name, s) in stats {
        rows.push(vec![
            name.clone(),
            s.periods.to_string(),
            fmt(s.final_value),
            fmt(s.total_return),
            fmt(s.annualized_vol),
            fmt(s.max_drawdown),
            fmt(s.turnover),
            fmt(s.total_cost),
            s.abstained_periods.to_string(),
        ]);
    }
    rows
}

pub fn summary_csv(stats: &[(String, Summary)]) -> String {
    to_csv(&summary_rows(stats, |v| v.to_string()))
}

pub fn summary_text(stats: &[(String, Summary)]) -> String {
    aligned(&summary_rows(stats, |v| format!("{v:.4}")))
}
