use std::collections::BTreeMap;
use std::fmt::Write;

use chrono::{Datelike, NaiveDate, Weekday};

use super::{DailyPrices, DataError};

/// Aligned weekly prices; `rows[t][i]` is asset `i` in week `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeeklyPanel {
    dates: Vec<NaiveDate>,
    assets: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl WeeklyPanel {
    pub fn new(
        dates: Vec<NaiveDate>,
        assets: Vec<String>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self, DataError> {
        let bad = |m: String| Err(DataError::InvalidPanel(m));
        if assets.is_empty() {
            return bad("no assets".into());
        }
        if dates.len() != rows.len() {
            return bad(format!("{} dates but {} rows", dates.len(), rows.len()));
        }
        if let Some(w) = dates.windows(2).position(|w| w[0] >= w[1]) {
            return bad(format!("dates not strictly increasing at {}", dates[w + 1]));
        }
        for (t, row) in rows.iter().enumerate() {
            if row.len() != assets.len() {
                return bad(format!("row {t} has {} prices for {} assets", row.len(), assets.len()));
            }
            if let Some(i) = row.iter().position(|p| !(*p > 0.0) || !p.is_finite()) {
                return bad(format!("price of {} on {} is not positive", assets[i], dates[t]));
            }
        }
        for (k, a) in assets.iter().enumerate() {
            if a.is_empty() || a.contains([',', '"', '\n', '\r']) {
                return bad(format!("asset name {a:?} is empty or not CSV-safe"));
            }
            if assets[..k].contains(a) {
                return bad(format!("asset {a} listed twice"));
            }
        }
        Ok(WeeklyPanel { dates, assets, rows })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn assets(&self) -> &[String] {
        &self.assets
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.rows[t]
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn n_assets(&self) -> usize {
        self.assets.len()
    }

    /// First `len` weeks.
    pub fn truncate(&self, len: usize) -> WeeklyPanel {
        let len = len.min(self.len());
        WeeklyPanel {
            dates: self.dates[..len].to_vec(),
            assets: self.assets.clone(),
            rows: self.rows[..len].to_vec(),
        }
    }
}

/// Simple weekly returns `pₜ/pₜ₋₁ − 1`, labelled with the later week.
#[derive(Clone, Debug, PartialEq)]
pub struct ReturnPanel {
    pub dates: Vec<NaiveDate>,
    pub assets: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn returns(panel: &WeeklyPanel) -> ReturnPanel {
    let rows = panel
        .rows
        .windows(2)
        .map(|w| w[1].iter().zip(&w[0]).map(|(p1, p0)| p1 / p0 - 1.0).collect())
        .collect();
    ReturnPanel {
        dates: panel.dates.iter().skip(1).copied().collect(),
        assets: panel.assets.clone(),
        rows,
    }
}

fn week_label(d: NaiveDate) -> NaiveDate {
    let w = d.iso_week();
    NaiveDate::from_isoywd_opt(w.year(), w.week(), Weekday::Fri).expect("every ISO week has a Friday")
}

fn lower_median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[(v.len() - 1) / 2]
}

/// Weekly lower-median panel over the ISO weeks covered by every asset.
pub fn to_weekly(daily: &DailyPrices) -> Result<WeeklyPanel, DataError> {
    if daily.is_empty() {
        return Err(DataError::Empty);
    }
    let weekly: Vec<BTreeMap<NaiveDate, f64>> = daily
        .iter()
        .map(|(_, pts)| {
            let mut buckets: BTreeMap<NaiveDate, Vec<f64>> = BTreeMap::new();
            for &(d, c) in pts {
                buckets.entry(week_label(d)).or_default().push(c);
            }
            buckets.into_iter().map(|(w, v)| (w, lower_median(v))).collect()
        })
        .collect();
    let dates: Vec<NaiveDate> = weekly[0]
        .keys()
        .filter(|w| weekly[1..].iter().all(|m| m.contains_key(w)))
        .copied()
        .collect();
    if dates.is_empty() {
        return Err(DataError::EmptyIntersection);
    }
    let rows = dates
        .iter()
        .map(|w| weekly.iter().map(|m| m[w]).collect())
        .collect();
    WeeklyPanel::new(dates, daily.tickers().map(String::from).collect(), rows)
}

/// `date,T1,…,TN` with shortest round-trip float formatting.
pub fn write_panel_csv(panel: &WeeklyPanel) -> String {
    let mut out = String::from("date");
    for a in &panel.assets {
        out.push(',');
        out.push_str(a);
    }
    out.push('\n');
    for (d, row) in panel.dates.iter().zip(&panel.rows) {
        let _ = write!(out, "{}", d.format("%Y-%m-%d"));
        for p in row {
            let _ = write!(out, ",{p}");
        }
        out.push('\n');
    }
    out
}

pub fn read_panel_csv(text: &str) -> Result<WeeklyPanel, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| DataError::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if header.get(0).map(|h| h.eq_ignore_ascii_case("date")) != Some(true) {
        return Err(DataError::Parse {
            line: 1,
            message: "first column must be `date`".into(),
        });
    }
    let assets: Vec<String> = header.iter().skip(1).map(String::from).collect();
    let mut dates = Vec::new();
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| DataError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let raw = &record[0];
        let date = NaiveDate::parse_from_str(raw, "%Y-%m-%d").map_err(|e| DataError::Parse {
            line,
            message: format!("invalid date `{raw}`: {e}"),
        })?;
        let row = record
            .iter()
            .skip(1)
            .map(|v| {
                v.parse::<f64>().map_err(|_| DataError::Parse {
                    line,
                    message: format!("invalid price `{v}`"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        dates.push(date);
        rows.push(row);
    }
    WeeklyPanel::new(dates, assets, rows)
}
