use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use indexmap::IndexMap;

use super::DataError;

/// Daily closes per ticker, sorted by date; tickers keep first-appearance
/// order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DailyPrices {
    series: IndexMap<String, Vec<(NaiveDate, f64)>>,
}

impl DailyPrices {
    pub fn tickers(&self) -> impl Iterator<Item = &str> {
        self.series.keys().map(String::as_str)
    }

    pub fn series(&self, ticker: &str) -> Option<&[(NaiveDate, f64)]> {
        self.series.get(ticker).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[(NaiveDate, f64)])> {
        self.series.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    /// Adds all series of `other`; a ticker present in both is an error.
    pub fn merge(&mut self, other: DailyPrices) -> Result<(), DataError> {
        for (ticker, points) in other.series {
            if self.series.contains_key(&ticker) {
                return Err(DataError::Parse {
                    line: 0,
                    message: format!("ticker {ticker} appears in more than one input"),
                });
            }
            self.series.insert(ticker, points);
        }
        Ok(())
    }
}

/// Reads `date,ticker,close` rows, or `date,close` rows attributed to
/// `default_ticker`.
pub fn load_csv<R: Read>(reader: R, default_ticker: Option<&str>) -> Result<DailyPrices, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let header = rdr.headers().map_err(csv_error)?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
    };
    let missing = |name: &str| DataError::Parse {
        line: 1,
        message: format!("header lacks a `{name}` column"),
    };
    let date_col = col("date").ok_or_else(|| missing("date"))?;
    let close_col = col("close").ok_or_else(|| missing("close"))?;
    let ticker_col = col("ticker");
    if ticker_col.is_none() && default_ticker.is_none() {
        return Err(missing("ticker"));
    }

    let mut rows: IndexMap<String, Vec<(NaiveDate, f64, u64)>> = IndexMap::new();
    let mut seen: HashMap<(String, NaiveDate), u64> = HashMap::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |k: usize, what: &str| {
            record.get(k).ok_or_else(|| DataError::Parse {
                line,
                message: format!("missing {what} field"),
            })
        };
        let ticker = match ticker_col {
            Some(k) => field(k, "ticker")?.to_string(),
            None => default_ticker.unwrap_or_default().to_string(),
        };
        if ticker.is_empty() {
            return Err(DataError::Parse {
                line,
                message: "empty ticker".into(),
            });
        }
        let raw_date = field(date_col, "date")?;
        let date = NaiveDate::parse_from_str(raw_date, "%Y-%m-%d").map_err(|e| DataError::Parse {
            line,
            message: format!("invalid date `{raw_date}`: {e}"),
        })?;
        let raw_close = field(close_col, "close")?;
        let close: f64 = raw_close.parse().map_err(|_| DataError::Parse {
            line,
            message: format!("invalid close `{raw_close}`"),
        })?;
        if !(close > 0.0) || !close.is_finite() {
            return Err(DataError::NonPositivePrice {
                line,
                ticker,
                price: close,
            });
        }
        if let Some(&first_line) = seen.get(&(ticker.clone(), date)) {
            return Err(DataError::Duplicate {
                line,
                ticker,
                date,
                first_line,
            });
        }
        seen.insert((ticker.clone(), date), line);
        rows.entry(ticker).or_default().push((date, close, line));
    }
    if rows.is_empty() {
        return Err(DataError::Empty);
    }
    let series = rows
        .into_iter()
        .map(|(t, mut pts)| {
            pts.sort_by_key(|p| p.0);
            (t, pts.into_iter().map(|(d, c, _)| (d, c)).collect())
        })
        .collect();
    Ok(DailyPrices { series })
}

/// Parses CSV text; see [`load_csv`].
pub fn parse_daily_csv(text: &str, default_ticker: Option<&str>) -> Result<DailyPrices, DataError> {
    load_csv(text.as_bytes(), default_ticker)
}

/// Loads a file; per-ticker files take their ticker from the file stem.
pub fn load_csv_path(path: &Path) -> Result<DailyPrices, DataError> {
    let file = std::fs::File::open(path)?;
    let stem = path.file_stem().and_then(|s| s.to_str());
    load_csv(file, stem)
}

fn csv_error(e: csv::Error) -> DataError {
    let line = e.position().map_or(0, |p| p.line());
    DataError::Parse {
        line,
        message: e.to_string(),
    }
}
