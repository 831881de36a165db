//! Daily price ingestion and weekly resampling.
//!
//! Daily closes are bucketed by ISO week and each week is represented by the
//! lower median of its closes, labelled with the Friday of that week. Weeks
//! missing for any asset are dropped from the whole panel.

mod daily;
mod panel;

pub use daily::{load_csv, load_csv_path, parse_daily_csv, DailyPrices};
pub use panel::{read_panel_csv, returns, to_weekly, write_panel_csv, ReturnPanel, WeeklyPanel};

use chrono::NaiveDate;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line}: duplicate row for {ticker} on {date} (first seen on line {first_line})")]
    Duplicate {
        line: u64,
        ticker: String,
        date: NaiveDate,
        first_line: u64,
    },
    #[error("line {line}: price {price} for {ticker} is not positive")]
    NonPositivePrice { line: u64, ticker: String, price: f64 },
    #[error("no price rows")]
    Empty,
    #[error("no ISO week is covered by every asset")]
    EmptyIntersection,
    #[error("invalid panel: {0}")]
    InvalidPanel(String),
}
