use chrono::NaiveDate;

use crate::data::DataError;

#[derive(Clone, Debug, PartialEq)]
pub struct LedgerRow {
    pub date: NaiveDate,
    /// Portfolio value after this week's trade and its cost.
    pub value: f64,
    pub weights: Vec<f64>,
    pub leverage: f64,
    pub cost: f64,
    pub turnover: f64,
    pub abstained: bool,
    pub fill_prices: Vec<f64>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BacktestLedger {
    pub strategy: String,
    pub assets: Vec<String>,
    pub rows: Vec<LedgerRow>,
}

impl BacktestLedger {
    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.value).collect()
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.rows.iter().map(|r| r.date).collect()
    }

    pub fn total_cost(&self) -> f64 {
        self.rows.iter().map(|r| r.cost).sum()
    }
}

/// CSV columns: `date,value,w_<asset>…,leverage,cost,abstained,turnover,
/// price_<asset>…,note`.
pub fn write_ledger_csv(ledger: &BacktestLedger) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["date".to_string(), "value".to_string()];
    header.extend(ledger.assets.iter().map(|a| format!("w_{a}")));
    header.extend(["leverage", "cost", "abstained", "turnover"].map(String::from));
    header.extend(ledger.assets.iter().map(|a| format!("price_{a}")));
    header.push("note".into());
    w.write_record(&header).expect("in-memory write");
    for r in &ledger.rows {
        let mut rec = vec![r.date.format("%Y-%m-%d").to_string(), r.value.to_string()];
        rec.extend(r.weights.iter().map(f64::to_string));
        rec.push(r.leverage.to_string());
        rec.push(r.cost.to_string());
        rec.push(r.abstained.to_string());
        rec.push(r.turnover.to_string());
        rec.extend(r.fill_prices.iter().map(f64::to_string));
        rec.push(r.note.clone());
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV output is UTF-8")
}

pub fn read_ledger_csv(text: &str, strategy: &str) -> Result<BacktestLedger, DataError> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = rdr
        .headers()
        .map_err(|e| DataError::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let fail = |line: u64, message: String| DataError::Parse { line, message };
    let cols: Vec<&str> = header.iter().collect();
    let assets: Vec<String> = cols
        .iter()
        .filter_map(|c| c.strip_prefix("w_"))
        .map(String::from)
        .collect();
    let n = assets.len();
    let mut expected = vec!["date".to_string(), "value".to_string()];
    expected.extend(assets.iter().map(|a| format!("w_{a}")));
    expected.extend(["leverage", "cost", "abstained", "turnover"].map(String::from));
    expected.extend(assets.iter().map(|a| format!("price_{a}")));
    expected.push("note".into());
    if cols != expected {
        return Err(fail(1, format!("unexpected ledger header; expected `{}`", expected.join(","))));
    }

    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| fail(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let num = |k: usize| -> Result<f64, DataError> {
            let v = &rec[k];
            v.parse()
                .map_err(|_| fail(line, format!("column {}: invalid number `{v}`", cols[k])))
        };
        let date = NaiveDate::parse_from_str(&rec[0], "%Y-%m-%d")
            .map_err(|e| fail(line, format!("invalid date `{}`: {e}", &rec[0])))?;
        let value = num(1)?;
        if !(value > 0.0) || !value.is_finite() {
            return Err(fail(line, format!("portfolio value {value} is not positive")));
        }
        let weights = (2..2 + n).map(num).collect::<Result<Vec<_>, _>>()?;
        let abstained = match &rec[4 + n] {
            "true" => true,
            "false" => false,
            other => return Err(fail(line, format!("abstained: expected true/false, found `{other}`"))),
        };
        let fill_prices = (6 + n..6 + 2 * n).map(num).collect::<Result<Vec<_>, _>>()?;
        rows.push(LedgerRow {
            date,
            value,
            weights,
            leverage: num(2 + n)?,
            cost: num(3 + n)?,
            turnover: num(5 + n)?,
            abstained,
            fill_prices,
            note: rec[6 + 2 * n].to_string(),
        });
    }
    if let Some(k) = rows.windows(2).position(|w| w[0].date >= w[1].date) {
        return Err(fail(k as u64 + 3, "dates not strictly increasing".into()));
    }
    Ok(BacktestLedger {
        strategy: strategy.to_string(),
        assets,
        rows,
    })
}
