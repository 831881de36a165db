#![no_main]

use libfuzzer_sys::fuzz_target;
use riskbudget::analytics::summary;
use riskbudget::backtest::read_ledger_csv;

fuzz_target!(|text: &str| {
    if let Ok(ledger) = read_ledger_csv(text, "FUZZ") {
        let _ = summary(&ledger);
    }
});
