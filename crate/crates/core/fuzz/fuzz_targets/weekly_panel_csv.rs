#![no_main]

use libfuzzer_sys::fuzz_target;
use riskbudget::data::{read_panel_csv, returns, write_panel_csv};

fuzz_target!(|text: &str| {
    if let Ok(panel) = read_panel_csv(text) {
        let _ = returns(&panel);
        let again = read_panel_csv(&write_panel_csv(&panel)).expect("exported panel re-reads");
        assert_eq!(again, panel);
    }
});
