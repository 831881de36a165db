#![no_main]

use libfuzzer_sys::fuzz_target;
use riskbudget::data::{load_csv, to_weekly};

fuzz_target!(|data: &[u8]| {
    for default in [None, Some("X")] {
        if let Ok(daily) = load_csv(data, default) {
            let _ = to_weekly(&daily);
        }
    }
});
