#![no_main]

use libfuzzer_sys::fuzz_target;
use riskbudget::allocation::{build_program, parse_problem};

fuzz_target!(|text: &str| {
    if let Ok(problem) = parse_problem(text) {
        let _ = build_program(&problem);
    }
});
