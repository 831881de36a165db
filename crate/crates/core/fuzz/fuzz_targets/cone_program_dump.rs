#![no_main]

use libfuzzer_sys::fuzz_target;
use riskbudget::cone::{read_program, write_program};

fuzz_target!(|text: &str| {
    if let Ok(p) = read_program(text) {
        let _ = read_program(&write_program(&p)).expect("written program re-reads");
    }
});
