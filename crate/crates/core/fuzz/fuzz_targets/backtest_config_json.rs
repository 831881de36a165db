#![no_main]

use libfuzzer_sys::fuzz_target;
use riskbudget::backtest::parse_run_config;
use riskbudget::cone::SolverOptions;

fuzz_target!(|text: &str| {
    if let Ok(cfg) = parse_run_config(text) {
        let assets: Vec<String> = ["A", "B", "C"].map(String::from).to_vec();
        let _ = cfg.resolve(&assets, &SolverOptions::default());
    }
});
