//! Runs every acceptance criterion at its stated size and time limit, one line each.

use katetov_workbench::suite;

fn main() {
    // `cargo test` passes harness flags; only a numeric filter is honoured.
    let only: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let reports = suite::run(suite::DEFAULT_SEED, (!only.is_empty()).then_some(&only[..]), |r| println!("{}", r.line()));
    let failed: Vec<u8> = reports.iter().filter(|r| !r.passed).map(|r| r.number).collect();
    println!("acceptance: {} passed, {} failed {:?}", reports.len() - failed.len(), failed.len(), failed);
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
