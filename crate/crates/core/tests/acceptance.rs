//! Runs every acceptance criterion and prints one PASS/FAIL line each.
//!
//! Built without the libtest harness so the lines are never captured.

use std::process::ExitCode;

use hitchin_core::checks::run_all;

fn main() -> ExitCode {
    let reports = run_all();
    for r in &reports {
        println!("{}", r.line());
        if !r.passed {
            for d in &r.details {
                println!("    {d}");
            }
        }
    }
    let failed: Vec<u32> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    println!("{} of {} criteria passed", reports.len() - failed.len(), reports.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
