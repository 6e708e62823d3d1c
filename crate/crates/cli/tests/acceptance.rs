//! Full-scale acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::process::ExitCode;

use maj3lab_cli::resolve_workers;
use maj3lab_cli::verify::{run_verify, Scale, VerifyOptions};

fn main() -> ExitCode {
    let opts = VerifyOptions::new(Scale::Full, resolve_workers(None));
    let report = run_verify(&opts);
    println!("{}", report.render());
    if report.outcomes.len() == 9 && report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
