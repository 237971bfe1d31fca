//! End-to-end acceptance criteria. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

use std::process::ExitCode;

use collapse_harness::constants::DEFAULT_VALIDATION_SEED;
use collapse_harness::validation::run_all;

fn main() -> ExitCode {
    let run = run_all(DEFAULT_VALIDATION_SEED);
    for c in &run.criteria {
        println!("{}", c.line());
        if !c.pass {
            for r in c.reports.iter().filter(|r| !r.pass) {
                for m in r.measurements.iter().filter(|m| !m.pass) {
                    println!("    {}: {} = {} (reference {}, se {})", r.name, m.label, m.estimate, m.reference, m.se);
                }
                for n in &r.notes {
                    println!("    {}: {}", r.name, n);
                }
            }
        }
    }
    let failed: Vec<u8> = run.criteria.iter().filter(|c| !c.pass).map(|c| c.id).collect();
    println!(
        "acceptance: {} of {} criteria passed in {:.1} s",
        run.criteria.len() - failed.len(),
        run.criteria.len(),
        run.seconds
    );
    if run.criteria.len() == 10 && failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
