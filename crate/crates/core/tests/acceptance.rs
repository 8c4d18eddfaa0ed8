//! Runs every acceptance criterion and prints one PASS/FAIL line for each.
//! Exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use nilcomm::verify::checks;

fn main() -> ExitCode {
    let start = Instant::now();
    let mut failed = 0;
    for check in checks() {
        let t = Instant::now();
        let result = check.run();
        if !result.passed {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} ({:.2}s)",
            result.criterion,
            result.line(),
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.2}s",
        checks().len() - failed,
        checks().len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
