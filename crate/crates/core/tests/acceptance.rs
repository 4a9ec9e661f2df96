//! One line per acceptance criterion; exits nonzero if any fails.

use std::process::ExitCode;

use washburn::verify::{acceptance_criteria, VerifyContext};

fn main() -> ExitCode {
    let ctx = VerifyContext::default();
    let mut failed = 0;
    for c in acceptance_criteria() {
        let r = c.evaluate(&ctx);
        println!(
            "{} {} {} ({})",
            if r.passed { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            r.detail
        );
        if !r.passed {
            failed += 1;
        }
    }
    println!(
        "{} of {} criteria passed",
        acceptance_criteria().len() - failed,
        acceptance_criteria().len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
