//! One PASS/FAIL line per acceptance criterion.
//!
//! Criterion 4 is expected to fail: the Example 3 return mass at 1/2 settles
//! near 983/4096 instead of decaying, because both generators map (1/3, 2/3)
//! into itself. The run exits nonzero unless exactly the expected set fails,
//! so a regression or a change in that finding is reported.

use std::process::ExitCode;

use semirec_cli::acceptance::{run_criterion, COUNT};

const EXPECTED_FAILURES: &[usize] = &[4];

fn main() -> ExitCode {
    let outcomes: Vec<_> = (1..=COUNT).map(run_criterion).collect();
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    println!(
        "acceptance: {}/{COUNT} criteria pass; failing {failed:?}, expected failing {EXPECTED_FAILURES:?}",
        COUNT - failed.len()
    );
    if failed == EXPECTED_FAILURES {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
