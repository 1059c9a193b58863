//! Acceptance criteria 1 to 9 at full scale, one line per criterion.
//!
//! Criteria 2 and 8 are known to fail at desk scale (see the README section
//! "Known failing criteria"). The target succeeds when exactly those two
//! fail; any other outcome, including one of them passing, is an error.

use std::process::ExitCode;

use lamplighter_speed::cli::verify::{run_criterion, Scale};

const EXPECTED_FAILURES: [u32; 2] = [2, 8];

fn main() -> ExitCode {
    // Accept and ignore libtest flags such as `--nocapture` or filters.
    let parallelism = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut failed = Vec::new();
    for id in 1..=9 {
        let r = run_criterion(id, Scale::full(), parallelism);
        println!("{}", r.line());
        if !r.pass {
            failed.push(id);
        }
    }
    if failed == EXPECTED_FAILURES {
        println!("acceptance: {} of 9 pass; criteria {:?} fail as documented", 9 - failed.len(), failed);
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}, expected exactly {EXPECTED_FAILURES:?}");
        ExitCode::FAILURE
    }
}
