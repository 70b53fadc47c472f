//! The `check` subcommand: run the invariant battery (or a selected suite)
//! and report one line per check; the exit code says whether everything held.

use anyhow::bail;

use crate::battery::{format_report, matching_suites, run_suite};

pub fn cmd_check(selector: Option<&str>, seed: u64) -> anyhow::Result<i32> {
    let names = matching_suites(selector);
    if names.is_empty() {
        bail!(
            "no check suite matches '{}'; available: {}",
            selector.unwrap_or(""),
            crate::battery::SUITES.join(", ")
        );
    }
    let mut all_passed = true;
    for name in names {
        let reports = run_suite(name, seed)?;
        for r in &reports {
            println!("{}", format_report(r));
            all_passed &= r.passed;
        }
    }
    Ok(if all_passed { 0 } else { 1 })
}
