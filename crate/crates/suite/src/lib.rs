//! Verdict reporting for the acceptance checks in `tests/`.

use std::io::Write;

/// Writes a line to stdout directly, past the test harness's capture.
pub fn say(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
}

/// Prints `PASS criterion n: …` or `FAIL criterion n: …`, then fails the
/// calling test on FAIL.
pub fn report(n: u32, pass: bool, detail: String) {
    say(&format!("{} criterion {n}: {detail}", if pass { "PASS" } else { "FAIL" }));
    assert!(pass, "criterion {n}: {detail}");
}
