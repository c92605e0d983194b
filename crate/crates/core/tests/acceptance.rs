use std::process::ExitCode;
use std::time::Instant;

use opfree_core::verify;

/// Criteria whose stated form is false and which are expected to print FAIL.
/// A5 asks that every diagonal entry of the forward model equal a head
/// convergent; for coefficients that vary with the level the middle entries
/// are tail fractions instead (A5-tail checks that form). Every other
/// criterion failing makes this target fail.
const EXPECTED_FAIL: &[&str] = &["A5"];

fn main() -> ExitCode {
    let seed = std::env::var("OPFREE_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let start = Instant::now();
    let outcomes = verify::run_all(seed);
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id.as_str()).collect();
    let unexpected: Vec<&str> = failed.iter().copied().filter(|id| !EXPECTED_FAIL.contains(id)).collect();
    let fixed: Vec<&str> = EXPECTED_FAIL.iter().copied().filter(|id| !failed.contains(id)).collect();
    println!(
        "{} criteria, {} failed ({}), seed {seed}, {:.1}s",
        outcomes.len(),
        failed.len(),
        if failed.is_empty() { "none".to_string() } else { failed.join(", ") },
        start.elapsed().as_secs_f64()
    );
    if !fixed.is_empty() {
        println!("expected failures now passing: {}", fixed.join(", "));
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {}", unexpected.join(", "));
        ExitCode::FAILURE
    }
}
