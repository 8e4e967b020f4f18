//! Runs the full acceptance suite and prints one verdict line per
//! criterion. Run with `--nocapture` to see the lines on success:
//!
//! ```text
//! cargo test --test acceptance -- --nocapture
//! ```

use tdcache_core::validation;

#[test]
fn acceptance_criteria() {
    let results = validation::run_all().expect("validation suite setup");
    let mut failures = Vec::new();
    for r in &results {
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        println!("{:4} {} — {}", r.id, verdict, r.detail);
        if !r.passed {
            failures.push(format!("{}: {}", r.id, r.detail));
        }
    }
    assert!(failures.is_empty(), "failed criteria:\n{}", failures.join("\n"));
}
