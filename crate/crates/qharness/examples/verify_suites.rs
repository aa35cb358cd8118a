//! Run every cross-validation suite on seeded pseudo-random rational
//! points, the library-side counterpart of `qh verify --suite all`.
//!
//! ```sh
//! cargo run --example verify_suites
//! ```

use qharness::verify::{run_suite, Suite};

fn main() {
    let seed = 7;
    let horizon = 32;
    println!("seed = {seed}, horizon = {horizon}\n");
    let mut all_passed = true;
    for suite in Suite::ALL {
        let outcome = run_suite(suite, seed, horizon);
        all_passed &= outcome.passed();
        print!(
            "{:<14} checks = {:>4}, failures = {}",
            outcome.suite, outcome.checks, outcome.failures
        );
        match &outcome.first_counterexample {
            Some(cx) => println!("  first counterexample: {cx}"),
            None => println!(),
        }
    }
    println!("\noverall: {}", if all_passed { "pass" } else { "fail" });
}
