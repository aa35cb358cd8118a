//! Classify individual parameter points and a small grid, the library-side
//! counterpart of `qh classify` and `qh sweep`.
//!
//! ```sh
//! cargo run --example classify_and_sweep
//! ```

use qharness::classify::classify;
use qharness::scalar::{Mode, Scalar};
use qharness::solver::QHParams;

fn main() {
    let zero = || Scalar::zero(Mode::Exact);

    println!("named points:");
    let named = vec![
        ("q-Wiener", QHParams::new(zero(), zero(), zero(), zero(), zero()).unwrap()),
        (
            "Poisson",
            QHParams::new(
                zero(),
                zero(),
                Scalar::one(Mode::Exact),
                zero(),
                Scalar::one(Mode::Exact),
            )
            .unwrap(),
        ),
    ];
    for (label, p) in named {
        let r = classify(&p, 64).unwrap();
        println!(
            "   {label:<10} regime={} case={} favard={} bounded={} process={:?}",
            r.regime,
            r.special_case,
            r.favard_ok,
            r.bounded,
            r.known_process.map(|k| k.as_str())
        );
    }

    // A q-line across the regime boundary at sigma*tau = 1/4, where
    // 1 - 2*sqrt(sigma*tau) = 0.
    println!("\nsweep over q at sigma = tau = 1/2, theta = eta = 0:");
    println!("   q        regime              favard  bounded");
    for qk in [-4i64, -2, -1, 0, 1, 2, 4] {
        let q = Scalar::ratio(qk, 8);
        let p = QHParams::new(
            Scalar::ratio(1, 2),
            Scalar::ratio(1, 2),
            zero(),
            zero(),
            q.clone(),
        )
        .unwrap();
        match classify(&p, 64) {
            Ok(r) => println!(
                "   {:<8} {:<19} {:<7} {}",
                q.to_string(),
                r.regime.to_string(),
                r.favard_ok,
                r.bounded
            ),
            Err(e) => println!("   {:<8} error: {e}", q.to_string()),
        }
    }
}
