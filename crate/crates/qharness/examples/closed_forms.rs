//! Detect which solvable special case a parameter point falls into and
//! cross-check the closed-form table against the recursion pipeline.
//!
//! ```sh
//! cargo run --example closed_forms
//! ```

use qharness::closed_forms::{closed_table, detect_case, verify_against_recursion};
use qharness::scalar::{Mode, Scalar};
use qharness::solver::QHParams;

fn main() {
    let zero = || Scalar::zero(Mode::Exact);
    let points = vec![
        // sigma = tau = 0: everything collapses to q-integers.
        QHParams::new(zero(), zero(), Scalar::ratio(1, 2), Scalar::ratio(1, 4), Scalar::ratio(1, 3))
            .unwrap(),
        // q = -sigma*tau: constant lambda, stationary coefficients.
        QHParams::new(
            Scalar::ratio(1, 2),
            Scalar::ratio(1, 2),
            Scalar::ratio(3, 4),
            Scalar::ratio(-1, 5),
            Scalar::ratio(-1, 4),
        )
        .unwrap(),
        // Boundary q = 1 - 2*sqrt(sigma*tau) with theta = eta = 0.
        QHParams::new(Scalar::ratio(1, 2), Scalar::ratio(1, 2), zero(), zero(), zero()).unwrap(),
        // No closed form applies.
        QHParams::new(
            Scalar::ratio(1, 3),
            Scalar::ratio(1, 5),
            Scalar::one(Mode::Exact),
            zero(),
            Scalar::ratio(1, 7),
        )
        .unwrap(),
    ];

    for p in points {
        let case = detect_case(&p);
        println!(
            "sigma = {}, tau = {}, theta = {}, eta = {}, q = {}",
            p.sigma, p.tau, p.theta, p.eta, p.q
        );
        println!("   detected case: {case}");
        match verify_against_recursion(case, &p, 32) {
            Ok(dev) => {
                println!("   closed form vs recursion, N = 32: max deviation = {dev}");
                let table = closed_table(case, &p, 8).unwrap();
                let chi: Vec<String> = (1..=8).map(|k| table.chi_at(k).to_string()).collect();
                println!("   chi_1..8 = {}", chi.join(", "));
            }
            Err(e) => println!("   {e}"),
        }
        println!();
    }
}
