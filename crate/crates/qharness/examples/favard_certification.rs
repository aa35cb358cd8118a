//! Certify positivity of the orthogonality measure without sampling time:
//! the t-free Favard criterion, its empirical t-grid counterpart, and the
//! boundedness proxy.
//!
//! ```sh
//! cargo run --example favard_certification
//! ```

use qharness::poly::{boundedness_check, default_t_grid, favard_check, favard_grid_sample};
use qharness::scalar::{Mode, Scalar};
use qharness::solver::{CoefficientTable, QHParams};

fn main() {
    let zero = || Scalar::zero(Mode::Exact);
    let points = vec![
        (
            "generic admissible",
            QHParams::new(
                Scalar::ratio(1, 3),
                Scalar::ratio(1, 5),
                Scalar::ratio(1, 2),
                Scalar::ratio(-1, 4),
                Scalar::ratio(1, 7),
            )
            .unwrap(),
        ),
        (
            "theta*eta = -2 at q = 1 (fails at n = 2)",
            QHParams::new(
                zero(),
                zero(),
                Scalar::from_int(2, Mode::Exact),
                Scalar::from_int(-1, Mode::Exact),
                Scalar::one(Mode::Exact),
            )
            .unwrap(),
        ),
        (
            "oscillatory (lambda changes sign)",
            QHParams::new(
                Scalar::ratio(1, 5),
                Scalar::ratio(1, 5),
                zero(),
                zero(),
                Scalar::ratio(9, 10),
            )
            .unwrap(),
        ),
    ];

    let grid = default_t_grid();
    for (label, p) in points {
        println!("== {label}");
        let table = CoefficientTable::build(&p, 64).unwrap();
        let report = favard_check(&p, &table);
        match report.first_failure {
            None => println!("   analytic certificate: positive for every t > 0"),
            Some(n) => {
                let entry = &report.reasons[n - 1];
                println!(
                    "   analytic certificate: FAILS at n = {n} \
                     (sign chi = {}, sign sigma*lambda = {}, sign tau*lambda = {})",
                    entry.chi_sign, entry.sigma_lambda_sign, entry.tau_lambda_sign
                );
            }
        }
        let sampled = favard_grid_sample(&p, &table, &grid);
        println!("   41-point t-grid sampling agrees: {}", sampled == report.ok);

        let bounded = boundedness_check(&table, &Scalar::one(Mode::Exact)).unwrap();
        println!(
            "   boundedness proxy at t = 1: {} (sup |b| = {:.6}, sup |c_hat| = {:.6})",
            if bounded.bounded { "bounded" } else { "unbounded or undecided" },
            bounded.sup_b,
            bounded.sup_c_hat
        );
        println!();
    }
}
