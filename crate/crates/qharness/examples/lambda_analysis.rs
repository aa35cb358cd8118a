//! Explore the lambda iteration: regimes, fixed points, contraction rates,
//! and sign changes.
//!
//! ```sh
//! cargo run --example lambda_analysis
//! ```

use qharness::lambda::{
    contraction_constant, fixed_point, lambda_sequence, limit_ratio_d, regime_classify,
    sign_changes, MobiusParams,
};
use qharness::scalar::Scalar;

fn main() {
    // Three archetypal points: strict (geometric convergence), boundary
    // (algebraic convergence), oscillatory (no fixed point at all).
    let points = [
        ("strict", Scalar::ratio(1, 2), Scalar::zero(qharness::Mode::Exact)),
        ("boundary", Scalar::zero(qharness::Mode::Exact), Scalar::ratio(1, 4)),
        ("oscillatory", Scalar::ratio(9, 10), Scalar::ratio(1, 25)),
    ];

    for (label, q, z) in points {
        let p = MobiusParams::new(q.clone(), z.clone()).unwrap();
        println!("== {label}: q = {q}, z = {z}");
        println!("   regime: {}", regime_classify(&p));

        let seq = lambda_sequence(&p, 12);
        let rendered: Vec<String> = seq.values.iter().map(|v| v.to_string()).collect();
        println!("   lambda_0..12: {}", rendered.join(", "));

        match fixed_point(&p) {
            Ok(Some(y)) => {
                println!("   fixed point y = {y}");
                if let Ok(c) = contraction_constant(&p) {
                    println!("   contraction constant C = {c}");
                }
                if let Ok(d) = limit_ratio_d(&p) {
                    println!("   limit ratio D = {d}");
                }
            }
            Ok(None) => {
                let long = lambda_sequence(&p, 200);
                println!(
                    "   no fixed point; {} sign changes in 200 steps",
                    sign_changes(&long)
                );
            }
            Err(e) => println!("   fixed point: {e}"),
        }
        println!();
    }

    // Convergence speed at the strict point: the error shrinks like C^n.
    let p = MobiusParams::new(Scalar::ratio(1, 2), Scalar::zero(qharness::Mode::Exact)).unwrap();
    let y = fixed_point(&p).unwrap().unwrap();
    let c = contraction_constant(&p).unwrap();
    let seq = lambda_sequence(&p, 16);
    println!("error envelope at q = 1/2, z = 0 (C = {c}):");
    let mut envelope = y.clone();
    for (n, v) in seq.values.iter().enumerate().step_by(4) {
        println!(
            "   n = {n:>2}: |lambda_n - y| = {}  <=  C^n*y = {}",
            (v - &y).abs(),
            envelope
        );
        for _ in 0..4 {
            envelope = &envelope * &c;
        }
    }
}
