//! Build the rescaled orthogonal polynomials, extract moments from the
//! truncated Jacobi matrix, and check Hankel positivity.
//!
//! ```sh
//! cargo run --example polynomials_and_moments
//! ```

use qharness::poly::{
    hankel_determinant, jacobi_data, m_polynomials, moments, symmetry_check, xt_moment,
};
use qharness::scalar::{Mode, Scalar};
use qharness::solver::{CoefficientTable, QHParams};

fn render_poly(coeffs: &[Scalar]) -> String {
    let mut terms = Vec::new();
    for (k, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let var = match k {
            0 => String::new(),
            1 => "y".to_string(),
            _ => format!("y^{k}"),
        };
        terms.push(match (k, c.to_string().as_str()) {
            (0, s) => s.to_string(),
            (_, "1") => var,
            (_, "-1") => format!("-{var}"),
            (_, s) => format!("{s} {var}"),
        });
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ").replace("+ -", "- ")
    }
}

fn main() {
    let p = QHParams::new(
        Scalar::ratio(1, 4),
        Scalar::ratio(1, 4),
        Scalar::ratio(1, 2),
        Scalar::ratio(1, 2),
        Scalar::zero(Mode::Exact),
    )
    .unwrap();
    let table = CoefficientTable::build(&p, 12).unwrap();
    let t = Scalar::from_int(4, Mode::Exact);
    let jd = jacobi_data(&table, &t).unwrap();

    println!("three-term recurrence at t = {t}:");
    for n in 0..6 {
        let c = if n >= 1 {
            jd.c_hat[n].to_string()
        } else {
            "-".to_string()
        };
        println!("   n = {n}: b_n = {}, c_hat_n = {c}", jd.b[n]);
    }

    let ps = m_polynomials(&jd);
    println!("\nmonic polynomials:");
    for n in 0..=5 {
        println!("   M_{n} = {}", render_poly(&ps.coeffs[n]));
    }

    println!("\nmoments of the orthogonality measure:");
    for k in 0..=6 {
        println!("   m_{k} = {}", moments(&jd, k).unwrap());
    }
    println!(
        "process scale: E[X_t] = {}, E[X_t^2] = {} (equals t)",
        xt_moment(&jd, 1).unwrap(),
        xt_moment(&jd, 2).unwrap()
    );

    println!("\nHankel determinants (positive = positive-definite moment functional):");
    for k in 0..=4 {
        println!("   order {k}: {}", hankel_determinant(&jd, k).unwrap());
    }

    // sigma = tau and theta = eta: replacing t by 1/t leaves everything
    // unchanged.
    println!(
        "\ntime-inversion symmetry (t <-> 1/t): {:?}",
        symmetry_check(&p, 32).unwrap()
    );
}
