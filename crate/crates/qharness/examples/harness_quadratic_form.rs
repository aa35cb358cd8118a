//! Evaluate the conditional-variance quadratic form coefficients and the
//! coefficient identity that ties them to the recurrence system.
//!
//! ```sh
//! cargo run --example harness_quadratic_form
//! ```

use qharness::qform::{barycentric_residual, identity_residual, q_form_coeffs};
use qharness::scalar::{Mode, Scalar};
use qharness::solver::{reconstruct_six_sequences, QHParams};

fn main() {
    let p = QHParams::new(
        Scalar::ratio(1, 3),
        Scalar::ratio(1, 5),
        Scalar::ratio(1, 2),
        Scalar::ratio(-1, 4),
        Scalar::ratio(1, 7),
    )
    .unwrap();
    let (s, t, u) = (
        Scalar::one(Mode::Exact),
        Scalar::from_int(2, Mode::Exact),
        Scalar::from_int(3, Mode::Exact),
    );

    let c = q_form_coeffs(&s, &t, &u, &p).unwrap();
    println!("quadratic form at (s, t, u) = ({s}, {t}, {u}):");
    println!("   A = {}", c.a);
    println!("   B = {}", c.b);
    println!("   C = {}", c.c);
    println!("   D = {}", c.d);
    println!("   E = {}", c.e);
    println!("   F = {}", c.f);

    // Conditioning at an endpoint collapses the form onto that endpoint.
    let at_s = q_form_coeffs(&s, &s, &u, &p).unwrap();
    let at_u = q_form_coeffs(&s, &u, &u, &p).unwrap();
    println!("\nboundary t = s: (A, B, C) = ({}, {}, {})", at_s.a, at_s.b, at_s.c);
    println!("boundary t = u: (A, B, C) = ({}, {}, {})", at_u.a, at_u.b, at_u.c);

    // The leading coefficient identity vanishes on every solver bundle.
    let bundle = reconstruct_six_sequences(&p, 18).unwrap();
    println!("\ncoefficient identity residuals (must be exactly 0):");
    for n in [0usize, 4, 8, 16] {
        let r = identity_residual(&p, &bundle, n, &s, &t, &u).unwrap();
        println!("   n = {n:>2}: {r}");
        assert!(r.is_zero());
    }

    // a_n(t) is affine in t, so barycentric interpolation is exact.
    println!("\nbarycentric residuals of a_n(t) (must be exactly 0):");
    for n in [0usize, 5, 10] {
        let r = barycentric_residual(&bundle, n, &s, &t, &u);
        println!("   n = {n:>2}: {r}");
        assert!(r.is_zero());
    }
}
