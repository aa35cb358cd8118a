//! Conditional-variance quadratic form coefficients and the coefficient
//! identity tying them to the recurrence system.
//!
//! The six coefficients describe the quadratic form
//! `Q_{s,t,u}(x, y) = A x^2 + B x y + C y^2 + D x + E y + F`
//! for conditioning times `0 <= s <= t <= u`.  All share the denominator
//! `(u - s) * (u(1 + sigma*s) + tau - q*s)` except `F`, which drops the
//! `(u - s)` factor.
//!
//! [`identity_residual`] evaluates the leading (degree `n+2`) coefficient
//! identity extracted from the conditional second-moment expansion; it
//! vanishes identically on bundles that solve the recurrence system, which
//! ties the appendix form to the solver end to end.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::solver::{QHParams, SequenceBundle};

/// The six quadratic-form coefficients at `(s, t, u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QFormCoeffs {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
    pub d: Scalar,
    pub e: Scalar,
    pub f: Scalar,
}

/// Evaluates the six coefficients:
///
/// ```text
/// A = (u-t)(u(1+sigma t)+tau-q t) / (u-s)(u(1+sigma s)+tau-q s)
/// B = (u-t)(t-s)(1+q)            / (u-s)(u(1+sigma s)+tau-q s)
/// C = (t-s)(t(1+sigma s)+tau-q s) / (u-s)(u(1+sigma s)+tau-q s)
/// D = (u-t)(t-s)(u eta - theta)   / (u-s)(u(1+sigma s)+tau-q s)
/// E = (u-t)(t-s)(theta - s eta)   / (u-s)(u(1+sigma s)+tau-q s)
/// F = (u-t)(t-s)                  / (u(1+sigma s)+tau-q s)
/// ```
///
/// Requires `0 <= s <= t <= u` with `u > s`; errors on a vanishing
/// denominator.
pub fn q_form_coeffs(s: &Scalar, t: &Scalar, u: &Scalar, p: &QHParams) -> Result<QFormCoeffs> {
    if s.is_negative() || t < s || u < t {
        return Err(Error::Domain(format!(
            "q_form_coeffs requires 0 <= s <= t <= u, got ({s}, {t}, {u})"
        )));
    }
    if u == s {
        return Err(Error::Domain(
            "q_form_coeffs: degenerate interval u = s".into(),
        ));
    }
    let one = Scalar::one(p.mode());
    // kernel(lead, inner) = lead*(1 + sigma*inner) + tau - q*inner.
    let kernel = |lead: &Scalar, inner: &Scalar| -> Scalar {
        &(&(lead * &(&one + &(&p.sigma * inner))) + &p.tau) - &(&p.q * inner)
    };
    let denom_kernel = kernel(u, s);
    if denom_kernel.is_zero() {
        return Err(Error::Pole(
            "q_form_coeffs: vanishing denominator u(1+sigma s)+tau-q s".into(),
        ));
    }
    let u_minus_s = u - s;
    let u_minus_t = u - t;
    let t_minus_s = t - s;
    let denom = &u_minus_s * &denom_kernel;
    let a = (&u_minus_t * &kernel(u, t)).checked_div(&denom, "q_form A")?;
    let b = (&(&u_minus_t * &t_minus_s) * &(&one + &p.q)).checked_div(&denom, "q_form B")?;
    let c = (&t_minus_s * &kernel(t, s)).checked_div(&denom, "q_form C")?;
    let d = (&(&u_minus_t * &t_minus_s) * &(&(u * &p.eta) - &p.theta))
        .checked_div(&denom, "q_form D")?;
    let e = (&(&u_minus_t * &t_minus_s) * &(&p.theta - &(s * &p.eta)))
        .checked_div(&denom, "q_form E")?;
    let f = (&u_minus_t * &t_minus_s).checked_div(&denom_kernel, "q_form F")?;
    Ok(QFormCoeffs { a, b, c, d, e, f })
}

/// `a_n(t) = alpha_n * t + beta_n`, the leading recurrence coefficient as a
/// function of time.
pub fn a_coefficient(bundle: &SequenceBundle, n: usize, t: &Scalar) -> Scalar {
    &(&bundle.alpha[n] * t) + &bundle.beta[n]
}

/// Residual of the barycentric interpolation
/// `a_n(t) = ((u-t) a_n(s) + (t-s) a_n(u)) / (u-s)`,
/// which holds exactly because `a_n` is affine in `t`.
pub fn barycentric_residual(
    bundle: &SequenceBundle,
    n: usize,
    s: &Scalar,
    t: &Scalar,
    u: &Scalar,
) -> Scalar {
    let lhs = &(u - s) * &a_coefficient(bundle, n, t);
    let rhs = &(&(u - t) * &a_coefficient(bundle, n, s))
        + &(&(t - s) * &a_coefficient(bundle, n, u));
    &lhs - &rhs
}

/// Evaluates the degree-`n+2` coefficient identity
///
/// ```text
/// a_n(t) a_{n+1}(t) = A a_n(s) a_{n+1}(s) + B a_n(u) a_{n+1}(s)
///                     + C a_n(u) a_{n+1}(u)
/// ```
///
/// as left-minus-right.  Exactly zero in exact mode when the bundle solves
/// the recurrence system.  Requires `0 <= s < t < u` and a bundle valid at
/// `n` and `n+1`.
pub fn identity_residual(
    p: &QHParams,
    bundle: &SequenceBundle,
    n: usize,
    s: &Scalar,
    t: &Scalar,
    u: &Scalar,
) -> Result<Scalar> {
    if !(s < t && t < u) || s.is_negative() {
        return Err(Error::Domain(format!(
            "identity_residual requires 0 <= s < t < u, got ({s}, {t}, {u})"
        )));
    }
    if bundle.horizon < n + 1 {
        return Err(Error::Domain(format!(
            "bundle horizon {} too short for index {n}",
            bundle.horizon
        )));
    }
    let q = q_form_coeffs(s, t, u, p)?;
    let lhs = &a_coefficient(bundle, n, t) * &a_coefficient(bundle, n + 1, t);
    let rhs = &(&(&q.a * &(&a_coefficient(bundle, n, s) * &a_coefficient(bundle, n + 1, s)))
        + &(&q.b * &(&a_coefficient(bundle, n, u) * &a_coefficient(bundle, n + 1, s))))
        + &(&q.c * &(&a_coefficient(bundle, n, u) * &a_coefficient(bundle, n + 1, u)));
    Ok(&lhs - &rhs)
}
