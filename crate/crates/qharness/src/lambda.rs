//! The lambda sequence and the fractional-linear map that drives it.
//!
//! The map is `f(x | q, z) = (1 + q*x) / (1 - z*x)` with `z >= 0` standing
//! for the product `sigma*tau`.  Iterating it from 0 produces the lambda
//! sequence on which every other coefficient formula depends.  This module
//! classifies the `(q, z)` plane, locates the fixed point, quantifies the
//! contraction rate, and counts sign changes in the non-convergent regime.
//!
//! All comparisons against the regime boundaries `1 +/- 2*sqrt(z)` are done
//! as sign tests of `(1 -+ q)^2 - 4z`, so rational inputs classify exactly
//! without forming the square root.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Parameters of the map `f(x | q, z) = (1 + q*x)/(1 - z*x)`.
///
/// `z` plays the role of `sigma*tau`, hence `z >= 0`.  Construction also
/// requires `-1 < q <= 1 + 2*sqrt(z)`: the model's parameter set.
#[derive(Clone, Debug, PartialEq)]
pub struct MobiusParams {
    q: Scalar,
    z: Scalar,
}

impl MobiusParams {
    pub fn new(q: Scalar, z: Scalar) -> Result<Self> {
        if z.is_negative() {
            return Err(Error::InvalidParameter(format!("z = {z} must be >= 0")));
        }
        let neg_one = Scalar::from_int(-1, q.mode());
        if q <= neg_one {
            return Err(Error::InvalidParameter(format!("q = {q} must be > -1")));
        }
        if exceeds_upper_boundary(&q, &z) {
            return Err(Error::InvalidParameter(format!(
                "q = {q} exceeds 1 + 2*sqrt(z) for z = {z}"
            )));
        }
        Ok(MobiusParams { q, z })
    }

    pub fn q(&self) -> &Scalar {
        &self.q
    }

    pub fn z(&self) -> &Scalar {
        &self.z
    }

    pub fn regime(&self) -> RegimeTag {
        regime_classify(self)
    }
}

/// Where a `(q, z)` point sits relative to the admissibility boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RegimeTag {
    /// `q < 1 - 2*sqrt(z)`: lambda converges geometrically to the fixed point.
    StrictAdmissible,
    /// `q = 1 - 2*sqrt(z)`: lambda still converges, but only algebraically.
    Boundary,
    /// `1 - 2*sqrt(z) < q <= 1 + 2*sqrt(z)`: no fixed point, lambda changes
    /// sign infinitely often.
    Oscillatory,
    /// Outside the model: `q <= -1`, `q > 1 + 2*sqrt(z)`, or `z < 0`.
    OutOfRange,
}

impl RegimeTag {
    pub fn as_str(self) -> &'static str {
        match self {
            RegimeTag::StrictAdmissible => "strict-admissible",
            RegimeTag::Boundary => "boundary",
            RegimeTag::Oscillatory => "oscillatory",
            RegimeTag::OutOfRange => "out-of-range",
        }
    }

    /// Raw partition of the `(q, z)` plane.  Exact for rational inputs.
    pub fn classify(q: &Scalar, z: &Scalar) -> RegimeTag {
        if z.is_negative() {
            return RegimeTag::OutOfRange;
        }
        let one = Scalar::one(q.mode());
        let neg_one = Scalar::from_int(-1, q.mode());
        if *q <= neg_one || exceeds_upper_boundary(q, z) {
            return RegimeTag::OutOfRange;
        }
        if *q > one {
            return RegimeTag::Oscillatory;
        }
        if *q == one {
            return if z.is_zero() {
                RegimeTag::Boundary
            } else {
                RegimeTag::Oscillatory
            };
        }
        // q < 1: compare (1-q)^2 with 4z.
        let disc = discriminant(q, z);
        match disc.signum() {
            1 => RegimeTag::StrictAdmissible,
            0 => RegimeTag::Boundary,
            _ => RegimeTag::Oscillatory,
        }
    }
}

impl std::fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `(1 - q)^2 - 4z`, the quantity whose sign separates the regimes.
pub fn discriminant(q: &Scalar, z: &Scalar) -> Scalar {
    let one = Scalar::one(q.mode());
    let four = Scalar::from_int(4, q.mode());
    let d = &one - q;
    &(&d * &d) - &(&four * z)
}

fn exceeds_upper_boundary(q: &Scalar, z: &Scalar) -> bool {
    let one = Scalar::one(q.mode());
    if *q <= one {
        return false;
    }
    let four = Scalar::from_int(4, q.mode());
    let d = q - &one;
    &d * &d > &four * z
}

/// The lambda sequence together with where (if anywhere) the iteration hit
/// the pole of the map.
#[derive(Clone, Debug)]
pub struct LambdaSeq {
    /// `lambda_0 .. lambda_N` (shorter if truncated).
    pub values: Vec<Scalar>,
    pub params: MobiusParams,
    /// Index of the first lambda that could not be computed because
    /// `1 - z*lambda` vanished (or the float iterate stopped being finite).
    pub truncated_at: Option<usize>,
}

impl LambdaSeq {
    pub fn is_complete(&self) -> bool {
        self.truncated_at.is_none()
    }
}

/// One application of the map.  Errors when `1 - z*x = 0` (the iteration
/// hit the Möbius singularity).
pub fn lambda_step(x: &Scalar, p: &MobiusParams) -> Result<Scalar> {
    let one = Scalar::one(x.mode());
    let numer = &one + &(p.q() * x);
    let denom = &one - &(p.z() * x);
    numer.checked_div(&denom, "lambda_step")
}

/// Iterates the map from `lambda_0 = 0` for `n` steps, producing
/// `lambda_0 .. lambda_n`.  A pole stops the iteration and is recorded in
/// the result rather than raised, so oscillatory-regime exploration can
/// inspect the partial sequence.
pub fn lambda_sequence(p: &MobiusParams, n: usize) -> LambdaSeq {
    let mode = p.q().mode();
    let mut values = Vec::with_capacity(n + 1);
    values.push(Scalar::zero(mode));
    let mut truncated_at = None;
    for k in 0..n {
        match lambda_step(&values[k], p) {
            Ok(next) => values.push(next),
            Err(_) => {
                truncated_at = Some(k + 1);
                break;
            }
        }
    }
    LambdaSeq {
        values,
        params: p.clone(),
        truncated_at,
    }
}

/// The fixed point `y(q, z) = 2 / (1 - q + sqrt((1-q)^2 - 4z))` of the map.
///
/// Returns `None` when `(1-q)^2 < 4z` (no fixed point exists).  In exact
/// mode an irrational square root is an error; re-run in float mode.
///
/// Substituting into `y*(1 - z*y) = 1 + q*y` shows the fixed point is a
/// root of `z*y^2 - (1-q)*y + 1 = 0`; the sign of the linear term matters
/// and is pinned by a test.
pub fn fixed_point(p: &MobiusParams) -> Result<Option<Scalar>> {
    let disc = discriminant(p.q(), p.z());
    if disc.is_negative() {
        return Ok(None);
    }
    let root = disc.sqrt("fixed_point discriminant")?;
    let one = Scalar::one(p.q().mode());
    let two = Scalar::from_int(2, p.q().mode());
    let denom = &(&one - p.q()) + &root;
    if denom.is_zero() {
        // q = 1, z = 0: the map is x -> 1 + x and the fixed point escapes
        // to infinity.
        return Ok(None);
    }
    Ok(Some(two.checked_div(&denom, "fixed_point")?))
}

/// Contraction constant `C(q, z)` of the map in the strict admissible
/// regime `q < 1 - 2*sqrt(z)`, satisfying
/// `|lambda_n - y| <= C^n * |lambda_0 - y|` along the iteration.
///
/// * `q + z > 0`: `C = (q+z) / (1 - sqrt(z))^2`, always `< 1` here.
/// * `q + z = 0`: the map is constant, `C = 0`.
/// * `q + z < 0`: `C = 2|q| / (1 + q + sqrt((1-q)^2 - 4z))`, the sharp
///   Lipschitz constant `|q| / (1 - z*y)` of the map on `[0, -1/q]`.  For
///   `q < -1/2` with `z` close to `-q` this sharp constant may reach 1 even
///   though the even and odd subsequences still contract; everywhere else
///   it is `< 1`.
pub fn contraction_constant(p: &MobiusParams) -> Result<Scalar> {
    if regime_classify(p) != RegimeTag::StrictAdmissible {
        return Err(Error::Regime(
            "contraction_constant requires q < 1 - 2*sqrt(z)".into(),
        ));
    }
    let mode = p.q().mode();
    let one = Scalar::one(mode);
    let qpz = p.q() + p.z();
    match qpz.signum() {
        0 => Ok(Scalar::zero(mode)),
        1 => {
            let sqrt_z = p.z().sqrt("contraction_constant sqrt(z)")?;
            let d = &one - &sqrt_z;
            qpz.checked_div(&(&d * &d), "contraction_constant")
        }
        _ => {
            let root = discriminant(p.q(), p.z()).sqrt("contraction_constant discriminant")?;
            let two_abs_q = &Scalar::from_int(2, mode) * &p.q().abs();
            let denom = &(&one + p.q()) + &root;
            two_abs_q.checked_div(&denom, "contraction_constant")
        }
    }
}

/// Limit `D(q, z) = 4(q+z) / (1 + q + sqrt((1-q)^2 - 4z))^2` of the ratio
/// driving the chi recursion.  `|D| < 1` strictly inside the regime and
/// `|D| = 1` on the boundary when `q + z > 0`.
pub fn limit_ratio_d(p: &MobiusParams) -> Result<Scalar> {
    match regime_classify(p) {
        RegimeTag::StrictAdmissible | RegimeTag::Boundary => {}
        _ => {
            return Err(Error::Regime(
                "limit_ratio_d requires q <= 1 - 2*sqrt(z)".into(),
            ))
        }
    }
    let mode = p.q().mode();
    let one = Scalar::one(mode);
    let four = Scalar::from_int(4, mode);
    let root = discriminant(p.q(), p.z()).sqrt("limit_ratio_d discriminant")?;
    let denom = &(&one + p.q()) + &root;
    let numer = &four * &(p.q() + p.z());
    numer.checked_div(&(&denom * &denom), "limit_ratio_d")
}

/// Number of indices `n` with `lambda_n * lambda_{n+1} < 0` in the computed
/// range.
pub fn sign_changes(seq: &LambdaSeq) -> usize {
    seq.values
        .windows(2)
        .filter(|w| (&w[0] * &w[1]).is_negative())
        .count()
}

/// Classifies the parameters of `p`.  Never returns
/// [`RegimeTag::OutOfRange`] because construction already rejects such
/// points; use [`RegimeTag::classify`] for raw values.
pub fn regime_classify(p: &MobiusParams) -> RegimeTag {
    RegimeTag::classify(p.q(), p.z())
}
