//! Dual-mode scalar arithmetic.
//!
//! Every quantity in the crate is a [`Scalar`], either an arbitrary-precision
//! rational (exact mode) or an IEEE double (float mode).  The mode is chosen
//! once per computation session, typically when parameters are parsed; all
//! identity checks of the verification suites run in exact mode, while float
//! mode exists for sweeps over irrational parameter points (boundary values
//! with irrational `sqrt(sigma*tau)`, log-spaced time grids, and so on).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Arithmetic mode of a computation session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(Error::InvalidParameter(format!(
                "unknown mode {other:?}, expected \"exact\" or \"float\""
            ))),
        }
    }
}

/// A number in one of the two arithmetic modes.
///
/// Ring operations never mix modes in correct code (the mode is fixed per
/// session); if they do, the result is promoted to float, which keeps the
/// behaviour IEEE-consistent.  Debug builds assert on mixing.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn zero(mode: Mode) -> Self {
        Scalar::from_int(0, mode)
    }

    pub fn one(mode: Mode) -> Self {
        Scalar::from_int(1, mode)
    }

    pub fn from_int(n: i64, mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::from_integer(BigInt::from(n))),
            Mode::Float => Scalar::Float(n as f64),
        }
    }

    /// Exact rational `num/den`.  Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_f64(x: f64) -> Self {
        Scalar::Float(x)
    }

    /// Rational `num/den` materialised in `mode`.  Panics if `den == 0`.
    pub fn ratio_in(num: i64, den: i64, mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::ratio(num, den),
            Mode::Float => Scalar::Float(num as f64 / den as f64),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    /// Parses `"p/q"`, an integer, or a decimal string.  In exact mode a
    /// decimal is read exactly as a rational (`0.25` becomes `1/4`), so
    /// exact-mode guarantees start at the parse boundary.
    pub fn parse(s: &str, mode: Mode) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::InvalidParameter("empty numeric literal".into()));
        }
        match mode {
            Mode::Float => {
                if let Some((num, den)) = s.split_once('/') {
                    let n: f64 = num
                        .trim()
                        .parse()
                        .map_err(|_| bad_literal(s))?;
                    let d: f64 = den
                        .trim()
                        .parse()
                        .map_err(|_| bad_literal(s))?;
                    if d == 0.0 {
                        return Err(Error::Pole(format!("zero denominator in {s:?}")));
                    }
                    Ok(Scalar::Float(n / d))
                } else {
                    s.parse::<f64>()
                        .map(Scalar::Float)
                        .map_err(|_| bad_literal(s))
                }
            }
            Mode::Exact => {
                if let Some((num, den)) = s.split_once('/') {
                    let n = BigInt::from_str(num.trim()).map_err(|_| bad_literal(s))?;
                    let d = BigInt::from_str(den.trim()).map_err(|_| bad_literal(s))?;
                    if d.is_zero() {
                        return Err(Error::Pole(format!("zero denominator in {s:?}")));
                    }
                    Ok(Scalar::Exact(BigRational::new(n, d)))
                } else if let Some((int_part, frac_part)) = s.split_once('.') {
                    let int_part = if int_part.is_empty() || int_part == "-" {
                        format!("{int_part}0")
                    } else {
                        int_part.to_string()
                    };
                    let whole = BigInt::from_str(&int_part).map_err(|_| bad_literal(s))?;
                    if frac_part.is_empty() {
                        return Ok(Scalar::Exact(BigRational::from_integer(whole)));
                    }
                    if !frac_part.bytes().all(|b| b.is_ascii_digit()) {
                        return Err(bad_literal(s));
                    }
                    let digits = BigInt::from_str(frac_part).map_err(|_| bad_literal(s))?;
                    let scale = BigInt::from(10).pow(frac_part.len() as u32);
                    let frac = BigRational::new(digits, scale);
                    let whole = BigRational::from_integer(whole);
                    let value = if s.starts_with('-') {
                        whole - frac
                    } else {
                        whole + frac
                    };
                    Ok(Scalar::Exact(value))
                } else {
                    BigInt::from_str(s)
                        .map(|n| Scalar::Exact(BigRational::from_integer(n)))
                        .map_err(|_| bad_literal(s))
                }
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Float(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_negative(),
            Scalar::Float(x) => *x < 0.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_positive(),
            Scalar::Float(x) => *x > 0.0,
        }
    }

    /// -1, 0, or +1.  NaN reports 0; callers that care run [`ensure_finite`]
    /// first.
    ///
    /// [`ensure_finite`]: Scalar::ensure_finite
    pub fn signum(&self) -> i8 {
        if self.is_negative() {
            -1
        } else if self.is_zero() {
            0
        } else if self.is_positive() {
            1
        } else {
            0
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float(x) => Scalar::Float(x.abs()),
        }
    }

    pub fn powi(&self, k: u32) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(num::pow::pow(r.clone(), k as usize)),
            Scalar::Float(x) => Scalar::Float(x.powi(k as i32)),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Scalar::Exact(_) => true,
            Scalar::Float(x) => x.is_finite(),
        }
    }

    /// Surfaces float-mode NaN/infinity as an error, per the float-mode
    /// contract.
    pub fn ensure_finite(&self, context: &str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite(format!("{context} produced {self}")))
        }
    }

    /// Division with an explicit pole check.  Use this wherever a vanishing
    /// denominator is a legitimate runtime possibility; the `/` operator is
    /// reserved for denominators proven nonzero.
    pub fn checked_div(&self, rhs: &Scalar, context: &str) -> Result<Scalar> {
        if rhs.is_zero() {
            return Err(Error::Pole(format!("{context}: division by zero")));
        }
        let out = self / rhs;
        out.ensure_finite(context)?;
        Ok(out)
    }

    /// Square root.  Float mode evaluates `f64::sqrt`; exact mode succeeds
    /// only when the value is the square of a rational.
    pub fn sqrt(&self, context: &str) -> Result<Scalar> {
        if self.is_negative() {
            return Err(Error::Domain(format!(
                "{context}: square root of negative value {self}"
            )));
        }
        match self {
            Scalar::Float(x) => Ok(Scalar::Float(x.sqrt())),
            Scalar::Exact(r) => match exact_sqrt(r) {
                Some(root) => Ok(Scalar::Exact(root)),
                None => Err(Error::IrrationalSqrt(format!(
                    "{context}: {self} is not the square of a rational"
                ))),
            },
        }
    }

    /// True when the exact value has a rational square root (always true in
    /// float mode for nonnegative values).
    pub fn has_rational_sqrt(&self) -> bool {
        match self {
            Scalar::Float(x) => *x >= 0.0,
            Scalar::Exact(r) => !r.is_negative() && exact_sqrt(r).is_some(),
        }
    }

    /// Converts an exact scalar to a float one; float scalars pass through.
    pub fn to_float_mode(&self) -> Scalar {
        Scalar::Float(self.to_f64())
    }
}

fn bad_literal(s: &str) -> Error {
    Error::InvalidParameter(format!(
        "cannot parse {s:?} as a number (expected \"p/q\", integer, or decimal)"
    ))
}

fn exact_sqrt(r: &BigRational) -> Option<BigRational> {
    debug_assert!(!r.is_negative());
    let num = r.numer();
    let den = r.denom();
    let sn = num.sqrt();
    let sd = den.sqrt();
    if &(&sn * &sn) == num && &(&sd * &sd) == den {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a $op b),
                    (a, b) => {
                        debug_assert!(false, "mixed-mode scalar arithmetic: {a:?} vs {b:?}");
                        Scalar::Float(a.to_f64() $op b.to_f64())
                    }
                }
            }
        }

        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }

        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }

        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);

impl Div for &Scalar {
    type Output = Scalar;

    /// Plain division for denominators proven nonzero.  Panics on an exact
    /// zero divisor; float division by zero follows IEEE (and is caught by
    /// the `ensure_finite` checks downstream).
    fn div(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                assert!(!b.is_zero(), "exact division by zero");
                Scalar::Exact(a / b)
            }
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a / b),
            (a, b) => {
                debug_assert!(false, "mixed-mode scalar arithmetic: {a:?} vs {b:?}");
                Scalar::Float(a.to_f64() / b.to_f64())
            }
        }
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl Div<&Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        &self / rhs
    }
}

impl Div<Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        self / &rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Float(a), Scalar::Float(b)) => a == b,
            (a, b) => a.to_f64() == b.to_f64(),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.partial_cmp(b),
            (Scalar::Float(a), Scalar::Float(b)) => a.partial_cmp(b),
            (a, b) => a.to_f64().partial_cmp(&b.to_f64()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Scalar {
    /// Exact values serialize losslessly as `"p/q"` strings; float values as
    /// JSON numbers.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(_) => serializer.serialize_str(&self.to_string()),
            Scalar::Float(x) => serializer.serialize_f64(*x),
        }
    }
}
