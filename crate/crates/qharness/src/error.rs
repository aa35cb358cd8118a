//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by parameter validation, regime checks, and numeric
/// evaluation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A parameter violates its admissibility constraint (for example
    /// `sigma < 0` or `q > 1 + 2*sqrt(sigma*tau)`).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An operation was invoked outside the parameter regime it requires.
    #[error("regime violation: {0}")]
    Regime(String),

    /// A denominator vanished: the Möbius pole, a zero chi denominator, or
    /// a degenerate quadratic-form denominator.
    #[error("numeric pole: {0}")]
    Pole(String),

    /// `det A_n = 0` while solving the 2x2 step system.
    #[error("singular step matrix at index {index}")]
    SingularMatrix { index: usize },

    /// A closed form was requested for parameters that do not satisfy the
    /// hypothesis of the case.
    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),

    /// Exact mode needed a square root that is not rational.  Re-run the
    /// computation in float mode or choose parameters with rational roots.
    #[error("irrational square root in exact mode: {0}")]
    IrrationalSqrt(String),

    /// A float-mode computation produced NaN or an infinity.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// An argument is outside the operation's domain (for example `t <= 0`).
    #[error("domain error: {0}")]
    Domain(String),

    /// The lambda iteration hit its pole before reaching the requested
    /// horizon, so dependent sequences cannot be completed.
    #[error("lambda sequence truncated at index {at}: pole reached before requested horizon")]
    Truncated { at: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
