//! Solver, verifier, and classifier for the five-recurrence coefficient
//! system behind martingale orthogonal polynomials of quadratic harnesses.
//!
//! A quadratic harness is a centered process with covariance `min(s, t)`
//! whose conditional first and second moments given the nearest past and
//! future values are affine and quadratic respectively.  Its martingale
//! orthogonal polynomials have three-term recurrence coefficients that are
//! affine in time, and the six coefficient sequences involved satisfy a
//! coupled system of five recurrences in the model parameters
//! `(sigma, tau, theta, eta, q)`.  This crate:
//!
//! * solves that system numerically (exactly, over arbitrary-precision
//!   rationals, or in IEEE doubles) — [`solver`];
//! * analyzes the fractional-linear iteration that drives it: regimes,
//!   fixed points, contraction rates, sign changes — [`lambda`];
//! * evaluates the known closed forms and cross-checks them against the
//!   recursion — [`closed_forms`];
//! * builds the rescaled orthogonal polynomials, certifies positivity of
//!   the orthogonality measure without sampling time, and extracts moments
//!   — [`poly`];
//! * evaluates the conditional-variance quadratic form and its coefficient
//!   identity — [`qform`];
//! * classifies parameter points and runs seeded cross-validation suites —
//!   [`classify`], [`verify`].
//!
//! The `examples/` directory is the guided tour: one runnable example per
//! capability.  A thin `qh` binary exposes the same functionality as
//! `solve`, `classify`, `sweep`, and `verify` subcommands ([`cli`]).

pub mod classify;
pub mod cli;
pub mod closed_forms;
pub mod error;
pub mod lambda;
pub mod poly;
pub mod qform;
pub mod qnum;
pub mod scalar;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Mode, Scalar};
pub use solver::QHParams;
