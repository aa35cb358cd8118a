//! Closed-form coefficient tables for the solvable special cases, plus
//! detection of which case a parameter point falls into.
//!
//! Every closed form here reproduces the recursion pipeline exactly on
//! rational parameter grids; [`verify_against_recursion`] is the
//! cross-check.  In the constant-coefficient cases the stationary values
//! set in only after the first step or two (the recursion starts from
//! `lambda_0 = gamma_0 = delta_0 = 0`, not from the stationary state), so
//! the early indices get their own expressions:
//!
//! * `q = sigma = 0`: `delta_1 = theta + tau*eta` (stationary value
//!   `theta + 2*eta*tau` holds from n = 2), and symmetrically for
//!   `q = tau = 0`.
//! * `q = -sigma*tau`: `gamma_1 = (eta + sigma*theta)/(1 - sigma*tau)`,
//!   `delta_1 = (theta + tau*eta)/(1 - sigma*tau)`; the stationary values
//!   hold from n = 2.  `chi_1 = 1`, `chi_2` has its own closed form, and
//!   the stationary chi holds from n = 3.
//! * `sigma = tau = 0`: `chi_n = [n]_q + theta*eta*[n]_q*[n-1]_q`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qnum::q_int;
use crate::scalar::Scalar;
use crate::solver::{CoefficientTable, QHParams};

/// The solvable special cases, in detection precedence order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SpecialCase {
    /// `sigma = tau = 0`.
    SigmaTauZero,
    /// `tau = theta = 0`.
    TauThetaZero,
    /// `sigma = eta = 0`.
    SigmaEtaZero,
    /// `tau = eta = 0`.
    TauEtaZero,
    /// `sigma = theta = 0`.
    SigmaThetaZero,
    /// `q = sigma = 0`.
    QSigmaZero,
    /// `q = tau = 0`.
    QTauZero,
    /// `q = -sigma*tau`.
    QEqualsMinusSigmaTau,
    /// `q = 1 - 2*sqrt(sigma*tau)` with `theta = eta = 0`.
    BoundaryQ,
    /// No closed form applies.
    None,
}

impl SpecialCase {
    pub fn as_str(self) -> &'static str {
        match self {
            SpecialCase::SigmaTauZero => "sigma-tau-zero",
            SpecialCase::TauThetaZero => "tau-theta-zero",
            SpecialCase::SigmaEtaZero => "sigma-eta-zero",
            SpecialCase::TauEtaZero => "tau-eta-zero",
            SpecialCase::SigmaThetaZero => "sigma-theta-zero",
            SpecialCase::QSigmaZero => "q-sigma-zero",
            SpecialCase::QTauZero => "q-tau-zero",
            SpecialCase::QEqualsMinusSigmaTau => "q-equals-minus-sigma-tau",
            SpecialCase::BoundaryQ => "boundary-q",
            SpecialCase::None => "none",
        }
    }

    /// True when `p` satisfies this case's hypothesis.
    pub fn matches(self, p: &QHParams) -> bool {
        let st = p.sigma_tau();
        match self {
            SpecialCase::SigmaTauZero => p.sigma.is_zero() && p.tau.is_zero(),
            SpecialCase::TauThetaZero => p.tau.is_zero() && p.theta.is_zero(),
            SpecialCase::SigmaEtaZero => p.sigma.is_zero() && p.eta.is_zero(),
            SpecialCase::TauEtaZero => p.tau.is_zero() && p.eta.is_zero(),
            SpecialCase::SigmaThetaZero => p.sigma.is_zero() && p.theta.is_zero(),
            SpecialCase::QSigmaZero => p.q.is_zero() && p.sigma.is_zero(),
            SpecialCase::QTauZero => p.q.is_zero() && p.tau.is_zero(),
            SpecialCase::QEqualsMinusSigmaTau => p.q == -&st,
            SpecialCase::BoundaryQ => {
                // q = 1 - 2*sqrt(sigma*tau), tested square-root-free, with
                // the theta = eta = 0 hypothesis the chi formula needs.
                p.theta.is_zero()
                    && p.eta.is_zero()
                    && p.q <= Scalar::one(p.mode())
                    && crate::lambda::discriminant(&p.q, &st).is_zero()
            }
            SpecialCase::None => true,
        }
    }
}

impl std::fmt::Display for SpecialCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// All cases in detection precedence order (most specific first).
pub const CASE_PRECEDENCE: [SpecialCase; 9] = [
    SpecialCase::SigmaTauZero,
    SpecialCase::TauThetaZero,
    SpecialCase::SigmaEtaZero,
    SpecialCase::TauEtaZero,
    SpecialCase::SigmaThetaZero,
    SpecialCase::QSigmaZero,
    SpecialCase::QTauZero,
    SpecialCase::QEqualsMinusSigmaTau,
    SpecialCase::BoundaryQ,
];

/// Returns the first matching case in [`CASE_PRECEDENCE`], or
/// [`SpecialCase::None`].  Detection is exact for rational inputs.
/// Detection is a convenience: [`closed_table`] accepts any case whose
/// hypothesis holds, and overlapping closed forms agree wherever both
/// hypotheses do.
pub fn detect_case(p: &QHParams) -> SpecialCase {
    CASE_PRECEDENCE
        .into_iter()
        .find(|c| c.matches(p))
        .unwrap_or(SpecialCase::None)
}

/// Fills a [`CoefficientTable`] from the closed formulas of `case`.
///
/// Errors with [`Error::HypothesisViolation`] when `p` does not satisfy the
/// case hypothesis, and [`Error::IrrationalSqrt`] for `BoundaryQ` in exact
/// mode when `sqrt(sigma*tau)` is not rational.
pub fn closed_table(case: SpecialCase, p: &QHParams, n: usize) -> Result<CoefficientTable> {
    if case == SpecialCase::None {
        return Err(Error::HypothesisViolation(
            "no closed form for case `none`".into(),
        ));
    }
    if !case.matches(p) {
        return Err(Error::HypothesisViolation(format!(
            "parameters do not satisfy the {case} hypothesis"
        )));
    }
    let mode = p.mode();
    let one = Scalar::one(mode);
    let zero = Scalar::zero(mode);
    let two = Scalar::from_int(2, mode);

    let qint: Vec<Scalar> = (0..=n as u32).map(|k| q_int(k, &p.q)).collect();
    let constant_lambda = || -> Vec<Scalar> {
        // lambda_0 = 0, lambda_n = 1 afterwards.
        let mut v = vec![zero.clone()];
        v.extend(std::iter::repeat_n(one.clone(), n));
        v
    };

    let (lambda, gamma, delta, chi): (Vec<Scalar>, Vec<Scalar>, Vec<Scalar>, Vec<Scalar>) =
        match case {
            SpecialCase::TauThetaZero => {
                let gamma = qint.iter().map(|qi| qi * &p.eta).collect();
                let delta = vec![zero.clone(); n + 1];
                let chi = qint[1..].to_vec();
                (qint.clone(), gamma, delta, chi)
            }
            SpecialCase::SigmaEtaZero => {
                let gamma = vec![zero.clone(); n + 1];
                let delta = qint.iter().map(|qi| qi * &p.theta).collect();
                let chi = qint[1..].to_vec();
                (qint.clone(), gamma, delta, chi)
            }
            SpecialCase::TauEtaZero => {
                let gamma = (0..=n)
                    .map(|k| {
                        if k == 0 {
                            zero.clone()
                        } else {
                            &(&(&qint[k] * &(&qint[k] + &qint[k - 1])) * &p.theta) * &p.sigma
                        }
                    })
                    .collect();
                let delta = qint.iter().map(|qi| qi * &p.theta).collect();
                let chi = (1..=n)
                    .map(|k| {
                        let correction = &(&(&(&qint[k - 1] * &qint[k - 1]) * &qint[k])
                            * &(&p.theta * &p.theta))
                            * &p.sigma;
                        &qint[k] + &correction
                    })
                    .collect();
                (qint.clone(), gamma, delta, chi)
            }
            SpecialCase::SigmaThetaZero => {
                let gamma = qint.iter().map(|qi| qi * &p.eta).collect();
                let delta = (0..=n)
                    .map(|k| {
                        if k == 0 {
                            zero.clone()
                        } else {
                            &(&(&qint[k] * &(&qint[k - 1] + &qint[k])) * &p.eta) * &p.tau
                        }
                    })
                    .collect();
                let chi = (1..=n)
                    .map(|k| {
                        let correction = &(&(&(&qint[k - 1] * &qint[k - 1]) * &qint[k])
                            * &(&p.eta * &p.eta))
                            * &p.tau;
                        &qint[k] + &correction
                    })
                    .collect();
                (qint.clone(), gamma, delta, chi)
            }
            SpecialCase::SigmaTauZero => {
                let gamma = qint.iter().map(|qi| qi * &p.eta).collect();
                let delta = qint.iter().map(|qi| qi * &p.theta).collect();
                let chi = (1..=n)
                    .map(|k| {
                        &qint[k] + &(&(&(&p.theta * &p.eta) * &qint[k]) * &qint[k - 1])
                    })
                    .collect();
                (qint.clone(), gamma, delta, chi)
            }
            SpecialCase::QSigmaZero => {
                let gamma_stat = p.eta.clone();
                let delta_first = &p.theta + &(&p.tau * &p.eta);
                let delta_stat = &p.theta + &(&two * &(&p.eta * &p.tau));
                let chi_stat =
                    &(&one + &(&p.eta * &p.theta)) + &(&(&p.eta * &p.eta) * &p.tau);
                let gamma = index_stationary(n, &zero, &gamma_stat, &gamma_stat);
                let delta = index_stationary(n, &zero, &delta_first, &delta_stat);
                let chi = chi_stationary(n, &one, &chi_stat, &chi_stat);
                (constant_lambda(), gamma, delta, chi)
            }
            SpecialCase::QTauZero => {
                let gamma_first = &p.eta + &(&p.sigma * &p.theta);
                let gamma_stat = &p.eta + &(&two * &(&p.sigma * &p.theta));
                let delta_stat = p.theta.clone();
                let chi_stat =
                    &(&one + &(&p.eta * &p.theta)) + &(&(&p.theta * &p.theta) * &p.sigma);
                let gamma = index_stationary(n, &zero, &gamma_first, &gamma_stat);
                let delta = index_stationary(n, &zero, &delta_stat, &delta_stat);
                let chi = chi_stationary(n, &one, &chi_stat, &chi_stat);
                (constant_lambda(), gamma, delta, chi)
            }
            SpecialCase::QEqualsMinusSigmaTau => {
                let st = p.sigma_tau();
                let m = &one - &st;
                let m2 = &m * &m;
                let u = &p.eta + &(&p.sigma * &p.theta);
                let v = &p.theta + &(&p.tau * &p.eta);
                let gamma_first = &u / &m;
                let delta_first = &v / &m;
                let gamma_stat =
                    &(&(&p.eta + &(&two * &(&p.theta * &p.sigma))) + &(&p.eta * &st)) / &m2;
                let delta_stat =
                    &(&(&p.theta + &(&two * &(&p.eta * &p.tau))) + &(&p.theta * &st)) / &m2;
                // chi_2 = (m^2 - theta*eta*m + 2*theta*eta + sigma*theta^2
                //          + tau*eta^2) / m^3, straight from the recursion.
                let te = &p.theta * &p.eta;
                let chi2_numer = &(&(&(&m2 - &(&te * &m)) + &(&two * &te))
                    + &(&p.sigma * &(&p.theta * &p.theta)))
                    + &(&p.tau * &(&p.eta * &p.eta));
                let chi_second = &chi2_numer / &(&m2 * &m);
                let chi_stat = &(&one / &m2) + &(&(&u * &v) / &(&m2 * &m2));
                let gamma = index_stationary(n, &zero, &gamma_first, &gamma_stat);
                let delta = index_stationary(n, &zero, &delta_first, &delta_stat);
                let chi = chi_stationary(n, &one, &chi_second, &chi_stat);
                (constant_lambda(), gamma, delta, chi)
            }
            SpecialCase::BoundaryQ => {
                let r = p.sigma_tau().sqrt("boundary-q sqrt(sigma*tau)")?;
                let lambda = (0..=n as i64)
                    .map(|k| {
                        let kk = Scalar::from_int(k, mode);
                        let denom = &one + &(&Scalar::from_int(k - 1, mode) * &r);
                        // denom = 1 + (k-1)r > 0 for k >= 0, r in [0, 1).
                        &kk / &denom
                    })
                    .collect();
                let gamma = vec![zero.clone(); n + 1];
                let delta = vec![zero.clone(); n + 1];
                // chi_1 = 1: at subscript 1 the factor (1 + (n-3)r) in the
                // numerator and (1 + 2(n-2)r) in the denominator are both
                // 1 - 2r and cancel; writing the cancelled value avoids the
                // 0/0 at r = 1/2.
                let chi = (1..=n as i64)
                    .map(|k| {
                        if k == 1 {
                            return one.clone();
                        }
                        let kk = Scalar::from_int(k, mode);
                        let f = |j: i64| &one + &(&Scalar::from_int(j, mode) * &r);
                        let f2 = |j: i64| {
                            &one + &(&(&two * &Scalar::from_int(j, mode)) * &r)
                        };
                        let a = f(k - 2);
                        let numer = &(&kk * &(&a * &a)) * &f(k - 3);
                        let one_minus_r = &one - &r;
                        let denom =
                            &(&(&one_minus_r * &one_minus_r) * &f2(k - 1)) * &f2(k - 2);
                        &numer / &denom
                    })
                    .collect();
                (lambda, gamma, delta, chi)
            }
            SpecialCase::None => unreachable!(),
        };

    Ok(CoefficientTable {
        params: p.clone(),
        horizon: n,
        lambda,
        gamma,
        delta,
        chi,
    })
}

/// `[value_0, first, stat, stat, ...]` over indices `0..=n`.
fn index_stationary(n: usize, zero: &Scalar, first: &Scalar, stat: &Scalar) -> Vec<Scalar> {
    (0..=n)
        .map(|k| match k {
            0 => zero.clone(),
            1 => first.clone(),
            _ => stat.clone(),
        })
        .collect()
}

/// `[chi_1, chi_2, stat, ...]` over subscripts `1..=n`.
fn chi_stationary(n: usize, chi1: &Scalar, chi2: &Scalar, stat: &Scalar) -> Vec<Scalar> {
    (1..=n)
        .map(|k| match k {
            1 => chi1.clone(),
            2 => chi2.clone(),
            _ => stat.clone(),
        })
        .collect()
}

/// Maximum absolute difference between [`closed_table`] and the recursion
/// pipeline over all four sequences up to `n`.  Exactly zero in exact mode.
pub fn verify_against_recursion(case: SpecialCase, p: &QHParams, n: usize) -> Result<Scalar> {
    let closed = closed_table(case, p, n)?;
    let recursive = CoefficientTable::build(p, n)?;
    let mut max_abs = Scalar::zero(p.mode());
    let mut track = |a: &Scalar, b: &Scalar| {
        let d = (a - b).abs();
        if d > max_abs {
            max_abs = d;
        }
    };
    for k in 0..=n {
        track(&closed.lambda[k], &recursive.lambda[k]);
        track(&closed.gamma[k], &recursive.gamma[k]);
        track(&closed.delta[k], &recursive.delta[k]);
    }
    for k in 0..n {
        track(&closed.chi[k], &recursive.chi[k]);
    }
    Ok(max_abs)
}
