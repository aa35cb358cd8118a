//! Full per-point classification: regime, special case, Favard
//! certification, boundedness proxy, limits, and named-process tags.

use serde::Serialize;

use crate::closed_forms::{detect_case, SpecialCase};
use crate::error::{Error, Result};
use crate::lambda::{fixed_point, RegimeTag};
use crate::poly::{boundedness_check, favard_check, FavardReport};
use crate::scalar::Scalar;
use crate::solver::{chi_limit, CoefficientTable, QHParams};

/// Parameter points recognized as named processes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum KnownProcess {
    /// `sigma = tau = theta = eta = 0`.
    QWiener,
    /// `sigma = tau = eta = 0`, `q = theta = 1` (centered).
    Poisson,
    /// The constant-coefficient cases (`q = sigma = 0`, `q = tau = 0`, or
    /// `q = -sigma*tau`) with a passing positivity certificate: the tail of
    /// the recurrence matches a shifted/scaled Chebyshev one, so the
    /// distribution is compactly supported and fully identified.
    GeneralizedChebyshevSupported,
}

impl KnownProcess {
    pub fn as_str(self) -> &'static str {
        match self {
            KnownProcess::QWiener => "q-wiener",
            KnownProcess::Poisson => "poisson",
            KnownProcess::GeneralizedChebyshevSupported => "generalized-chebyshev-supported",
        }
    }
}

impl std::fmt::Display for KnownProcess {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Everything the classifier can say about one parameter point.
#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub regime: RegimeTag,
    pub special_case: SpecialCase,
    pub favard_ok: bool,
    pub bounded: bool,
    pub fixed_point: Option<Scalar>,
    pub chi_limit: Option<Scalar>,
    pub known_process: Option<KnownProcess>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub favard: FavardReport,
}

/// Boundedness proxy time used by the classifier.
const CLASSIFY_T: i64 = 1;

/// Classifies a parameter point at horizon `n`.
///
/// Builds the coefficient table (propagating pole/truncation errors),
/// certifies positivity, runs the boundedness proxy at `t = 1`, and
/// attaches the fixed point and chi limit where they exist.  Exact-mode
/// quantities that would need an irrational square root fall back to a
/// float evaluation, with a note.
pub fn classify(p: &QHParams, n: usize) -> Result<ClassificationReport> {
    let mut notes = Vec::new();
    let regime = p.regime();
    let special_case = detect_case(p);
    let table = CoefficientTable::build(p, n)?;
    let favard = favard_check(p, &table);
    let bounded_report = boundedness_check(&table, &Scalar::from_int(CLASSIFY_T, p.mode()))?;

    let fp = match fixed_point(&p.mobius()) {
        Ok(v) => v,
        Err(Error::IrrationalSqrt(_)) => {
            notes.push(
                "fixed point is irrational; reported value evaluated in float mode".into(),
            );
            fixed_point(&float_mobius(p)?)?
        }
        Err(e) => return Err(e),
    };

    let xi = if regime == RegimeTag::StrictAdmissible && p.theta.is_zero() && p.eta.is_zero() {
        match chi_limit(p) {
            Ok(v) => Some(v),
            Err(Error::IrrationalSqrt(_)) => {
                notes.push(
                    "chi limit is irrational; reported value evaluated in float mode".into(),
                );
                Some(chi_limit(&float_params(p))?)
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    let known_process = known_process_of(p, special_case, favard.ok);

    if special_case == SpecialCase::QEqualsMinusSigmaTau {
        notes.push(
            "q = -sigma*tau: chi_1 = 1 and chi_2 follow the recursion; the stationary \
             closed form holds from n = 3"
                .into(),
        );
    }
    if special_case == SpecialCase::BoundaryQ {
        notes.push(
            "boundary chi closed form: the n = 1 value reduces to 1 after cancelling the \
             common 1 - 2*sqrt(sigma*tau) factor"
                .into(),
        );
    }
    if xi.is_some() {
        notes.push(
            "chi limit computed from the fixed-point equation xi = D*xi + c \
             (equals 1/(1-q) at sigma*tau = 0)"
                .into(),
        );
    }
    let one = Scalar::one(p.mode());
    if p.q == one && (p.sigma.is_positive() || p.tau.is_positive()) {
        notes.push(
            "q = 1 with sigma > 0 or tau > 0: the measure may not be identifiable by \
             moments; determinacy unknown"
                .into(),
        );
    }

    Ok(ClassificationReport {
        regime,
        special_case,
        favard_ok: favard.ok,
        bounded: bounded_report.bounded,
        fixed_point: fp,
        chi_limit: xi,
        known_process,
        notes,
        favard,
    })
}

fn known_process_of(p: &QHParams, case: SpecialCase, favard_ok: bool) -> Option<KnownProcess> {
    let one = Scalar::one(p.mode());
    if p.sigma.is_zero() && p.tau.is_zero() && p.theta.is_zero() && p.eta.is_zero() {
        return Some(KnownProcess::QWiener);
    }
    if p.sigma.is_zero() && p.tau.is_zero() && p.eta.is_zero() && p.q == one && p.theta == one {
        return Some(KnownProcess::Poisson);
    }
    if favard_ok
        && matches!(
            case,
            SpecialCase::QSigmaZero | SpecialCase::QTauZero | SpecialCase::QEqualsMinusSigmaTau
        )
    {
        return Some(KnownProcess::GeneralizedChebyshevSupported);
    }
    None
}

fn float_params(p: &QHParams) -> QHParams {
    QHParams {
        sigma: p.sigma.to_float_mode(),
        tau: p.tau.to_float_mode(),
        theta: p.theta.to_float_mode(),
        eta: p.eta.to_float_mode(),
        q: p.q.to_float_mode(),
    }
}

fn float_mobius(p: &QHParams) -> Result<crate::lambda::MobiusParams> {
    crate::lambda::MobiusParams::new(p.q.to_float_mode(), p.sigma_tau().to_float_mode())
}
