//! Rescaled orthogonal polynomials, their time-parameterized Jacobi
//! coefficients, Favard positivity certification, moments, and symmetry.
//!
//! With a coefficient table in hand, the polynomials `M_n` satisfy
//!
//! ```text
//! y M_n = M_{n+1} + b_n(t) M_n + c_hat_n(t) M_{n-1}
//! b_n(t)     = gamma_n sqrt(t) + delta_n / sqrt(t)
//! c_hat_n(t) = chi_n (1 + sigma lambda_{n-1} t)(1 + tau lambda_{n-1} / t)
//! ```
//!
//! The factorized form of `c_hat` is what makes the Favard criterion
//! t-free: positivity for all `t > 0` is equivalent to `chi_n > 0`,
//! `sigma*lambda_{n-1} >= 0`, and `tau*lambda_{n-1} >= 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Mode, Scalar};
use crate::solver::{CoefficientTable, QHParams};

/// Time-parameterized three-term recurrence coefficients.
///
/// `b` is indexed by the subscript (`0..=horizon`).  `c_hat[0]` is the
/// conventional 0 (it multiplies the vanishing polynomial); `c_hat[n]` for
/// `n >= 1` is the genuine coefficient.
#[derive(Clone, Debug)]
pub struct JacobiData {
    pub t: Scalar,
    pub sqrt_t: Scalar,
    pub horizon: usize,
    pub b: Vec<Scalar>,
    pub c_hat: Vec<Scalar>,
}

/// Builds the Jacobi coefficients at time `t > 0`.
///
/// Exact mode requires `t` to be the square of a rational (so `sqrt(t)` is
/// exact); otherwise re-run in float mode.
pub fn jacobi_data(table: &CoefficientTable, t: &Scalar) -> Result<JacobiData> {
    if !t.is_positive() {
        return Err(Error::Domain(format!("jacobi_data requires t > 0, got {t}")));
    }
    let p = &table.params;
    let mode = p.mode();
    let one = Scalar::one(mode);
    let sqrt_t = t.sqrt("jacobi_data sqrt(t)")?;
    let n = table.horizon;
    let mut b = Vec::with_capacity(n + 1);
    for k in 0..=n {
        // gamma_k sqrt(t) + delta_k / sqrt(t)
        b.push(&(&table.gamma[k] * &sqrt_t) + &(&table.delta[k] / &sqrt_t));
    }
    let mut c_hat = Vec::with_capacity(n + 1);
    c_hat.push(Scalar::zero(mode));
    for k in 1..=n {
        let lam = &table.lambda[k - 1];
        let left = &one + &(&(&p.sigma * lam) * t);
        let right = &one + &(&(&p.tau * lam) / t);
        c_hat.push(&(table.chi_at(k) * &left) * &right);
    }
    Ok(JacobiData {
        t: t.clone(),
        sqrt_t,
        horizon: n,
        b,
        c_hat,
    })
}

/// Monic polynomials `M_0 .. M_N` as ascending coefficient vectors in `y`.
#[derive(Clone, Debug)]
pub struct PolySeq {
    pub coeffs: Vec<Vec<Scalar>>,
}

impl PolySeq {
    pub fn degree_of(&self, n: usize) -> usize {
        self.coeffs[n].len() - 1
    }

    pub fn leading_coefficient(&self, n: usize) -> &Scalar {
        self.coeffs[n].last().expect("nonempty polynomial")
    }

    /// Horner evaluation of `M_n` at `y`.
    pub fn eval(&self, n: usize, y: &Scalar) -> Scalar {
        let mut acc = Scalar::zero(y.mode());
        for c in self.coeffs[n].iter().rev() {
            acc = &(&acc * y) + c;
        }
        acc
    }
}

/// Runs the recurrence `M_{n+1} = (y - b_n) M_n - c_hat_n M_{n-1}`
/// coefficientwise, from `M_0 = 1`.
pub fn m_polynomials(jd: &JacobiData) -> PolySeq {
    let mode = jd.t.mode();
    let zero = Scalar::zero(mode);
    let one = Scalar::one(mode);
    let mut coeffs: Vec<Vec<Scalar>> = Vec::with_capacity(jd.horizon + 1);
    coeffs.push(vec![one]);
    for n in 0..jd.horizon {
        let m_n = &coeffs[n];
        let mut next = vec![zero.clone(); n + 2];
        // y * M_n
        for (k, c) in m_n.iter().enumerate() {
            next[k + 1] = &next[k + 1] + c;
        }
        // - b_n * M_n
        for (k, c) in m_n.iter().enumerate() {
            next[k] = &next[k] - &(&jd.b[n] * c);
        }
        // - c_hat_n * M_{n-1} (absent for n = 0: M_{-1} = 0)
        if n >= 1 {
            let m_prev = &coeffs[n - 1];
            for (k, c) in m_prev.iter().enumerate() {
                next[k] = &next[k] - &(&jd.c_hat[n] * c);
            }
        }
        coeffs.push(next);
    }
    PolySeq { coeffs }
}

/// Per-index signs recorded by the Favard certification.
#[derive(Clone, Debug, Serialize)]
pub struct FavardEntry {
    pub n: usize,
    pub chi_sign: i8,
    pub sigma_lambda_sign: i8,
    pub tau_lambda_sign: i8,
}

impl FavardEntry {
    pub fn ok(&self) -> bool {
        self.chi_sign > 0 && self.sigma_lambda_sign >= 0 && self.tau_lambda_sign >= 0
    }
}

/// Outcome of the analytic, t-free positivity certification.
#[derive(Clone, Debug, Serialize)]
pub struct FavardReport {
    pub ok: bool,
    pub first_failure: Option<usize>,
    pub reasons: Vec<FavardEntry>,
}

/// Certifies `c_hat_n(t) > 0` for all `t > 0` and `1 <= n <= N` without
/// sampling `t`: by the factorization, this holds exactly when `chi_n > 0`
/// and both `sigma*lambda_{n-1}` and `tau*lambda_{n-1}` are nonnegative.
pub fn favard_check(p: &QHParams, table: &CoefficientTable) -> FavardReport {
    let mut reasons = Vec::with_capacity(table.horizon);
    let mut first_failure = None;
    for n in 1..=table.horizon {
        let lam = &table.lambda[n - 1];
        let entry = FavardEntry {
            n,
            chi_sign: table.chi_at(n).signum(),
            sigma_lambda_sign: (&p.sigma * lam).signum(),
            tau_lambda_sign: (&p.tau * lam).signum(),
        };
        if first_failure.is_none() && !entry.ok() {
            first_failure = Some(n);
        }
        reasons.push(entry);
    }
    FavardReport {
        ok: first_failure.is_none(),
        first_failure,
        reasons,
    }
}

/// Dense t-grid sampling of `c_hat_n(t) > 0`, the empirical counterpart of
/// [`favard_check`] used to validate it.  Always evaluated in float mode.
pub fn favard_grid_sample(p: &QHParams, table: &CoefficientTable, t_grid: &[f64]) -> bool {
    let sigma = p.sigma.to_f64();
    let tau = p.tau.to_f64();
    for n in 1..=table.horizon {
        let lam = table.lambda[n - 1].to_f64();
        let chi = table.chi_at(n).to_f64();
        for &t in t_grid {
            let c = chi * (1.0 + sigma * lam * t) * (1.0 + tau * lam / t);
            // NaN counts as a failure.
            if c.is_nan() || c <= 0.0 {
                return false;
            }
        }
    }
    true
}

/// The standard 41-point log-spaced grid `t = 2^(j/2)`, `j = -20..=20`.
pub fn default_t_grid() -> Vec<f64> {
    (-20..=20).map(|j| 2f64.powf(j as f64 / 2.0)).collect()
}

/// `m_k`, the k-th moment of the orthogonalizing measure of the `M_n`
/// family: the top-left entry of the k-th power of the `(k+1) x (k+1)`
/// truncated transfer matrix with diagonal `b` and off-diagonal pair
/// `(1, c_hat)`.
pub fn moments(jd: &JacobiData, k: usize) -> Result<Scalar> {
    if jd.horizon < k {
        return Err(Error::Domain(format!(
            "moment order {k} exceeds the Jacobi horizon {}",
            jd.horizon
        )));
    }
    let mode = jd.t.mode();
    // v holds the coefficients of x^j * p_0 in the monic basis; one
    // application of the recurrence per power of x.
    let mut v = vec![Scalar::zero(mode); k + 1];
    v[0] = Scalar::one(mode);
    for _ in 0..k {
        let mut next = vec![Scalar::zero(mode); k + 1];
        for i in 0..=k {
            let mut acc = &jd.b[i] * &v[i];
            if i >= 1 {
                acc = &acc + &v[i - 1];
            }
            if i < k {
                acc = &acc + &(&jd.c_hat[i + 1] * &v[i + 1]);
            }
            next[i] = acc;
        }
        v = next;
    }
    Ok(v[0].clone())
}

/// The k-th moment of the process variable itself: `t^(k/2) * m_k`, from
/// the substitution `x = y*sqrt(t)`.
pub fn xt_moment(jd: &JacobiData, k: usize) -> Result<Scalar> {
    Ok(&jd.sqrt_t.powi(k as u32) * &moments(jd, k)?)
}

/// Hankel determinant `det[(m_{i+j})]` of order `k` (a `(k+1) x (k+1)`
/// matrix built from `m_0 .. m_{2k}`).
pub fn hankel_determinant(jd: &JacobiData, k: usize) -> Result<Scalar> {
    let ms: Vec<Scalar> = (0..=2 * k).map(|j| moments(jd, j)).collect::<Result<_>>()?;
    let mut m: Vec<Vec<Scalar>> = (0..=k)
        .map(|i| (0..=k).map(|j| ms[i + j].clone()).collect())
        .collect();
    Ok(determinant(&mut m))
}

/// Gaussian elimination determinant; exact in exact mode.
#[allow(clippy::needless_range_loop)]
fn determinant(m: &mut [Vec<Scalar>]) -> Scalar {
    let n = m.len();
    let mode = if n > 0 { m[0][0].mode() } else { Mode::Exact };
    let mut det = Scalar::one(mode);
    for col in 0..n {
        let pivot_row = match (col..n).max_by(|&a, &b| {
            m[a][col]
                .abs()
                .partial_cmp(&m[b][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        }) {
            Some(r) => r,
            None => return Scalar::zero(mode),
        };
        if m[pivot_row][col].is_zero() {
            return Scalar::zero(mode);
        }
        if pivot_row != col {
            m.swap(pivot_row, col);
            det = -&det;
        }
        let pivot = m[col][col].clone();
        det = &det * &pivot;
        for row in col + 1..n {
            let factor = &m[row][col] / &pivot;
            for j in col..n {
                m[row][j] = &m[row][j] - &(&factor * &m[col][j]);
            }
        }
    }
    det
}

/// Verifies the time-inversion symmetry available when `sigma = tau` and
/// `theta = eta`: `gamma_n = delta_n` for all `n <= horizon`, and the
/// Jacobi data at `t` and `1/t` coincide entrywise for sampled rational
/// times with rational roots (`t = 4` and `t = 9`).
///
/// Returns `None` when the hypothesis does not hold.
pub fn symmetry_check(p: &QHParams, n: usize) -> Result<Option<bool>> {
    if p.sigma != p.tau || p.theta != p.eta {
        return Ok(None);
    }
    let table = CoefficientTable::build(p, n)?;
    for k in 0..=n {
        if table.gamma[k] != table.delta[k] {
            return Ok(Some(false));
        }
    }
    let mode = p.mode();
    for t_int in [4i64, 9] {
        let t = Scalar::from_int(t_int, mode);
        let t_inv = Scalar::ratio_in(1, t_int, mode);
        let jd = jacobi_data(&table, &t)?;
        let jd_inv = jacobi_data(&table, &t_inv)?;
        if jd.b != jd_inv.b || jd.c_hat != jd_inv.c_hat {
            return Ok(Some(false));
        }
    }
    Ok(Some(true))
}

/// Numerical boundedness proxy and the observed sup values.
#[derive(Clone, Debug, Serialize)]
pub struct BoundednessReport {
    pub bounded: bool,
    pub sup_b: f64,
    pub sup_c_hat: f64,
}

/// Relative band used by [`boundedness_check`]: the running maxima of
/// `|b_n(t)|` and `|c_hat_n(t)|` may grow by at most this much over the
/// last quarter of the horizon.
pub const BOUNDEDNESS_REL_BAND: f64 = 1e-6;

/// Numerical proxy for bounded recurrence coefficients (hence a unique,
/// compactly supported orthogonalizing measure): the running max over
/// `n <= N` of `|b_n(t)|` and `|c_hat_n(t)|` must stabilize, i.e. the last
/// quarter of the horizon stays within [`BOUNDEDNESS_REL_BAND`] of the
/// max attained earlier.  Always evaluated in float mode; this is a proxy,
/// never a theorem.
pub fn boundedness_check(table: &CoefficientTable, t: &Scalar) -> Result<BoundednessReport> {
    let tf = t.to_f64();
    if tf.is_nan() || tf <= 0.0 {
        return Err(Error::Domain(format!(
            "boundedness_check requires t > 0, got {t}"
        )));
    }
    let p = &table.params;
    let (sigma, tau) = (p.sigma.to_f64(), p.tau.to_f64());
    let rt = tf.sqrt();
    let n = table.horizon;
    let mut b_abs = Vec::with_capacity(n + 1);
    let mut c_abs = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let g = table.gamma[k].to_f64();
        let d = table.delta[k].to_f64();
        b_abs.push((g * rt + d / rt).abs());
        if k >= 1 {
            let lam = table.lambda[k - 1].to_f64();
            let chi = table.chi_at(k).to_f64();
            c_abs.push((chi * (1.0 + sigma * lam * tf) * (1.0 + tau * lam / tf)).abs());
        }
    }
    let sup_b = b_abs.iter().cloned().fold(0.0f64, f64::max);
    let sup_c = c_abs.iter().cloned().fold(0.0f64, f64::max);
    let cutoff_b = (3 * b_abs.len()) / 4;
    let cutoff_c = (3 * c_abs.len()) / 4;
    let early_b = b_abs[..cutoff_b.max(1)].iter().cloned().fold(0.0f64, f64::max);
    let early_c = c_abs[..cutoff_c.max(1)].iter().cloned().fold(0.0f64, f64::max);
    let stable = |sup: f64, early: f64| sup <= early * (1.0 + BOUNDEDNESS_REL_BAND) + f64::MIN_POSITIVE;
    Ok(BoundednessReport {
        bounded: stable(sup_b, early_b) && stable(sup_c, early_c),
        sup_b,
        sup_c_hat: sup_c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::q_int;

    fn zero() -> Scalar {
        Scalar::zero(Mode::Exact)
    }

    fn params(sigma: Scalar, tau: Scalar, theta: Scalar, eta: Scalar, q: Scalar) -> QHParams {
        QHParams::new(sigma, tau, theta, eta, q).unwrap()
    }

    fn q_wiener(q: Scalar) -> QHParams {
        params(zero(), zero(), zero(), zero(), q)
    }

    #[test]
    fn jacobi_q_wiener() {
        // All parameters zero, q = 0: b = 0, c_hat = 1.
        let p = q_wiener(zero());
        let table = CoefficientTable::build(&p, 8).unwrap();
        let jd = jacobi_data(&table, &Scalar::from_int(3, Mode::Exact).powi(2)).unwrap();
        for k in 0..=8 {
            assert!(jd.b[k].is_zero());
        }
        for k in 1..=8 {
            assert_eq!(jd.c_hat[k], Scalar::one(Mode::Exact));
        }

        // General q: c_hat_n = [n]_q.
        let p = q_wiener(Scalar::ratio(1, 2));
        let table = CoefficientTable::build(&p, 8).unwrap();
        let jd = jacobi_data(&table, &Scalar::one(Mode::Exact)).unwrap();
        for k in 1..=8u32 {
            assert_eq!(jd.c_hat[k as usize], q_int(k, &p.q));
        }
    }

    #[test]
    fn jacobi_tau_theta_zero_case() {
        // tau = theta = 0: b_n = sqrt(t)*eta*[n]_q,
        // c_hat_n = [n]_q (1 + sigma t [n-1]_q).
        let p = params(
            Scalar::ratio(1, 3),
            zero(),
            zero(),
            Scalar::ratio(1, 2),
            Scalar::ratio(1, 2),
        );
        let table = CoefficientTable::build(&p, 8).unwrap();
        let t = Scalar::from_int(4, Mode::Exact);
        let jd = jacobi_data(&table, &t).unwrap();
        let rt = Scalar::from_int(2, Mode::Exact);
        let one = Scalar::one(Mode::Exact);
        for n in 0..=8u32 {
            let qi = q_int(n, &p.q);
            assert_eq!(jd.b[n as usize], &(&rt * &p.eta) * &qi);
            if n >= 1 {
                let qprev = q_int(n - 1, &p.q);
                let expected = &qi * &(&one + &(&(&p.sigma * &t) * &qprev));
                assert_eq!(jd.c_hat[n as usize], expected);
            }
        }
    }

    #[test]
    fn jacobi_poisson_point() {
        // sigma = tau = eta = 0, q = theta = 1 at t = 1: b_n = c_hat_n = n.
        let one = Scalar::one(Mode::Exact);
        let p = params(zero(), zero(), one.clone(), zero(), one.clone());
        let table = CoefficientTable::build(&p, 16).unwrap();
        let jd = jacobi_data(&table, &one).unwrap();
        for n in 0..=16 {
            assert_eq!(jd.b[n], Scalar::from_int(n as i64, Mode::Exact));
            if n >= 1 {
                assert_eq!(jd.c_hat[n], Scalar::from_int(n as i64, Mode::Exact));
            }
        }
    }

    #[test]
    fn jacobi_rejects_bad_t() {
        let p = q_wiener(zero());
        let table = CoefficientTable::build(&p, 4).unwrap();
        assert!(jacobi_data(&table, &zero()).is_err());
        assert!(jacobi_data(&table, &Scalar::ratio(-1, 2)).is_err());
        // Exact mode, non-square t.
        assert!(matches!(
            jacobi_data(&table, &Scalar::ratio(1, 2)),
            Err(Error::IrrationalSqrt(_))
        ));
    }

    #[test]
    fn factorization_identity() {
        // (1 + s*l*t)(1 + u*l/t) = 1 + s*l*t + u*l/t + s*u*l^2.
        let p = params(
            Scalar::ratio(1, 3),
            Scalar::ratio(1, 5),
            Scalar::ratio(1, 2),
            Scalar::ratio(-1, 4),
            Scalar::ratio(1, 7),
        );
        let table = CoefficientTable::build(&p, 12).unwrap();
        let t = Scalar::from_int(4, Mode::Exact);
        let jd = jacobi_data(&table, &t).unwrap();
        let one = Scalar::one(Mode::Exact);
        for n in 1..=12usize {
            let lam = &table.lambda[n - 1];
            let unfactored = &(&(&one + &(&(&p.sigma * lam) * &t)) + &(&(&p.tau * lam) / &t))
                + &(&p.sigma_tau() * &(lam * lam))
                - &one;
            let expected = table.chi_at(n) * &(&one + &unfactored);
            assert_eq!(jd.c_hat[n], expected);
        }
    }

    #[test]
    fn m_polynomials_q_wiener() {
        // q = 0, t = 1: Chebyshev-like recursion gives M2 = y^2 - 1,
        // M3 = y^3 - 2y.
        let p = q_wiener(zero());
        let table = CoefficientTable::build(&p, 4).unwrap();
        let jd = jacobi_data(&table, &Scalar::one(Mode::Exact)).unwrap();
        let ps = m_polynomials(&jd);
        assert_eq!(ps.coeffs[1], vec![zero(), Scalar::one(Mode::Exact)]);
        assert_eq!(
            ps.coeffs[2],
            vec![
                Scalar::from_int(-1, Mode::Exact),
                zero(),
                Scalar::one(Mode::Exact)
            ]
        );
        assert_eq!(
            ps.coeffs[3],
            vec![
                zero(),
                Scalar::from_int(-2, Mode::Exact),
                zero(),
                Scalar::one(Mode::Exact)
            ]
        );
    }

    #[test]
    fn m1_is_monic_linear_with_zero_constant() {
        // b_0 = 0 always (gamma_0 = delta_0 = 0), so M_1 = y.
        let p = params(
            Scalar::ratio(1, 4),
            Scalar::ratio(1, 6),
            Scalar::ratio(-3, 5),
            Scalar::ratio(1, 2),
            Scalar::ratio(1, 9),
        );
        let table = CoefficientTable::build(&p, 4).unwrap();
        let jd = jacobi_data(&table, &Scalar::from_int(4, Mode::Exact)).unwrap();
        let ps = m_polynomials(&jd);
        assert_eq!(ps.coeffs[1], vec![zero(), Scalar::one(Mode::Exact)]);

        // The same holds in the constant-coefficient case q = -sigma*tau
        // with theta, eta nonzero: a nonzero b_0 would make the first
        // moment nonzero, contradicting the centered-process normalization.
        let p = params(
            Scalar::ratio(1, 2),
            Scalar::ratio(1, 2),
            Scalar::ratio(3, 4),
            Scalar::ratio(-1, 5),
            Scalar::ratio(-1, 4),
        );
        let table = CoefficientTable::build(&p, 4).unwrap();
        let jd = jacobi_data(&table, &Scalar::from_int(4, Mode::Exact)).unwrap();
        let ps = m_polynomials(&jd);
        assert_eq!(ps.coeffs[1], vec![zero(), Scalar::one(Mode::Exact)]);
        assert!(moments(&jd, 1).unwrap().is_zero());
    }

    #[test]
    fn monic_and_degree_invariants() {
        let p = params(
            Scalar::ratio(1, 3),
            Scalar::ratio(1, 5),
            Scalar::ratio(1, 2),
            Scalar::ratio(-1, 4),
            Scalar::ratio(1, 7),
        );
        let table = CoefficientTable::build(&p, 12).unwrap();
        let jd = jacobi_data(&table, &Scalar::from_int(9, Mode::Exact)).unwrap();
        let ps = m_polynomials(&jd);
        for n in 0..=12 {
            assert_eq!(ps.degree_of(n), n);
            assert_eq!(*ps.leading_coefficient(n), Scalar::one(Mode::Exact));
        }
    }

    #[test]
    fn favard_examples() {
        // q-Wiener passes.
        let p = q_wiener(zero());
        let table = CoefficientTable::build(&p, 64).unwrap();
        let report = favard_check(&p, &table);
        assert!(report.ok);
        assert_eq!(report.first_failure, None);

        // sigma = tau = 0, q = 1, theta*eta = -2 fails at n = 2:
        // chi_2 = 2 + (-2)*2*1 = -2.
        let p = params(
            zero(),
            zero(),
            Scalar::from_int(2, Mode::Exact),
            Scalar::from_int(-1, Mode::Exact),
            Scalar::one(Mode::Exact),
        );
        let table = CoefficientTable::build(&p, 16).unwrap();
        let report = favard_check(&p, &table);
        assert!(!report.ok);
        assert_eq!(report.first_failure, Some(2));

        // Oscillatory regime: some sigma*lambda_{n-1} goes negative.
        let p = QHParams::new(
            Scalar::from_f64(0.2),
            Scalar::from_f64(0.2),
            Scalar::from_f64(0.0),
            Scalar::from_f64(0.0),
            Scalar::from_f64(0.9),
        )
        .unwrap();
        let table = CoefficientTable::build(&p, 200).unwrap();
        let report = favard_check(&p, &table);
        assert!(!report.ok);
    }

    #[test]
    fn favard_analytic_agrees_with_grid() {
        let grid = default_t_grid();
        let points = [
            params(
                Scalar::ratio(1, 3),
                Scalar::ratio(1, 5),
                Scalar::ratio(1, 2),
                Scalar::ratio(-1, 4),
                Scalar::ratio(1, 7),
            ),
            params(
                zero(),
                zero(),
                Scalar::from_int(2, Mode::Exact),
                Scalar::from_int(-1, Mode::Exact),
                Scalar::one(Mode::Exact),
            ),
            q_wiener(Scalar::ratio(1, 2)),
        ];
        for p in points {
            let table = CoefficientTable::build(&p, 32).unwrap();
            let analytic = favard_check(&p, &table).ok;
            let sampled = favard_grid_sample(&p, &table, &grid);
            assert_eq!(analytic, sampled);
        }
    }

    #[test]
    fn moment_examples() {
        let p = params(
            Scalar::ratio(1, 4),
            Scalar::ratio(1, 6),
            Scalar::ratio(-3, 5),
            Scalar::ratio(1, 2),
            Scalar::ratio(1, 9),
        );
        let table = CoefficientTable::build(&p, 8).unwrap();
        for t_val in [Scalar::ratio(1, 4), Scalar::one(Mode::Exact), Scalar::from_int(4, Mode::Exact)] {
            let jd = jacobi_data(&table, &t_val).unwrap();
            // m_1 = 0 and Var(X_t) = t, exactly.
            assert!(moments(&jd, 1).unwrap().is_zero());
            assert_eq!(xt_moment(&jd, 2).unwrap(), t_val);
        }

        // q-Wiener fourth moment at t = 1 is 2 + q.
        for qv in [zero(), Scalar::ratio(1, 2), Scalar::ratio(-1, 2)] {
            let p = q_wiener(qv.clone());
            let table = CoefficientTable::build(&p, 8).unwrap();
            let jd = jacobi_data(&table, &Scalar::one(Mode::Exact)).unwrap();
            assert_eq!(
                moments(&jd, 4).unwrap(),
                &Scalar::from_int(2, Mode::Exact) + &qv
            );
        }
    }

    #[test]
    fn odd_moments_vanish_for_symmetric_distributions() {
        // theta = eta = 0 makes b_n = 0 and the distribution symmetric.
        let p = params(
            Scalar::ratio(1, 4),
            Scalar::ratio(1, 8),
            zero(),
            zero(),
            Scalar::ratio(1, 5),
        );
        let table = CoefficientTable::build(&p, 12).unwrap();
        let jd = jacobi_data(&table, &Scalar::from_int(4, Mode::Exact)).unwrap();
        for k in [1usize, 3, 5, 7, 9] {
            assert!(moments(&jd, k).unwrap().is_zero());
        }
    }

    #[test]
    fn hankel_positive_when_favard_passes() {
        let p = params(
            Scalar::ratio(1, 3),
            Scalar::ratio(1, 5),
            Scalar::ratio(1, 2),
            Scalar::ratio(-1, 4),
            Scalar::ratio(1, 7),
        );
        let table = CoefficientTable::build(&p, 16).unwrap();
        assert!(favard_check(&p, &table).ok);
        let jd = jacobi_data(&table, &Scalar::one(Mode::Exact)).unwrap();
        for k in 0..=6 {
            assert!(
                hankel_determinant(&jd, k).unwrap().is_positive(),
                "Hankel determinant of order {k} not positive"
            );
        }
    }

    #[test]
    fn symmetry_examples() {
        let p = params(
            Scalar::ratio(1, 4),
            Scalar::ratio(1, 4),
            Scalar::ratio(1, 2),
            Scalar::ratio(1, 2),
            zero(),
        );
        assert_eq!(symmetry_check(&p, 32).unwrap(), Some(true));

        let p = q_wiener(Scalar::ratio(1, 3));
        assert_eq!(symmetry_check(&p, 16).unwrap(), Some(true));

        let p = params(Scalar::ratio(1, 4), zero(), zero(), zero(), zero());
        assert_eq!(symmetry_check(&p, 16).unwrap(), None);
    }

    #[test]
    fn boundedness_examples() {
        // Strict regime, theta = eta = 0: bounded.
        let p = params(
            Scalar::ratio(1, 4),
            Scalar::ratio(1, 8),
            zero(),
            zero(),
            Scalar::ratio(1, 5),
        );
        let table = CoefficientTable::build(&p, 256).unwrap();
        let report = boundedness_check(&table, &Scalar::one(Mode::Exact)).unwrap();
        assert!(report.bounded);

        // sigma = tau = 0, q = 1, theta = 1: coefficients grow linearly.
        let p = params(zero(), zero(), Scalar::one(Mode::Exact), zero(), Scalar::one(Mode::Exact));
        let table = CoefficientTable::build(&p, 256).unwrap();
        let report = boundedness_check(&table, &Scalar::one(Mode::Exact)).unwrap();
        assert!(!report.bounded);

        // q-Wiener with |q| < 1: bounded.
        let p = q_wiener(Scalar::ratio(1, 2));
        let table = CoefficientTable::build(&p, 256).unwrap();
        let report = boundedness_check(&table, &Scalar::one(Mode::Exact)).unwrap();
        assert!(report.bounded);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn rescaling_reproduces_m_polynomials() {
        // Build p_n directly from the bundle's three-term recurrence
        //   x p_n = a_n(t) p_{n+1} + b_n(t) p_n + c_n(t) p_{n-1}
        // and rescale: M_n(y) = (prod_{j<n} a_j(t)) t^(-n/2) p_n(y sqrt(t)).
        let p = params(
            Scalar::ratio(1, 3),
            Scalar::ratio(1, 5),
            Scalar::ratio(1, 2),
            Scalar::ratio(-1, 4),
            Scalar::ratio(1, 7),
        );
        let n = 12usize;
        let table = CoefficientTable::build(&p, n).unwrap();
        let bundle = crate::solver::bundle_from_table(&table);
        let t = Scalar::from_int(4, Mode::Exact);
        let rt = Scalar::from_int(2, Mode::Exact);

        // p_n coefficient vectors in x.
        let one = Scalar::one(Mode::Exact);
        let mut pn: Vec<Vec<Scalar>> = vec![vec![one.clone()]];
        let a_of = |k: usize| &(&bundle.alpha[k] * &t) + &bundle.beta[k];
        let b_of = |k: usize| &(&bundle.gamma[k] * &t) + &bundle.delta[k];
        let c_of = |k: usize| &(&bundle.epsilon[k] * &t) + &bundle.phi[k];
        for k in 0..n {
            let cur = pn[k].clone();
            let mut next = vec![Scalar::zero(Mode::Exact); k + 2];
            for (i, c) in cur.iter().enumerate() {
                next[i + 1] = &next[i + 1] + c;
            }
            let bk = b_of(k);
            for (i, c) in cur.iter().enumerate() {
                next[i] = &next[i] - &(&bk * c);
            }
            if k >= 1 {
                let ck = c_of(k);
                for (i, c) in pn[k - 1].iter().enumerate() {
                    next[i] = &next[i] - &(&ck * c);
                }
            }
            let ak = a_of(k);
            for c in next.iter_mut() {
                *c = &*c / &ak;
            }
            pn.push(next);
        }

        let jd = jacobi_data(&table, &t).unwrap();
        let ms = m_polynomials(&jd);
        for deg in 0..=n {
            // prod_{j=0..deg-1} a_j(t)
            let mut prod = one.clone();
            for j in 0..deg {
                prod = &prod * &a_of(j);
            }
            // coefficient of y^k in M_deg: prod * t^((k-deg)/2) * [x^k] p_deg
            for (k, c) in pn[deg].iter().enumerate() {
                // t^((k-deg)/2) = rt^(k-deg)
                let scale = if k >= deg {
                    rt.powi((k - deg) as u32)
                } else {
                    &one / &rt.powi((deg - k) as u32)
                };
                let expected = &(&prod * &scale) * c;
                assert_eq!(ms.coeffs[deg][k], expected, "mismatch at M_{deg}, y^{k}");
            }
        }
    }
}
