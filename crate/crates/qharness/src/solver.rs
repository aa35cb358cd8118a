//! Solver for the five-recurrence coefficient system.
//!
//! Given the five model parameters, this module produces the gamma/delta
//! pair through the 2x2 matrix recursion, the chi sequence through its
//! scalar recursion, reconstructs all six sequences under the canonical
//! normalization `beta_n = 1`, and verifies the original system equations
//! as residuals.  The residual check is the master oracle: in exact mode a
//! reconstructed bundle must satisfy every equation with residual exactly
//! zero.

use crate::error::{Error, Result};
use crate::lambda::{lambda_sequence, regime_classify, MobiusParams, RegimeTag};
use crate::scalar::{Mode, Scalar};

/// The five model parameters `(sigma, tau, theta, eta, q)`.
///
/// Constraints checked at construction: `sigma, tau >= 0` and
/// `-1 < q <= 1 + 2*sqrt(sigma*tau)`.  Solver paths that assume a
/// nonnegative lambda sequence additionally require
/// `q <= 1 - 2*sqrt(sigma*tau)`; they check it themselves.
#[derive(Clone, Debug, PartialEq)]
pub struct QHParams {
    pub sigma: Scalar,
    pub tau: Scalar,
    pub theta: Scalar,
    pub eta: Scalar,
    pub q: Scalar,
}

impl QHParams {
    pub fn new(sigma: Scalar, tau: Scalar, theta: Scalar, eta: Scalar, q: Scalar) -> Result<Self> {
        let mode = sigma.mode();
        for (name, v) in [("tau", &tau), ("theta", &theta), ("eta", &eta), ("q", &q)] {
            if v.mode() != mode {
                return Err(Error::InvalidParameter(format!(
                    "parameter {name} is in {} mode while sigma is in {} mode",
                    v.mode(),
                    mode
                )));
            }
        }
        if sigma.is_negative() {
            return Err(Error::InvalidParameter(format!(
                "sigma = {sigma} must be >= 0"
            )));
        }
        if tau.is_negative() {
            return Err(Error::InvalidParameter(format!("tau = {tau} must be >= 0")));
        }
        let p = QHParams {
            sigma,
            tau,
            theta,
            eta,
            q,
        };
        if MobiusParams::new(p.q.clone(), p.sigma_tau()).is_err() {
            return Err(Error::InvalidParameter(format!(
                "q = {} must satisfy -1 < q <= 1 + 2*sqrt(sigma*tau) (sigma*tau = {})",
                p.q,
                p.sigma_tau()
            )));
        }
        Ok(p)
    }

    pub fn mode(&self) -> Mode {
        self.sigma.mode()
    }

    /// The product `sigma*tau`, the `z` of the lambda analysis.
    pub fn sigma_tau(&self) -> Scalar {
        &self.sigma * &self.tau
    }

    pub fn mobius(&self) -> MobiusParams {
        MobiusParams::new(self.q.clone(), self.sigma_tau())
            .expect("validated at construction")
    }

    pub fn regime(&self) -> RegimeTag {
        regime_classify(&self.mobius())
    }

    /// True in the strict and boundary regimes, where the lambda sequence
    /// is nonnegative and the solver's denominators are guaranteed positive.
    pub fn is_admissible(&self) -> bool {
        matches!(
            self.regime(),
            RegimeTag::StrictAdmissible | RegimeTag::Boundary
        )
    }
}

/// A 2x2 matrix of scalars, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat2 {
    pub m: [[Scalar; 2]; 2],
}

impl Mat2 {
    pub fn new(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Self {
        Mat2 { m: [[a, b], [c, d]] }
    }

    pub fn identity(mode: Mode) -> Self {
        Mat2::new(
            Scalar::one(mode),
            Scalar::zero(mode),
            Scalar::zero(mode),
            Scalar::one(mode),
        )
    }

    pub fn zero(mode: Mode) -> Self {
        Mat2::new(
            Scalar::zero(mode),
            Scalar::zero(mode),
            Scalar::zero(mode),
            Scalar::zero(mode),
        )
    }

    pub fn det(&self) -> Scalar {
        &(&self.m[0][0] * &self.m[1][1]) - &(&self.m[0][1] * &self.m[1][0])
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new(
            self.m[0][0].clone(),
            self.m[1][0].clone(),
            self.m[0][1].clone(),
            self.m[1][1].clone(),
        )
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let e = |i: usize, j: usize| {
            &(&self.m[i][0] * &rhs.m[0][j]) + &(&self.m[i][1] * &rhs.m[1][j])
        };
        Mat2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn add(&self, rhs: &Mat2) -> Mat2 {
        Mat2::new(
            &self.m[0][0] + &rhs.m[0][0],
            &self.m[0][1] + &rhs.m[0][1],
            &self.m[1][0] + &rhs.m[1][0],
            &self.m[1][1] + &rhs.m[1][1],
        )
    }

    pub fn scale(&self, k: &Scalar) -> Mat2 {
        Mat2::new(
            &self.m[0][0] * k,
            &self.m[0][1] * k,
            &self.m[1][0] * k,
            &self.m[1][1] * k,
        )
    }

    pub fn mul_vec(&self, v: &(Scalar, Scalar)) -> (Scalar, Scalar) {
        (
            &(&self.m[0][0] * &v.0) + &(&self.m[0][1] * &v.1),
            &(&self.m[1][0] * &v.0) + &(&self.m[1][1] * &v.1),
        )
    }

    /// Solves `self * x = rhs`.  Exact mode uses cross-elimination on the
    /// exact determinant; float mode eliminates with the larger pivot in
    /// the first column, which matters near the regime boundary where the
    /// step matrices approach singularity.
    pub fn solve_vec(&self, rhs: &(Scalar, Scalar), index: usize) -> Result<(Scalar, Scalar)> {
        let det = self.det();
        if det.is_zero() {
            return Err(Error::SingularMatrix { index });
        }
        match det.mode() {
            Mode::Exact => {
                // Cramer on the exact determinant.
                let x0 = &(&(&rhs.0 * &self.m[1][1]) - &(&self.m[0][1] * &rhs.1)) / &det;
                let x1 = &(&(&self.m[0][0] * &rhs.1) - &(&rhs.0 * &self.m[1][0])) / &det;
                Ok((x0, x1))
            }
            Mode::Float => {
                let (r0, r1) = if self.m[0][0].abs() >= self.m[1][0].abs() {
                    (0usize, 1usize)
                } else {
                    (1, 0)
                };
                let pivot = &self.m[r0][0];
                if pivot.is_zero() {
                    return Err(Error::SingularMatrix { index });
                }
                let factor = &self.m[r1][0] / pivot;
                let a11 = &self.m[r1][1] - &(&factor * &self.m[r0][1]);
                let rhs_pair = [&rhs.0, &rhs.1];
                let b0 = rhs_pair[r0];
                let b1 = rhs_pair[r1] - &(&factor * rhs_pair[r0]);
                let x1 = b1.checked_div(&a11, "2x2 back-substitution")?;
                let x0 = (b0 - &(&self.m[r0][1] * &x1)).checked_div(pivot, "2x2 pivot")?;
                Ok((x0, x1))
            }
        }
    }

    /// Solves `self * X = rhs` columnwise.
    pub fn solve_mat(&self, rhs: &Mat2, index: usize) -> Result<Mat2> {
        let c0 = self.solve_vec(&(rhs.m[0][0].clone(), rhs.m[1][0].clone()), index)?;
        let c1 = self.solve_vec(&(rhs.m[0][1].clone(), rhs.m[1][1].clone()), index)?;
        Ok(Mat2::new(c0.0, c1.0, c0.1, c1.1))
    }
}

/// The step matrices `A_n`, `B_n`, `C_n` built from `lambda_n`.
#[derive(Clone, Debug)]
pub struct StepMatrices {
    pub a: Mat2,
    pub b: Mat2,
    pub c: Mat2,
}

/// Populates the step matrices for a given `lambda_n`:
///
/// ```text
/// A_n = [ 1 - tau*sigma*lambda_n   -sigma*(1 + q*lambda_n) ]
///       [ -tau*(1 + q*lambda_n)     1 - sigma*tau*lambda_n ]
/// B_n = [ q + sigma*tau*lambda_n    sigma*(1 - lambda_n)   ]
///       [ tau*(1 - lambda_n)        q + sigma*tau*lambda_n ]
/// C_n = [ sigma*lambda_n  1        ]
///       [ 1               tau*lambda_n ]
/// ```
pub fn step_matrices(lam_n: &Scalar, p: &QHParams) -> StepMatrices {
    let mode = p.mode();
    let one = Scalar::one(mode);
    let st = p.sigma_tau();
    let st_lam = &st * lam_n;
    let one_plus_q_lam = &one + &(&p.q * lam_n);
    let one_minus_lam = &one - lam_n;
    let a = Mat2::new(
        &one - &st_lam,
        -&(&p.sigma * &one_plus_q_lam),
        -&(&p.tau * &one_plus_q_lam),
        &one - &st_lam,
    );
    let b = Mat2::new(
        &p.q + &st_lam,
        &p.sigma * &one_minus_lam,
        &p.tau * &one_minus_lam,
        &p.q + &st_lam,
    );
    let c = Mat2::new(
        &p.sigma * lam_n,
        one.clone(),
        one.clone(),
        &p.tau * lam_n,
    );
    StepMatrices { a, b, c }
}

/// Computes `lambda_0 .. lambda_n`, failing if the iteration truncates.
pub fn lambda_values(p: &QHParams, n: usize) -> Result<Vec<Scalar>> {
    let seq = lambda_sequence(&p.mobius(), n);
    match seq.truncated_at {
        Some(at) => Err(Error::Truncated { at }),
        None => Ok(seq.values),
    }
}

/// The pairs `(gamma_n, delta_n)` for `n = 0..=n_max`, produced by solving
/// the 2x2 linear system `A_n v_{n+1} = B_n v_n + C_n (theta, eta)` at each
/// step (solve, not invert).
pub fn gamma_delta_sequence(p: &QHParams, n_max: usize) -> Result<Vec<(Scalar, Scalar)>> {
    let lambda = lambda_values(p, n_max.saturating_sub(1))?;
    gamma_delta_from_lambda(p, &lambda, n_max)
}

/// Same as [`gamma_delta_sequence`] but reuses an existing lambda prefix
/// (`lambda.len() >= n_max`, i.e. `lambda_0..lambda_{n_max-1}` present).
pub fn gamma_delta_from_lambda(
    p: &QHParams,
    lambda: &[Scalar],
    n_max: usize,
) -> Result<Vec<(Scalar, Scalar)>> {
    let mode = p.mode();
    let mu = (p.theta.clone(), p.eta.clone());
    let mut out = Vec::with_capacity(n_max + 1);
    out.push((Scalar::zero(mode), Scalar::zero(mode)));
    for n in 0..n_max {
        let sm = step_matrices(&lambda[n], p);
        let prev = &out[n];
        let bv = sm.b.mul_vec(prev);
        let cv = sm.c.mul_vec(&mu);
        let rhs = (&bv.0 + &cv.0, &bv.1 + &cv.1);
        let next = sm.a.solve_vec(&rhs, n)?;
        next.0.ensure_finite("gamma recursion")?;
        next.1.ensure_finite("delta recursion")?;
        out.push(next);
    }
    Ok(out)
}

/// The matrices `D_n` with `(gamma_n, delta_n) = D_n (theta, eta)`,
/// evaluated through the explicit sum
/// `D_{n+1} = sum_{k=0..n} (prod_{j=k+1..n} Xi_j) W_k` with
/// `Xi_j = A_j^{-1} B_j` and `W_k = A_k^{-1} C_k`.  This is an evaluation
/// path independent of the step recursion and is used to cross-check it.
#[allow(clippy::needless_range_loop)]
pub fn dn_matrix_sequence(p: &QHParams, n_max: usize) -> Result<Vec<Mat2>> {
    let mode = p.mode();
    let lambda = lambda_values(p, n_max.saturating_sub(1))?;
    let mut xi = Vec::with_capacity(n_max);
    let mut w = Vec::with_capacity(n_max);
    for n in 0..n_max {
        let sm = step_matrices(&lambda[n], p);
        xi.push(sm.a.solve_mat(&sm.b, n)?);
        w.push(sm.a.solve_mat(&sm.c, n)?);
    }
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(Mat2::zero(mode));
    for n in 0..n_max {
        // D_{n+1} = W_n + Xi_n W_{n-1} + Xi_n Xi_{n-1} W_{n-2} + ...
        let mut acc = w[n].clone();
        let mut prefix = Mat2::identity(mode);
        for k in (0..n).rev() {
            prefix = prefix.mul(&xi[k + 1]);
            acc = acc.add(&prefix.mul(&w[k]));
        }
        out.push(acc);
    }
    Ok(out)
}

/// `(gamma_n, delta_n)` via the closed sum: `D_n (theta, eta)`.
pub fn gamma_delta_closed_sum(p: &QHParams, n_max: usize) -> Result<Vec<(Scalar, Scalar)>> {
    let mu = (p.theta.clone(), p.eta.clone());
    Ok(dn_matrix_sequence(p, n_max)?
        .iter()
        .map(|d| d.mul_vec(&mu))
        .collect())
}

/// The quadratic form
/// `1 + theta*g + tau*g^2 + eta*d + sigma*d^2 - (1-q)*g*d`
/// that drives the chi recursion.
pub fn quadratic_form_value(p: &QHParams, g: &Scalar, d: &Scalar) -> Scalar {
    let one = Scalar::one(p.mode());
    let mut acc = one.clone();
    acc = &acc + &(&p.theta * g);
    acc = &acc + &(&p.tau * &(g * g));
    acc = &acc + &(&p.eta * d);
    acc = &acc + &(&p.sigma * &(d * d));
    acc = &acc - &(&(&(&one - &p.q) * g) * d);
    acc
}

/// Evaluates `1 + mu^T ((D + D^T)/2 + D^T Delta D) mu` with
/// `mu = (theta, eta)` and `Delta = [[tau, -(1-q)/2], [-(1-q)/2, sigma]]`.
/// Equals [`quadratic_form_value`] at `(gamma_n, delta_n) = D_n mu`.
pub fn dn_form_value(dn: &Mat2, p: &QHParams) -> Scalar {
    let mode = p.mode();
    let one = Scalar::one(mode);
    let half = Scalar::ratio_in(1, 2, mode);
    let neg_half_one_minus_q = -&(&half * &(&one - &p.q));
    let delta = Mat2::new(
        p.tau.clone(),
        neg_half_one_minus_q.clone(),
        neg_half_one_minus_q,
        p.sigma.clone(),
    );
    let sym = dn.add(&dn.transpose()).scale(&half);
    let full = sym.add(&dn.transpose().mul(&delta).mul(dn));
    let mu = (p.theta.clone(), p.eta.clone());
    let fv = full.mul_vec(&mu);
    &one + &(&(&mu.0 * &fv.0) + &(&mu.1 * &fv.1))
}

/// Denominator `1 - sigma*tau*(2*lambda_n + q*lambda_n^2)` of the chi step.
pub fn chi_denominator(p: &QHParams, lam_n: &Scalar) -> Scalar {
    let one = Scalar::one(p.mode());
    let two = Scalar::from_int(2, p.mode());
    let inner = &(&two * lam_n) + &(&p.q * &(lam_n * lam_n));
    &one - &(&p.sigma_tau() * &inner)
}

/// The ratio `kappa_n = (q + st - st*(1 - lambda_{n-1})^2) / denom_n`
/// appearing in the chi recursion (`st = sigma*tau`).
pub fn kappa(p: &QHParams, lam_prev: &Scalar, lam_n: &Scalar) -> Result<Scalar> {
    let one = Scalar::one(p.mode());
    let st = p.sigma_tau();
    let shifted = &one - lam_prev;
    let numer = &(&p.q + &st) - &(&st * &(&shifted * &shifted));
    numer.checked_div(&chi_denominator(p, lam_n), "kappa denominator")
}

/// The chi sequence `chi_1 .. chi_{n_max}` (element `i` of the result is
/// `chi_{i+1}`), from the recursion
/// `denom_n * chi_{n+1} = numer_n * chi_n + Q(gamma_n, delta_n)`
/// with `chi_1 = 1`.  The slices must provide `lambda_0..lambda_{n_max-1}`
/// and `gamma/delta` through index `n_max - 1`.
pub fn chi_sequence(
    p: &QHParams,
    lambda: &[Scalar],
    gamma: &[Scalar],
    delta: &[Scalar],
    n_max: usize,
) -> Result<Vec<Scalar>> {
    let mode = p.mode();
    let one = Scalar::one(mode);
    let st = p.sigma_tau();
    let mut out = Vec::with_capacity(n_max);
    if n_max == 0 {
        return Ok(out);
    }
    out.push(Scalar::one(mode));
    for n in 1..n_max {
        let denom = chi_denominator(p, &lambda[n]);
        let shifted = &one - &lambda[n - 1];
        let numer = &(&p.q + &st) - &(&st * &(&shifted * &shifted));
        let qf = quadratic_form_value(p, &gamma[n], &delta[n]);
        let chi_n = &out[n - 1];
        let next = (&(&numer * chi_n) + &qf).checked_div(&denom, "chi recursion")?;
        next.ensure_finite("chi recursion")?;
        out.push(next);
    }
    Ok(out)
}

/// Limit of the chi sequence for `theta = eta = 0` in the strict regime:
/// the solution of `xi = D*xi + c`, which evaluates to
/// `(1 - q + sqrt((1-q)^2 - 4*sigma*tau)) / (2*((1-q)^2 - 4*sigma*tau))`.
///
/// At `sigma*tau = 0` this is `1/(1-q)`, the limit of `[n]_q`.
pub fn chi_limit(p: &QHParams) -> Result<Scalar> {
    if p.regime() != RegimeTag::StrictAdmissible {
        return Err(Error::Regime(
            "chi_limit requires -1 < q < 1 - 2*sqrt(sigma*tau)".into(),
        ));
    }
    if !p.theta.is_zero() || !p.eta.is_zero() {
        return Err(Error::Regime("chi_limit requires theta = eta = 0".into()));
    }
    let mode = p.mode();
    let one = Scalar::one(mode);
    let two = Scalar::from_int(2, mode);
    let disc = crate::lambda::discriminant(&p.q, &p.sigma_tau());
    let root = disc.sqrt("chi_limit discriminant")?;
    let numer = &(&one - &p.q) + &root;
    numer.checked_div(&(&two * &disc), "chi_limit")
}

/// Horizon-`n` table of the four solved sequences.
///
/// `lambda`, `gamma`, `delta` are indexed by the subscript (`0..=n`);
/// `chi[i]` holds `chi_{i+1}` because `chi` starts at subscript 1.
#[derive(Clone, Debug)]
pub struct CoefficientTable {
    pub params: QHParams,
    pub horizon: usize,
    pub lambda: Vec<Scalar>,
    pub gamma: Vec<Scalar>,
    pub delta: Vec<Scalar>,
    pub chi: Vec<Scalar>,
}

impl CoefficientTable {
    /// Runs the full pipeline: lambda iteration, gamma/delta matrix
    /// recursion, chi recursion.
    pub fn build(p: &QHParams, n: usize) -> Result<Self> {
        let lambda = lambda_values(p, n)?;
        let gd = gamma_delta_from_lambda(p, &lambda, n)?;
        let gamma: Vec<Scalar> = gd.iter().map(|v| v.0.clone()).collect();
        let delta: Vec<Scalar> = gd.iter().map(|v| v.1.clone()).collect();
        let chi = chi_sequence(p, &lambda, &gamma, &delta, n)?;
        Ok(CoefficientTable {
            params: p.clone(),
            horizon: n,
            lambda,
            gamma,
            delta,
            chi,
        })
    }

    /// `chi_n` for `1 <= n <= horizon`.
    pub fn chi_at(&self, n: usize) -> &Scalar {
        assert!(n >= 1 && n <= self.chi.len(), "chi index {n} out of range");
        &self.chi[n - 1]
    }
}

/// The six sequences under the canonical normalization `beta_n = 1`.
///
/// All vectors are indexed by the subscript, `0..=horizon`.  The system
/// determines `epsilon` and `phi` only from subscript 1; slot 0 holds the
/// conventional `epsilon_0 = phi_0 = 0` (the coefficient they form
/// multiplies the vanishing polynomial of degree -1).
#[derive(Clone, Debug)]
pub struct SequenceBundle {
    pub horizon: usize,
    pub alpha: Vec<Scalar>,
    pub beta: Vec<Scalar>,
    pub gamma: Vec<Scalar>,
    pub delta: Vec<Scalar>,
    pub epsilon: Vec<Scalar>,
    pub phi: Vec<Scalar>,
}

/// Reconstructs the six sequences from a parameter point:
/// `beta_n = 1`, `alpha_n = sigma*lambda_n`, `epsilon_n = chi_n`,
/// `phi_n = tau*lambda_{n-1}*chi_n`, and `gamma`, `delta` from the matrix
/// recursion.
pub fn reconstruct_six_sequences(p: &QHParams, n: usize) -> Result<SequenceBundle> {
    let table = CoefficientTable::build(p, n)?;
    Ok(bundle_from_table(&table))
}

/// The reconstruction step of [`reconstruct_six_sequences`] given a table.
pub fn bundle_from_table(table: &CoefficientTable) -> SequenceBundle {
    let p = &table.params;
    let mode = p.mode();
    let n = table.horizon;
    let one = Scalar::one(mode);
    let zero = Scalar::zero(mode);
    let alpha: Vec<Scalar> = table.lambda.iter().map(|l| &p.sigma * l).collect();
    let beta = vec![one; n + 1];
    let mut epsilon = Vec::with_capacity(n + 1);
    let mut phi = Vec::with_capacity(n + 1);
    epsilon.push(zero.clone());
    phi.push(zero);
    for k in 1..=n {
        let chi_k = table.chi_at(k);
        epsilon.push(chi_k.clone());
        phi.push(&(&p.tau * &table.lambda[k - 1]) * chi_k);
    }
    SequenceBundle {
        horizon: n,
        alpha,
        beta,
        gamma: table.gamma.clone(),
        delta: table.delta.clone(),
        epsilon,
        phi,
    }
}

/// Evaluates left-minus-right of each of the five system equations for
/// `n = 1..=n_max-1` and returns the maximum absolute residual.  Exactly
/// zero in exact mode for a bundle from [`reconstruct_six_sequences`].
pub fn residuals_system(b: &SequenceBundle, p: &QHParams, n_max: usize) -> Scalar {
    assert!(b.horizon >= n_max, "bundle shorter than requested horizon");
    let mode = p.mode();
    let one = Scalar::one(mode);
    let mut max_abs = Scalar::zero(mode);
    let mut track = |r: Scalar| {
        let a = r.abs();
        if a > max_abs {
            max_abs = a;
        }
    };
    let (al, be, ga, de, ep, ph) = (&b.alpha, &b.beta, &b.gamma, &b.delta, &b.epsilon, &b.phi);
    for n in 1..n_max {
        // tau*a_n*a_{n+1} + q*a_n*b_{n+1} + sigma*b_n*b_{n+1} = a_{n+1}*b_n
        let eq1 = &(&(&(&p.tau * &(&al[n] * &al[n + 1])) + &(&p.q * &(&al[n] * &be[n + 1])))
            + &(&p.sigma * &(&be[n] * &be[n + 1])))
            - &(&al[n + 1] * &be[n]);
        track(eq1);

        // tau*e_{n-1}*e_n + q*e_n*f_{n-1} + sigma*f_n*f_{n-1} = e_{n-1}*f_n
        let eq2 = &(&(&(&p.tau * &(&ep[n - 1] * &ep[n])) + &(&p.q * &(&ep[n] * &ph[n - 1])))
            + &(&p.sigma * &(&ph[n] * &ph[n - 1])))
            - &(&ep[n - 1] * &ph[n]);
        track(eq2);

        // theta*a_n + eta*b_n + tau*a_n*(g_n + g_{n+1}) + sigma*b_n*(d_n + d_{n+1})
        //   + q*(a_n*d_{n+1} + b_n*g_n) = b_n*g_{n+1} + a_n*d_n
        let lhs3 = &(&(&(&(&p.theta * &al[n]) + &(&p.eta * &be[n]))
            + &(&p.tau * &(&al[n] * &(&ga[n] + &ga[n + 1]))))
            + &(&p.sigma * &(&be[n] * &(&de[n] + &de[n + 1]))))
            + &(&p.q * &(&(&al[n] * &de[n + 1]) + &(&be[n] * &ga[n])));
        let rhs3 = &(&be[n] * &ga[n + 1]) + &(&al[n] * &de[n]);
        track(&lhs3 - &rhs3);

        // theta*e_n + eta*f_n + tau*e_n*(g_n + g_{n-1}) + sigma*f_n*(d_{n-1} + d_n)
        //   + q*(f_n*g_n + d_{n-1}*e_n) = e_n*d_n + f_n*g_{n-1}
        let lhs4 = &(&(&(&(&p.theta * &ep[n]) + &(&p.eta * &ph[n]))
            + &(&p.tau * &(&ep[n] * &(&ga[n] + &ga[n - 1]))))
            + &(&p.sigma * &(&ph[n] * &(&de[n - 1] + &de[n]))))
            + &(&p.q * &(&(&ph[n] * &ga[n]) + &(&de[n - 1] * &ep[n])));
        let rhs4 = &(&ep[n] * &de[n]) + &(&ph[n] * &ga[n - 1]);
        track(&lhs4 - &rhs4);

        // 1 + theta*g_n + eta*d_n + tau*g_n^2 + sigma*d_n^2
        //   + tau*(a_{n-1}*e_n + a_n*e_{n+1}) + sigma*(f_n*b_{n-1} + b_n*f_{n+1})
        //   + q*(g_n*d_n + b_{n-1}*e_n + a_n*f_{n+1})
        //   = g_n*d_n + b_n*e_{n+1} + f_n*a_{n-1}
        let lhs56 = &(&(&(&(&(&(&one + &(&p.theta * &ga[n])) + &(&p.eta * &de[n]))
            + &(&p.tau * &(&ga[n] * &ga[n])))
            + &(&p.sigma * &(&de[n] * &de[n])))
            + &(&p.tau * &(&(&al[n - 1] * &ep[n]) + &(&al[n] * &ep[n + 1]))))
            + &(&p.sigma * &(&(&ph[n] * &be[n - 1]) + &(&be[n] * &ph[n + 1]))))
            + &(&p.q
                * &(&(&(&ga[n] * &de[n]) + &(&be[n - 1] * &ep[n])) + &(&al[n] * &ph[n + 1])));
        let rhs56 = &(&(&ga[n] * &de[n]) + &(&be[n] * &ep[n + 1])) + &(&ph[n] * &al[n - 1]);
        track(&lhs56 - &rhs56);
    }
    max_abs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::q_int;

    fn exact_params(sigma: Scalar, tau: Scalar, theta: Scalar, eta: Scalar, q: Scalar) -> QHParams {
        QHParams::new(sigma, tau, theta, eta, q).unwrap()
    }

    fn zero() -> Scalar {
        Scalar::zero(Mode::Exact)
    }

    #[test]
    fn params_validation() {
        assert!(QHParams::new(
            Scalar::ratio(-1, 2),
            zero(),
            zero(),
            zero(),
            zero()
        )
        .is_err());
        // q > 1 + 2*sqrt(sigma*tau) = 1.
        assert!(QHParams::new(
            zero(),
            zero(),
            zero(),
            zero(),
            Scalar::from_int(2, Mode::Exact)
        )
        .is_err());
        // q = 2 <= 1 + 2*sqrt(1) = 3 is fine structurally.
        assert!(QHParams::new(
            Scalar::one(Mode::Exact),
            Scalar::one(Mode::Exact),
            zero(),
            zero(),
            Scalar::from_int(2, Mode::Exact)
        )
        .is_ok());
    }

    #[test]
    fn step_matrix_examples() {
        // sigma = tau = 0: A = I, B = q*I, C = antidiagonal ones.
        let p = exact_params(zero(), zero(), zero(), zero(), Scalar::ratio(1, 2));
        let lam = q_int(3, &p.q);
        let sm = step_matrices(&lam, &p);
        assert_eq!(sm.a, Mat2::identity(Mode::Exact));
        assert_eq!(sm.b, Mat2::identity(Mode::Exact).scale(&p.q));
        assert_eq!(
            sm.c,
            Mat2::new(zero(), Scalar::one(Mode::Exact), Scalar::one(Mode::Exact), zero())
        );

        // sigma = 0, lambda = 1: A = [[1, 0], [-tau, 1]].
        let p = exact_params(zero(), Scalar::ratio(1, 3), zero(), zero(), zero());
        let sm = step_matrices(&Scalar::one(Mode::Exact), &p);
        assert_eq!(
            sm.a,
            Mat2::new(
                Scalar::one(Mode::Exact),
                zero(),
                Scalar::ratio(-1, 3),
                Scalar::one(Mode::Exact)
            )
        );

        // q = -sigma*tau, lambda = 1: B = 0.
        let p = exact_params(
            Scalar::ratio(1, 2),
            Scalar::ratio(1, 2),
            zero(),
            zero(),
            Scalar::ratio(-1, 4),
        );
        let sm = step_matrices(&Scalar::one(Mode::Exact), &p);
        assert_eq!(sm.b, Mat2::zero(Mode::Exact));
    }

    #[test]
    fn gamma_delta_special_cases() {
        // sigma = tau = 0: gamma_n = [n]_q eta, delta_n = [n]_q theta.
        let q = Scalar::ratio(1, 3);
        let p = exact_params(zero(), zero(), Scalar::ratio(1, 2), Scalar::ratio(-2, 7), q.clone());
        let gd = gamma_delta_sequence(&p, 12).unwrap();
        for (n, (g, d)) in gd.iter().enumerate() {
            let qi = q_int(n as u32, &q);
            assert_eq!(*g, &qi * &p.eta);
            assert_eq!(*d, &qi * &p.theta);
        }

        // tau = eta = 0: gamma_n = [n]([n]+[n-1]) theta sigma, delta_n = [n] theta.
        let q = Scalar::ratio(1, 2);
        let p = exact_params(Scalar::ratio(1, 3), zero(), Scalar::ratio(2, 5), zero(), q.clone());
        let gd = gamma_delta_sequence(&p, 10).unwrap();
        for (n, (g, d)) in gd.iter().enumerate().skip(1) {
            let qi = q_int(n as u32, &q);
            let qi_prev = q_int(n as u32 - 1, &q);
            let expected_g = &(&(&qi * &(&qi + &qi_prev)) * &p.theta) * &p.sigma;
            assert_eq!(*g, expected_g);
            assert_eq!(*d, &qi * &p.theta);
        }

        assert_eq!(gd[0], (zero(), zero()));
    }

    #[test]
    fn closed_sum_matches_step_recursion() {
        let p = exact_params(
            Scalar::ratio(1, 3),
            Scalar::ratio(1, 5),
            Scalar::ratio(1, 2),
            Scalar::ratio(-1, 4),
            Scalar::ratio(1, 7),
        );
        let step = gamma_delta_sequence(&p, 32).unwrap();
        let sum = gamma_delta_closed_sum(&p, 32).unwrap();
        assert_eq!(step, sum);
    }

    #[test]
    fn quadratic_form_examples() {
        let p = exact_params(zero(), zero(), zero(), zero(), Scalar::ratio(1, 2));
        assert_eq!(
            quadratic_form_value(&p, &zero(), &zero()),
            Scalar::one(Mode::Exact)
        );

        // sigma = tau = 0: Q(gamma_n, delta_n) = 1 + theta*eta*[n]_q*(1 + q^n).
        let q = Scalar::ratio(1, 2);
        let p = exact_params(zero(), zero(), Scalar::ratio(3, 4), Scalar::ratio(-1, 3), q.clone());
        for n in 1..10u32 {
            let qi = q_int(n, &q);
            let g = &qi * &p.eta;
            let d = &qi * &p.theta;
            let got = quadratic_form_value(&p, &g, &d);
            let qn = q.powi(n);
            let expected = &Scalar::one(Mode::Exact)
                + &(&(&(&p.theta * &p.eta) * &qi) * &(&Scalar::one(Mode::Exact) + &qn));
            assert_eq!(got, expected);
        }

        // q = sigma = 0 with gamma = eta, delta = theta + 2*eta*tau.
        let p = exact_params(
            zero(),
            Scalar::ratio(1, 2),
            Scalar::ratio(1, 3),
            Scalar::ratio(1, 5),
            zero(),
        );
        let g = p.eta.clone();
        let d = &p.theta + &(&Scalar::from_int(2, Mode::Exact) * &(&p.eta * &p.tau));
        let expected = &(&Scalar::one(Mode::Exact) + &(&p.theta * &p.eta))
            + &(&p.tau * &(&p.eta * &p.eta));
        assert_eq!(quadratic_form_value(&p, &g, &d), expected);
    }

    #[test]
    fn chi_special_cases() {
        // All parameters zero except q: chi_n = [n]_q.
        let q = Scalar::ratio(1, 2);
        let p = exact_params(zero(), zero(), zero(), zero(), q.clone());
        let table = CoefficientTable::build(&p, 8).unwrap();
        for n in 1..=8usize {
            assert_eq!(*table.chi_at(n), q_int(n as u32, &q));
        }

        // tau = eta = 0: chi_n = [n]_q + [n-1]_q^2 [n]_q theta^2 sigma.
        let q = Scalar::ratio(1, 3);
        let p = exact_params(Scalar::ratio(2, 5), zero(), Scalar::ratio(1, 2), zero(), q.clone());
        let table = CoefficientTable::build(&p, 8).unwrap();
        for n in 1..=8usize {
            let qi = q_int(n as u32, &q);
            let qp = q_int(n as u32 - 1, &q);
            let expected =
                &qi + &(&(&(&(&qp * &qp) * &qi) * &(&p.theta * &p.theta)) * &p.sigma);
            assert_eq!(*table.chi_at(n), expected);
        }
    }

    #[test]
    fn chi_q_equals_minus_sigma_tau() {
        // sigma = tau = 1/2, q = -1/4, theta = eta = 0.
        // The recursion gives chi_1 = 1, chi_2 = 4/3 (the kappa numerator at
        // n = 1 is q, not zero, because lambda_0 = 0), and 16/9 afterwards.
        let p = exact_params(
            Scalar::ratio(1, 2),
            Scalar::ratio(1, 2),
            zero(),
            zero(),
            Scalar::ratio(-1, 4),
        );
        let table = CoefficientTable::build(&p, 8).unwrap();
        assert_eq!(*table.chi_at(1), Scalar::one(Mode::Exact));
        assert_eq!(*table.chi_at(2), Scalar::ratio(4, 3));
        for n in 3..=8usize {
            assert_eq!(*table.chi_at(n), Scalar::ratio(16, 9));
        }
    }

    #[test]
    fn chi_limit_examples() {
        let p = exact_params(zero(), zero(), zero(), zero(), Scalar::ratio(1, 2));
        assert_eq!(chi_limit(&p).unwrap(), Scalar::from_int(2, Mode::Exact));

        let p = exact_params(zero(), zero(), zero(), zero(), zero());
        assert_eq!(chi_limit(&p).unwrap(), Scalar::one(Mode::Exact));

        let p = exact_params(
            Scalar::ratio(1, 2),
            Scalar::ratio(1, 2),
            zero(),
            zero(),
            Scalar::ratio(-1, 4),
        );
        assert_eq!(chi_limit(&p).unwrap(), Scalar::ratio(16, 9));

        // theta != 0 is out of the lemma's hypotheses.
        let p = exact_params(zero(), zero(), Scalar::one(Mode::Exact), zero(), zero());
        assert!(chi_limit(&p).is_err());
    }

    #[test]
    fn chi_limit_matches_iteration_tail() {
        let p = QHParams::new(
            Scalar::from_f64(0.5),
            Scalar::from_f64(0.5),
            Scalar::from_f64(0.0),
            Scalar::from_f64(0.0),
            Scalar::from_f64(-0.25),
        )
        .unwrap();
        let table = CoefficientTable::build(&p, 600).unwrap();
        let xi = chi_limit(&p).unwrap().to_f64();
        assert!((table.chi_at(600).to_f64() - xi).abs() < 1e-10);
    }

    #[test]
    fn step_matrices_nonsingular_in_admissible_regime() {
        for (sigma, tau, q) in [
            (Scalar::ratio(1, 2), Scalar::ratio(1, 2), Scalar::ratio(-1, 4)),
            (Scalar::ratio(1, 3), Scalar::ratio(1, 5), Scalar::ratio(1, 7)),
            (Scalar::ratio(1, 2), Scalar::ratio(1, 2), zero()),
            (Scalar::ratio(7, 8), Scalar::ratio(7, 8), Scalar::ratio(-3, 4)),
        ] {
            let p = exact_params(sigma, tau, zero(), zero(), q);
            assert!(p.is_admissible());
            let lambda = lambda_values(&p, 64).unwrap();
            for lam in &lambda {
                assert!(!step_matrices(lam, &p).a.det().is_zero());
            }
        }
    }

    #[test]
    fn kappa_is_q_when_sigma_tau_vanishes() {
        let p = exact_params(
            zero(),
            Scalar::ratio(1, 2),
            zero(),
            zero(),
            Scalar::ratio(1, 3),
        );
        let lambda = lambda_values(&p, 16).unwrap();
        for n in 1..16usize {
            assert_eq!(kappa(&p, &lambda[n - 1], &lambda[n]).unwrap(), p.q);
        }
    }

    #[test]
    fn q_wiener_bundle_composition() {
        // sigma = tau = theta = eta = 0: alpha = gamma = delta = phi = 0,
        // beta = 1, epsilon_n = [n]_q.
        let q = Scalar::ratio(1, 2);
        let p = exact_params(zero(), zero(), zero(), zero(), q.clone());
        let b = reconstruct_six_sequences(&p, 12).unwrap();
        for n in 0..=12usize {
            assert!(b.alpha[n].is_zero());
            assert!(b.gamma[n].is_zero());
            assert!(b.delta[n].is_zero());
            assert!(b.phi[n].is_zero());
            assert_eq!(b.beta[n], Scalar::one(Mode::Exact));
            if n >= 1 {
                assert_eq!(b.epsilon[n], q_int(n as u32, &q));
            }
        }
    }

    #[test]
    fn denominator_positive_and_kappa_signs() {
        let points = [
            (Scalar::ratio(1, 3), Scalar::ratio(1, 5), Scalar::ratio(1, 7)),
            (Scalar::ratio(1, 2), Scalar::ratio(1, 2), Scalar::ratio(-1, 4)),
            (Scalar::ratio(1, 4), Scalar::ratio(1, 4), Scalar::ratio(-1, 3)),
        ];
        for (sigma, tau, q) in points {
            let p = exact_params(sigma, tau, zero(), zero(), q);
            let lambda = lambda_values(&p, 64).unwrap();
            let qpst = &p.q + &p.sigma_tau();
            for n in 1..=63usize {
                assert!(chi_denominator(&p, &lambda[n]).is_positive());
                let k = kappa(&p, &lambda[n - 1], &lambda[n]).unwrap();
                // Sign statement: kappa_1's numerator is q + st - st = q, so the
                // uniform sign claim starts at n = 2.
                if n >= 2 {
                    if !qpst.is_negative() {
                        assert!(!k.is_negative());
                    } else {
                        assert!(k.is_negative());
                    }
                }
            }
        }
    }

    #[test]
    fn table_satisfies_both_recursions_directly() {
        // Substitute the stored table values back into the vector recursion
        //   A_n v_{n+1} = B_n v_n + C_n (theta, eta)
        // and the chi step; both residuals must vanish exactly.
        let p = exact_params(
            Scalar::ratio(1, 4),
            Scalar::ratio(1, 6),
            Scalar::ratio(-3, 5),
            Scalar::ratio(1, 2),
            Scalar::ratio(1, 9),
        );
        let table = CoefficientTable::build(&p, 24).unwrap();
        let mu = (p.theta.clone(), p.eta.clone());
        let one = Scalar::one(Mode::Exact);
        let st = p.sigma_tau();
        for n in 0..24usize {
            let sm = step_matrices(&table.lambda[n], &p);
            let lhs = sm.a.mul_vec(&(table.gamma[n + 1].clone(), table.delta[n + 1].clone()));
            let bv = sm.b.mul_vec(&(table.gamma[n].clone(), table.delta[n].clone()));
            let cv = sm.c.mul_vec(&mu);
            assert_eq!(lhs.0, &bv.0 + &cv.0);
            assert_eq!(lhs.1, &bv.1 + &cv.1);
        }
        for n in 1..24usize {
            let shifted = &one - &table.lambda[n - 1];
            let numer = &(&p.q + &st) - &(&st * &(&shifted * &shifted));
            let qf = quadratic_form_value(&p, &table.gamma[n], &table.delta[n]);
            let lhs = &chi_denominator(&p, &table.lambda[n]) * table.chi_at(n + 1);
            let rhs = &(&numer * table.chi_at(n)) + &qf;
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn chi_nonnegative_for_nonnegative_q_plus_sigma_tau() {
        // theta = eta = 0 and q + sigma*tau >= 0: chi_n >= 0 for all n.
        for (sigma, tau, q) in [
            (Scalar::ratio(1, 4), Scalar::ratio(1, 2), Scalar::ratio(-1, 8)),
            (Scalar::ratio(1, 2), Scalar::ratio(1, 2), Scalar::ratio(-1, 4)),
            (Scalar::ratio(1, 3), Scalar::ratio(1, 6), Scalar::ratio(1, 5)),
            (Scalar::ratio(1, 8), Scalar::ratio(1, 8), Scalar::ratio(0, 1)),
        ] {
            let p = exact_params(sigma, tau, zero(), zero(), q);
            assert!(!(&p.q + &p.sigma_tau()).is_negative());
            let table = CoefficientTable::build(&p, 96).unwrap();
            for n in 1..=96usize {
                assert!(!table.chi_at(n).is_negative());
            }
        }
    }

    #[test]
    fn chi_positive_on_grid_when_q_plus_sigma_tau_negative() {
        // Empirical grid coverage of the conjectured positivity for
        // q + sigma*tau < 0, theta = eta = 0.  Grid evidence only, not an
        // invariant of the admissible regime.
        for (num_s, num_t, num_q) in [
            (1i64, 1i64, -1i64),
            (2, 3, -2),
            (3, 2, -3),
            (1, 4, -2),
            (4, 4, -5),
        ] {
            let p = exact_params(
                Scalar::ratio(num_s, 8),
                Scalar::ratio(num_t, 8),
                zero(),
                zero(),
                Scalar::ratio(num_q, 8),
            );
            assert!((&p.q + &p.sigma_tau()).is_negative());
            assert!(p.regime() == RegimeTag::StrictAdmissible);
            let table = CoefficientTable::build(&p, 96).unwrap();
            for n in 1..=96usize {
                assert!(table.chi_at(n).is_positive(), "chi_{n} not positive at {p:?}");
            }
        }
    }

    #[test]
    fn residuals_small_in_float_mode() {
        let p = QHParams::new(
            Scalar::from_f64(1.0 / 3.0),
            Scalar::from_f64(0.2),
            Scalar::from_f64(0.5),
            Scalar::from_f64(-0.25),
            Scalar::from_f64(1.0 / 7.0),
        )
        .unwrap();
        let bundle = reconstruct_six_sequences(&p, 32).unwrap();
        let r = residuals_system(&bundle, &p, 32).to_f64();
        assert!(r <= 1e-12, "float residual {r}");
    }

    #[test]
    fn master_residual_is_exactly_zero() {
        let p = exact_params(
            Scalar::ratio(1, 3),
            Scalar::ratio(1, 5),
            Scalar::ratio(1, 2),
            Scalar::ratio(-1, 4),
            Scalar::ratio(1, 7),
        );
        let bundle = reconstruct_six_sequences(&p, 24).unwrap();
        assert!(residuals_system(&bundle, &p, 24).is_zero());

        // q-Wiener point.
        let p = exact_params(zero(), zero(), zero(), zero(), zero());
        let bundle = reconstruct_six_sequences(&p, 24).unwrap();
        assert!(residuals_system(&bundle, &p, 24).is_zero());
    }

    #[test]
    fn residual_detects_perturbation() {
        let p = exact_params(
            Scalar::ratio(1, 3),
            Scalar::ratio(1, 5),
            Scalar::ratio(1, 2),
            Scalar::ratio(-1, 4),
            Scalar::ratio(1, 7),
        );
        let mut bundle = reconstruct_six_sequences(&p, 16).unwrap();
        bundle.epsilon[2] = &bundle.epsilon[2] + &Scalar::one(Mode::Exact);
        assert!(residuals_system(&bundle, &p, 16).is_positive());
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn theorem_relations_hold_on_bundle() {
        let p = exact_params(
            Scalar::ratio(2, 5),
            Scalar::ratio(1, 4),
            Scalar::ratio(-1, 2),
            Scalar::ratio(1, 3),
            Scalar::ratio(-1, 5),
        );
        let bundle = reconstruct_six_sequences(&p, 20).unwrap();
        let lambda = lambda_values(&p, 20).unwrap();
        for n in 0..=20usize {
            assert_eq!(
                bundle.alpha[n],
                &(&p.sigma * &lambda[n]) * &bundle.beta[n]
            );
        }
        for n in 1..=20usize {
            assert_eq!(
                bundle.phi[n],
                &(&p.tau * &lambda[n - 1]) * &bundle.epsilon[n]
            );
        }
    }

    #[test]
    fn initial_conditions() {
        let p = exact_params(
            Scalar::ratio(1, 8),
            Scalar::ratio(1, 9),
            Scalar::ratio(3, 2),
            Scalar::ratio(-2, 3),
            Scalar::ratio(1, 6),
        );
        let b = reconstruct_six_sequences(&p, 6).unwrap();
        assert!(b.alpha[0].is_zero());
        assert!(b.gamma[0].is_zero());
        assert!(b.delta[0].is_zero());
        assert!(b.phi[1].is_zero());
        assert_eq!(b.beta[0], Scalar::one(Mode::Exact));
        assert_eq!(b.epsilon[1], Scalar::one(Mode::Exact));
    }

    #[test]
    fn dn_matrices_and_corollary_identity() {
        // sigma = tau = 0: D_n = [n]_q * antidiag(1, 1).
        let q = Scalar::ratio(2, 7);
        let p = exact_params(zero(), zero(), Scalar::ratio(1, 2), Scalar::ratio(1, 3), q.clone());
        let dns = dn_matrix_sequence(&p, 8).unwrap();
        for (n, dn) in dns.iter().enumerate() {
            let qi = q_int(n as u32, &q);
            assert_eq!(
                *dn,
                Mat2::new(zero(), qi.clone(), qi.clone(), zero())
            );
        }

        // Corollary identity: dn_form_value = quadratic_form_value(gamma_n, delta_n).
        let p = exact_params(
            Scalar::ratio(1, 4),
            Scalar::ratio(1, 6),
            Scalar::ratio(-3, 5),
            Scalar::ratio(1, 2),
            Scalar::ratio(1, 9),
        );
        let dns = dn_matrix_sequence(&p, 16).unwrap();
        let gd = gamma_delta_sequence(&p, 16).unwrap();
        for n in 0..=16usize {
            assert_eq!(
                dn_form_value(&dns[n], &p),
                quadratic_form_value(&p, &gd[n].0, &gd[n].1)
            );
        }

        // theta = eta = 0 collapses the form to the constant 1.
        let p = exact_params(
            Scalar::ratio(1, 4),
            Scalar::ratio(1, 6),
            zero(),
            zero(),
            Scalar::ratio(1, 9),
        );
        let dns = dn_matrix_sequence(&p, 8).unwrap();
        for dn in &dns {
            assert_eq!(dn_form_value(dn, &p), Scalar::one(Mode::Exact));
        }
    }

    #[test]
    fn kappa_converges_to_limit_ratio() {
        let p = QHParams::new(
            Scalar::from_f64(0.4),
            Scalar::from_f64(0.3),
            Scalar::from_f64(0.0),
            Scalar::from_f64(0.0),
            Scalar::from_f64(0.2),
        )
        .unwrap();
        let d = crate::lambda::limit_ratio_d(&p.mobius()).unwrap().to_f64();
        let lambda = lambda_values(&p, 500).unwrap();
        let k = kappa(&p, &lambda[499], &lambda[500]).unwrap().to_f64();
        assert!((k - d).abs() < 1e-10);
    }

    #[test]
    fn truncation_surfaces_as_error() {
        let p = exact_params(
            Scalar::one(Mode::Exact),
            Scalar::one(Mode::Exact),
            zero(),
            zero(),
            zero(),
        );
        assert!(matches!(
            CoefficientTable::build(&p, 8),
            Err(Error::Truncated { at: 2 })
        ));
    }
}
