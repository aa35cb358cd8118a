//! q-deformed integer arithmetic: `[n]_q`, `[n]_q!`, and the q-binomial.
//!
//! These are the only q-series primitives the coefficient formulas need.

use crate::scalar::Scalar;

/// The q-integer `[n]_q = 1 + q + ... + q^(n-1)`, with `[0]_q = 0`.
///
/// Equals `n` at `q = 1`.
pub fn q_int(n: u32, q: &Scalar) -> Scalar {
    let mut acc = Scalar::zero(q.mode());
    let mut power = Scalar::one(q.mode());
    for _ in 0..n {
        acc = &acc + &power;
        power = &power * q;
    }
    acc
}

/// The q-factorial `[n]_q! = prod_{j=1..n} [j]_q`, with `[0]_q! = 1`.
pub fn q_factorial(n: u32, q: &Scalar) -> Scalar {
    let mut acc = Scalar::one(q.mode());
    for j in 1..=n {
        acc = &acc * &q_int(j, q);
    }
    acc
}

/// The q-binomial `[n]_q! / ([n-k]_q! [k]_q!)` for `n >= k >= 0`, zero
/// otherwise.
pub fn q_binomial(n: i64, k: i64, q: &Scalar) -> Scalar {
    if !(n >= k && k >= 0) {
        return Scalar::zero(q.mode());
    }
    let n = n as u32;
    let k = k as u32;
    // Incremental product [n-k+j]_q / [j]_q avoids the large factorials.
    let mut acc = Scalar::one(q.mode());
    for j in 1..=k {
        acc = &(&acc * &q_int(n - k + j, q)) / &q_int(j, q);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Mode;

    #[test]
    fn q_int_examples() {
        assert_eq!(q_int(0, &Scalar::from_f64(0.5)), Scalar::from_f64(0.0));
        assert_eq!(
            q_int(3, &Scalar::one(Mode::Exact)),
            Scalar::from_int(3, Mode::Exact)
        );
        assert_eq!(q_int(3, &Scalar::ratio(1, 2)), Scalar::ratio(7, 4));
    }

    #[test]
    fn q_factorial_examples() {
        assert_eq!(
            q_factorial(0, &Scalar::ratio(2, 3)),
            Scalar::one(Mode::Exact)
        );
        assert_eq!(
            q_factorial(3, &Scalar::one(Mode::Exact)),
            Scalar::from_int(6, Mode::Exact)
        );
        assert_eq!(q_factorial(2, &Scalar::ratio(1, 2)), Scalar::ratio(3, 2));
    }

    #[test]
    fn q_binomial_examples() {
        assert_eq!(
            q_binomial(4, 2, &Scalar::one(Mode::Exact)),
            Scalar::from_int(6, Mode::Exact)
        );
        assert_eq!(
            q_binomial(2, 5, &Scalar::ratio(1, 3)),
            Scalar::zero(Mode::Exact)
        );
        assert_eq!(q_binomial(3, 1, &Scalar::ratio(1, 2)), Scalar::ratio(7, 4));
        assert_eq!(q_binomial(3, -1, &Scalar::ratio(1, 2)), Scalar::zero(Mode::Exact));
    }

    #[test]
    fn q_binomial_matches_factorial_ratio() {
        let q = Scalar::ratio(2, 5);
        for n in 0..=8i64 {
            for k in 0..=n {
                let direct = q_binomial(n, k, &q);
                let via_factorials = &q_factorial(n as u32, &q)
                    / &(&q_factorial((n - k) as u32, &q) * &q_factorial(k as u32, &q));
                assert_eq!(direct, via_factorials);
            }
        }
    }

    #[test]
    fn symmetry_in_k() {
        let q = Scalar::ratio(-3, 7);
        for n in 0..=10i64 {
            for k in 0..=n {
                assert_eq!(q_binomial(n, k, &q), q_binomial(n, n - k, &q));
            }
        }
    }

    #[test]
    fn exact_float_agreement() {
        let qe = Scalar::ratio(3, 5);
        let qf = Scalar::from_f64(0.6);
        for n in [1u32, 8, 32, 64] {
            let e = q_int(n, &qe).to_f64();
            let f = q_int(n, &qf).to_f64();
            assert!((e - f).abs() <= 1e-12 * e.abs().max(1.0));
        }
        for (n, k) in [(16i64, 5i64), (64, 3), (32, 16)] {
            let e = q_binomial(n, k, &qe).to_f64();
            let f = q_binomial(n, k, &qf).to_f64();
            assert!((e - f).abs() <= 1e-12 * e.abs().max(1.0));
        }
    }
}
