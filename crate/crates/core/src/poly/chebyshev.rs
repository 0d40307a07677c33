use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::Polynomial;
use crate::numerics::{pow2, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("interval endpoint must be positive, got {0}")]
    NonPositiveEndpoint(String),
    #[error("empty interval [{0}, {1}]")]
    EmptyInterval(String, String),
}

/// `T_n` from the three-term recurrence `T_n = 2x T_{n-1} - T_{n-2}`.
pub fn chebyshev_t(n: usize) -> Polynomial<Rational> {
    let mut prev = Polynomial::from_ints(&[1]);
    if n == 0 {
        return prev;
    }
    let mut cur = Polynomial::from_ints(&[0, 1]);
    let two_x = Polynomial::from_ints(&[0, 2]);
    for _ in 1..n {
        let next = two_x.mul(&cur).sub(&prev);
        prev = cur;
        cur = next;
    }
    Polynomial::new(cur.into_coeffs()[..=n].to_vec())
}

/// `T_n*(x) = T_n(2x - 1)`, the Chebyshev polynomial shifted to `[0, 1]`.
pub fn chebyshev_t_star(n: usize) -> Polynomial<Rational> {
    chebyshev_t(n).compose_linear(&Rational::from_integer(2.into()), &-Rational::one())
}

/// Coefficients `beta_0..beta_n` of `T_n*(x/a)`.
///
/// `1/|beta_k|` is the smallest sup norm on `[0, a]` of a polynomial of degree
/// at most `n` whose degree-`k` coefficient is 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaVector {
    pub a: Rational,
    pub n: usize,
    pub betas: Vec<Rational>,
}

impl BetaVector {
    pub fn beta(&self, i: usize) -> &Rational {
        &self.betas[i]
    }

    /// `1 / |beta_k|`.
    pub fn min_norm(&self, k: usize) -> Rational {
        self.betas[k].abs().recip()
    }
}

pub fn beta_vector(n: usize, a: &Rational) -> Result<BetaVector, PolyError> {
    if !a.is_positive() {
        return Err(PolyError::NonPositiveEndpoint(a.to_string()));
    }
    let star = chebyshev_t_star(n);
    let mut scale = Rational::one();
    let inv_a = a.recip();
    let mut betas = Vec::with_capacity(n + 1);
    for c in star.coeffs() {
        betas.push(c * &scale);
        scale *= &inv_a;
    }
    debug_assert!(betas.iter().all(|b| !b.is_zero()));
    Ok(BetaVector { a: a.clone(), n, betas })
}

/// The monic degree-`n` polynomial of least sup norm on `[a, b]`:
/// `(b-a)^n / 2^(2n-1) * T_n((2x - b - a)/(b - a))` for `n >= 1`.
pub fn min_norm_monic(n: usize, a: &Rational, b: &Rational) -> Result<Polynomial<Rational>, PolyError> {
    if a >= b {
        return Err(PolyError::EmptyInterval(a.to_string(), b.to_string()));
    }
    if n == 0 {
        return Ok(Polynomial::from_ints(&[1]));
    }
    let len = b - a;
    let alpha = Rational::from_integer(2.into()) / &len;
    let beta = -(a + b) / &len;
    let t = chebyshev_t(n).compose_linear(&alpha, &beta);
    let factor = num_traits::pow(len, n) * pow2(1 - 2 * n as i64);
    Ok(t.scale(&factor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{cos, Enclosure, Real};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn ints(v: &[i64]) -> Polynomial<Rational> {
        Polynomial::from_ints(v)
    }

    #[test]
    fn first_chebyshev_polynomials() {
        assert_eq!(chebyshev_t(0), ints(&[1]));
        assert_eq!(chebyshev_t(2), ints(&[-1, 0, 2]));
        assert_eq!(chebyshev_t(4), ints(&[1, 0, -8, 0, 8]));
        assert_eq!(chebyshev_t(5), ints(&[0, 5, 0, -20, 0, 16]));
        for n in 1..12 {
            let lead = chebyshev_t(n).coeffs()[n].clone();
            assert_eq!(lead, Rational::from_integer(num_bigint::BigInt::from(1u64 << (n - 1))));
        }
    }

    #[test]
    fn shifted_family() {
        assert_eq!(chebyshev_t_star(0), ints(&[1]));
        assert_eq!(chebyshev_t_star(2), ints(&[1, -8, 8]));
        assert_eq!(chebyshev_t_star(3), ints(&[-1, 18, -48, 32]));
        assert_eq!(chebyshev_t_star(4), ints(&[1, -32, 160, -256, 128]));
        assert_eq!(chebyshev_t_star(5), ints(&[-1, 50, -400, 1120, -1280, 512]));
        // every coefficient of T_n* is a nonzero integer
        for n in 0..15 {
            assert!(chebyshev_t_star(n).coeffs().iter().all(|c| c.is_integer() && !c.is_zero()));
        }
    }

    #[test]
    fn betas() {
        let b = beta_vector(3, &q(1, 1)).unwrap();
        assert_eq!(b.betas, vec![q(-1, 1), q(18, 1), q(-48, 1), q(32, 1)]);
        let a = q(201, 256);
        let b = beta_vector(3, &a).unwrap();
        assert_eq!(b.betas[1], q(18 * 256, 201));
        assert_eq!(b.betas[3], q(32, 1) / (&a * &a * &a));
        assert_eq!(b.min_norm(1), q(201, 18 * 256));
        assert!(beta_vector(3, &q(0, 1)).is_err());
        assert!(beta_vector(3, &q(-1, 2)).is_err());
    }

    #[test]
    fn betas_scale_with_endpoint() {
        // doubling a divides beta_i by 2^i, so each half-width (∝ |beta_i|) scales by 2^-i
        let a = q(3, 7);
        let b1 = beta_vector(6, &a).unwrap();
        let b2 = beta_vector(6, &(&a * q(2, 1))).unwrap();
        for i in 0..=6 {
            assert_eq!(&b1.betas[i] * pow2(-(i as i64)), b2.betas[i]);
        }
    }

    #[test]
    fn monic_min_norm() {
        assert_eq!(min_norm_monic(1, &q(0, 1), &q(1, 1)).unwrap(), Polynomial::new(vec![q(-1, 2), q(1, 1)]));
        assert_eq!(min_norm_monic(2, &q(0, 1), &q(1, 1)).unwrap(), Polynomial::new(vec![q(1, 8), q(-1, 1), q(1, 1)]));
        for n in 1..8 {
            let p = min_norm_monic(n, &q(-1, 1), &q(1, 1)).unwrap();
            assert_eq!(p, chebyshev_t(n).scale(&pow2(1 - n as i64)));
            assert_eq!(p.coeffs()[n], q(1, 1));
        }
        assert!(min_norm_monic(2, &q(1, 1), &q(1, 1)).is_err());
    }

    #[test]
    fn star_identity_with_even_chebyshev() {
        // T_n*(x) = T_2n(sqrt x)
        for n in 0..=6 {
            let star = chebyshev_t_star(n);
            let t2n = chebyshev_t(2 * n);
            for k in 0..=8 {
                let x = q(k, 8);
                let root = Enclosure::from_rational(&x, 200).sqrt().unwrap();
                let rhs = t2n.eval_enclosure(&root);
                let lhs = star.eval(&x);
                let slack = Real::one(64).mul_pow2(-150);
                assert!(rhs.inflate(&slack).contains_rational(&lhs), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn trigonometric_definition_and_extrema() {
        // T_n(cos t) = cos(n t); at t = i pi / n this gives the alternating extrema ±1
        for n in 1..=8usize {
            let t = chebyshev_t(n);
            for i in 0..=n {
                let theta = crate::numerics::pi(160).mul_int(&(i as i64).into()).div_int(n as i64);
                let x = cos(&theta).unwrap();
                let v = t.eval_enclosure(&x);
                let expected = if i % 2 == 0 { 1 } else { -1 };
                let slack = Real::one(64).mul_pow2(-120);
                assert!(v.inflate(&slack).contains_rational(&q(expected, 1)), "n={n} i={i}: {v:?}");
            }
            // and a generic angle
            let theta = Enclosure::from_rational(&q(3, 10), 160);
            let lhs = t.eval_enclosure(&cos(&theta).unwrap());
            let rhs = cos(&theta.mul_int(&(n as i64).into())).unwrap();
            assert!(lhs.overlaps(&rhs.inflate(&Real::one(64).mul_pow2(-120))));
        }
        assert_eq!(chebyshev_t(2).eval(&q(1, 1)), q(1, 1));
    }
}
