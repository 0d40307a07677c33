//! Dense polynomials and the Chebyshev families `T_n` and `T_n*`.

mod chebyshev;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::numerics::{fraction_string, Enclosure, Rational, Real, Round};

pub use chebyshev::{beta_vector, chebyshev_t, chebyshev_t_star, min_norm_monic, BetaVector, PolyError};

/// Scalars usable as polynomial coefficients.
pub trait Coefficient: Clone + fmt::Debug {
    fn is_zero_coeff(&self) -> bool;
    /// Exact value.
    fn to_rational(&self) -> Rational;
    /// Outward enclosure at `prec` bits.
    fn enclose(&self, prec: u32) -> Enclosure;
}

impl Coefficient for Rational {
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }

    fn enclose(&self, prec: u32) -> Enclosure {
        Enclosure::from_rational(self, prec)
    }
}

impl Coefficient for Real {
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }

    fn to_rational(&self) -> Rational {
        Real::to_rational(self)
    }

    fn enclose(&self, prec: u32) -> Enclosure {
        Enclosure::point(self.clone()).with_prec(prec)
    }
}

/// `coeffs[i]` is the degree-`i` coefficient. The vector length fixes the
/// degree bound; trailing zeros are kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T> Polynomial<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a polynomial needs at least one coefficient");
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Number of stored coefficients, `n + 1` for degree bound `n`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn degree_bound(&self) -> usize {
        self.coeffs.len() - 1
    }
}

impl<T: Coefficient> Polynomial<T> {
    /// Highest index with a nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero_coeff())
    }

    pub fn to_rational(&self) -> Polynomial<Rational> {
        Polynomial::new(self.coeffs.iter().map(Coefficient::to_rational).collect())
    }

    /// Coefficient enclosures at `prec` bits, for repeated evaluation.
    pub fn enclose_coeffs(&self, prec: u32) -> Vec<Enclosure> {
        self.coeffs.iter().map(|c| c.enclose(prec)).collect()
    }

    /// Horner evaluation over an interval argument at the argument's precision.
    pub fn eval_enclosure(&self, x: &Enclosure) -> Enclosure {
        horner(&self.enclose_coeffs(x.prec()), x)
    }
}

/// Horner's rule on enclosed coefficients.
pub fn horner(coeffs: &[Enclosure], x: &Enclosure) -> Enclosure {
    let mut acc = coeffs.last().expect("nonempty").clone();
    for c in coeffs.iter().rev().skip(1) {
        acc = acc.mul(x).add(c);
    }
    acc
}

impl Polynomial<Rational> {
    pub fn zero(len: usize) -> Self {
        Polynomial::new(vec![Rational::zero(); len.max(1)])
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Polynomial::new(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    /// Exact Horner evaluation.
    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = self.coeffs.last().unwrap().clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero(1);
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.len().max(other.len());
        let get = |p: &Self, i: usize| p.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
        Polynomial::new((0..n).map(|i| get(self, i) + get(other, i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Polynomial::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![Rational::zero(); self.len() + other.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// `p(alpha x + beta)`.
    pub fn compose_linear(&self, alpha: &Rational, beta: &Rational) -> Self {
        let lin = Polynomial::new(vec![beta.clone(), alpha.clone()]);
        let mut acc = Polynomial::new(vec![self.coeffs.last().unwrap().clone()]);
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(&lin).add(&Polynomial::new(vec![c.clone()]));
        }
        // keep the original degree bound
        let mut coeffs = acc.coeffs;
        coeffs.resize(self.len(), Rational::zero());
        Polynomial::new(coeffs)
    }

    /// Rounds every coefficient to a binary float of `prec` bits.
    pub fn to_real(&self, prec: u32) -> Polynomial<Real> {
        Polynomial::new(self.coeffs.iter().map(|c| Real::from_rational(c, prec, Round::Nearest)).collect())
    }
}

impl fmt::Display for Polynomial<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let text = fraction_string(c);
            let (sign, mag) = match text.strip_prefix('-') {
                Some(rest) => ("-", rest.to_string()),
                None => ("+", text),
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag}*x")?,
                _ => write!(f, "{mag}*x^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn degree_ignores_trailing_zeros() {
        let p = Polynomial::from_ints(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(p.degree_bound(), 3);
        assert_eq!(Polynomial::zero(3).degree(), None);
    }

    #[test]
    fn exact_evaluation() {
        assert_eq!(Polynomial::from_ints(&[1, -8, 8]).eval(&q(1, 2)), q(-1, 1));
        let p = Polynomial::from_ints(&[3, 0, 1]);
        assert_eq!(p.derivative(), Polynomial::from_ints(&[0, 2]));
        let e = p.eval_enclosure(&Enclosure::from_rational(&q(1, 3), 128));
        assert!(e.contains_rational(&q(28, 9)));
    }

    #[test]
    fn composition() {
        // (x^2)(2x - 1) = 4x^2 - 4x + 1
        let p = Polynomial::from_ints(&[0, 0, 1]).compose_linear(&q(2, 1), &q(-1, 1));
        assert_eq!(p, Polynomial::from_ints(&[1, -4, 4]));
    }

    #[test]
    fn display() {
        let p = Polynomial::new(vec![q(4095, 4096), q(3, 512), q(-17, 32), q(1, 16)]);
        assert_eq!(p.to_string(), "4095/4096 + 3/512*x - 17/32*x^2 + 1/16*x^3");
        assert_eq!(Polynomial::zero(2).to_string(), "0");
    }
}
