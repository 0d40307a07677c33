//! The search space: naive rounding, the Chebyshev coefficient box, sampled
//! band constraints and LP tightening of the box.

mod constraints;
pub mod simplex;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{ceil_scaled, floor_scaled, fraction_string, pow2, round_to_multiple, Enclosure, EvalError, Rational};
use crate::poly::{beta_vector, Coefficient, PolyError, Polynomial};

pub use constraints::{lp_tighten, lp_tighten_with_vertices, sampled_constraints, sampling_endpoint, ConstraintRow, ConstraintSet};

/// Fractional bit counts `m_0..m_n`: the degree-`i` coefficient is a multiple
/// of `2^-m_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BitBudget {
    pub bits: Vec<i64>,
}

impl BitBudget {
    pub fn new(bits: Vec<i64>) -> Self {
        assert!(!bits.is_empty(), "a bit budget needs at least one entry");
        BitBudget { bits }
    }

    pub fn degree(&self) -> usize {
        self.bits.len() - 1
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn m(&self, i: usize) -> i64 {
        self.bits[i]
    }

    /// `c / 2^m_i`.
    pub fn value(&self, i: usize, c: &BigInt) -> Rational {
        Rational::from_integer(c.clone()) * pow2(-self.bits[i])
    }

    /// The polynomial with scaled coefficients `c`.
    pub fn polynomial(&self, c: &[BigInt]) -> Polynomial<Rational> {
        Polynomial::new(c.iter().enumerate().map(|(i, ci)| self.value(i, ci)).collect())
    }

    /// `2^m_i q_i` for each coefficient, or `None` if one is off its grid.
    pub fn scaled(&self, q: &Polynomial<Rational>) -> Option<Vec<BigInt>> {
        if q.len() != self.len() {
            return None;
        }
        q.coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let s = c * pow2(self.bits[i]);
                s.is_integer().then(|| s.to_integer())
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CandidateError {
    #[error("the error of the rounded polynomial is zero")]
    ZeroEpsilonHat,
    #[error("lambda = {lambda} lies outside [eps/eps_hat, 1] (eps/eps_hat ~ {min})")]
    LambdaOutOfRange { lambda: String, min: String },
    #[error("polynomial has {got} coefficients but the bit budget has {want}")]
    DegreeMismatch { got: usize, want: usize },
    #[error("sample count d must be at least 1")]
    BadSampleCount,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Per-degree integer bounds on the scaled coefficients `c_i = 2^m_i q_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateBox {
    pub lo: Vec<BigInt>,
    pub hi: Vec<BigInt>,
    pub bits: BitBudget,
}

impl CandidateBox {
    pub fn new(lo: Vec<BigInt>, hi: Vec<BigInt>, bits: BitBudget) -> Self {
        assert!(lo.len() == bits.len() && hi.len() == bits.len(), "box and bit budget lengths differ");
        CandidateBox { lo, hi, bits }
    }

    /// A box containing no tuple.
    pub fn empty(bits: BitBudget) -> Self {
        let n = bits.len();
        CandidateBox { lo: vec![BigInt::one(); n], hi: vec![BigInt::zero(); n], bits }
    }

    /// Box of half-width `radius` grid steps around `center`.
    pub fn around(center: &[BigInt], radius: i64, bits: BitBudget) -> Self {
        let lo = center.iter().map(|c| c - radius).collect();
        let hi = center.iter().map(|c| c + radius).collect();
        Self::new(lo, hi, bits)
    }

    pub fn len(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(l, h)| l > h)
    }

    pub fn count(&self, i: usize) -> BigInt {
        let c: BigInt = &self.hi[i] - &self.lo[i] + 1;
        c.max(BigInt::zero())
    }

    pub fn counts(&self) -> Vec<BigInt> {
        (0..self.len()).map(|i| self.count(i)).collect()
    }

    pub fn total(&self) -> BigInt {
        (0..self.len()).map(|i| self.count(i)).product()
    }

    pub fn contains(&self, c: &[BigInt]) -> bool {
        c.len() == self.len() && c.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (l, h))| l <= v && v <= h)
    }

    pub fn lo_value(&self, i: usize) -> Rational {
        self.bits.value(i, &self.lo[i])
    }

    pub fn hi_value(&self, i: usize) -> Rational {
        self.bits.value(i, &self.hi[i])
    }

    /// One line per degree, e.g. `degree 0: 4 possible values between 2047/2048 and 4097/4096`.
    pub fn summary(&self) -> Vec<String> {
        (0..self.len())
            .map(|i| {
                format!(
                    "degree {i}: {} possible values between {} and {}",
                    self.count(i),
                    fraction_string(&self.lo_value(i)),
                    fraction_string(&self.hi_value(i))
                )
            })
            .collect()
    }
}

/// Rounds each coefficient of `p` to the nearest multiple of `2^-m_i`; this is `p̂`.
pub fn naive_round<T: Coefficient>(p: &Polynomial<T>, bits: &BitBudget) -> Result<Polynomial<Rational>, CandidateError> {
    if p.len() > bits.len() {
        return Err(CandidateError::DegreeMismatch { got: p.len(), want: bits.len() });
    }
    let mut c: Vec<Rational> = p.coeffs().iter().enumerate().map(|(i, c)| round_to_multiple(&c.to_rational(), bits.m(i))).collect();
    c.resize(bits.len(), Rational::zero());
    Ok(Polynomial::new(c))
}

/// The box of Chebyshev bounds: with `r = ε + λ ε̂` (upper ends of both
/// enclosures), every on-grid `q` with `||f - q|| <= λ ε̂` has
/// `|q_i - p_i| <= r |β_i|`, so `2^m_i q_i` lies in
/// `[ceil(2^m_i (p_i - r|β_i|)), floor(2^m_i (p_i + r|β_i|))]`.
pub fn chebyshev_box<T: Coefficient>(
    p: &Polynomial<T>,
    epsilon: &Enclosure,
    epsilon_hat: &Enclosure,
    lambda: &Rational,
    a: &Rational,
    bits: &BitBudget,
) -> Result<CandidateBox, CandidateError> {
    if p.len() != bits.len() {
        return Err(CandidateError::DegreeMismatch { got: p.len(), want: bits.len() });
    }
    if epsilon_hat.hi().is_zero() {
        return Err(CandidateError::ZeroEpsilonHat);
    }
    let eps_hi = epsilon.hi().to_rational();
    let hat_hi = epsilon_hat.hi().to_rational();
    // λ must be at least ε/ε̂; only reject when that is certain
    let certainly_small = lambda * &hat_hi < epsilon.lo().to_rational();
    if certainly_small || !lambda.is_positive() || *lambda > Rational::one() {
        let min = epsilon.mid().to_rational() / epsilon_hat.mid().to_rational();
        return Err(CandidateError::LambdaOutOfRange {
            lambda: fraction_string(lambda),
            min: crate::numerics::Real::from_rational(&min, 64, crate::numerics::Round::Up).to_decimal(6),
        });
    }
    let radius = eps_hi + lambda * hat_hi;
    let betas = beta_vector(bits.degree(), a)?;
    let mut lo = Vec::with_capacity(bits.len());
    let mut hi = Vec::with_capacity(bits.len());
    for (i, c) in p.coeffs().iter().enumerate() {
        let center = c.to_rational();
        let half = &radius * betas.betas[i].abs();
        lo.push(ceil_scaled(&(&center - &half), bits.m(i)));
        hi.push(floor_scaled(&(&center + &half), bits.m(i)));
    }
    Ok(CandidateBox::new(lo, hi, bits.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{Real, Round};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn dec(s: &str) -> Rational {
        crate::numerics::parse_rational(s).unwrap()
    }

    #[test]
    fn naive_rounding_of_cosine_minimax() {
        let p = Polynomial::new(vec![dec("0.9998864206"), dec("0.00469021603"), dec("-0.5303088665"), dec("0.06304636099")]);
        let bits = BitBudget::new(vec![12, 10, 6, 4]);
        let hat = naive_round(&p, &bits).unwrap();
        assert_eq!(hat, Polynomial::new(vec![q(1, 1), q(5, 1024), q(-17, 32), q(1, 16)]));
        assert_eq!(naive_round(&hat, &bits).unwrap(), hat);
    }

    #[test]
    fn naive_rounding_of_exp_constant() {
        let p = Polynomial::new(vec![dec("0.999999999999999981509827946165"), dec("1"), dec("0.5"), dec("0.16")]);
        let hat = naive_round(&p, &BitBudget::new(vec![56, 45, 33, 23])).unwrap();
        assert_eq!(hat.coeffs()[0], Rational::new(72057594037927935u64.into(), 72057594037927936u64.into()));
    }

    #[test]
    fn box_collapses_for_tiny_radius() {
        let bits = BitBudget::new(vec![4, 4]);
        let p = Polynomial::new(vec![q(3, 16), q(-5, 16)]);
        let tiny = Enclosure::point(Real::one(64).mul_pow2(-40));
        let b = chebyshev_box(&p, &tiny, &tiny, &q(1, 1), &q(1, 1), &bits).unwrap();
        assert_eq!(b.lo, big(&[3, -5]));
        assert_eq!(b.hi, big(&[3, -5]));
        assert_eq!(b.total(), BigInt::from(1));
    }

    #[test]
    fn box_preconditions() {
        let bits = BitBudget::new(vec![4, 4]);
        let p = Polynomial::new(vec![q(3, 16), q(-5, 16)]);
        let e = |v: f64| Enclosure::point(Real::from_f64(v, 64));
        assert_eq!(chebyshev_box(&p, &e(0.1), &e(0.0), &q(1, 1), &q(1, 1), &bits), Err(CandidateError::ZeroEpsilonHat));
        assert!(matches!(
            chebyshev_box(&p, &e(0.1), &e(0.2), &q(1, 4), &q(1, 1), &bits),
            Err(CandidateError::LambdaOutOfRange { .. })
        ));
        assert!(chebyshev_box(&p, &e(0.1), &e(0.2), &q(1, 2), &q(1, 1), &bits).is_ok());
    }

    #[test]
    fn box_bounds_are_the_exact_ceil_and_floor() {
        // n = 1 on [0, 1]: β = [-1, 2]; radius 3/32 -> c0 ∈ [ceil(16(1/2 - 3/32)), floor(16(1/2 + 3/32))]
        let bits = BitBudget::new(vec![4, 3]);
        let p = Polynomial::new(vec![q(1, 2), q(1, 4)]);
        let e = Enclosure::point(Real::from_rational(&q(1, 32), 64, Round::Nearest));
        let h = Enclosure::point(Real::from_rational(&q(1, 16), 64, Round::Nearest));
        let b = chebyshev_box(&p, &e, &h, &q(1, 1), &q(1, 1), &bits).unwrap();
        assert_eq!(b.lo, big(&[7, 1]));
        assert_eq!(b.hi, big(&[9, 3]));
        assert_eq!(b.summary()[0], "degree 0: 3 possible values between 7/16 and 9/16");
    }

    #[test]
    fn scaled_round_trip() {
        let bits = BitBudget::new(vec![12, 10, 6, 4]);
        let c = big(&[4095, 6, -34, 1]);
        let p = bits.polynomial(&c);
        assert_eq!(p.coeffs()[1], q(3, 512));
        assert_eq!(bits.scaled(&p).unwrap(), c);
        assert!(bits.scaled(&Polynomial::new(vec![q(1, 3), q(0, 1), q(0, 1), q(0, 1)])).is_none());
    }
}
