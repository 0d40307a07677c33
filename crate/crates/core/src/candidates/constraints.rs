use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::simplex::{feasible, LpOutcome};
use super::{BitBudget, CandidateBox, CandidateError};
use crate::funcexpr::{eval_enclosure, FunctionOracle};
use crate::numerics::{pow2, Enclosure, Rational};

/// One sampled band `lower <= sum_i c_i x^i / 2^m_i <= upper`, also kept in
/// integer form `lo <= sum_i w_i c_i <= hi` (the row scaled by a positive
/// integer, bounds rounded inward, which loses no integer tuple).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintRow {
    pub x: Rational,
    pub coeffs: Vec<Rational>,
    pub lower: Rational,
    pub upper: Rational,
    pub weights: Vec<BigInt>,
    pub lo: BigInt,
    pub hi: BigInt,
}

impl ConstraintRow {
    fn new(x: Rational, coeffs: Vec<Rational>, lower: Rational, upper: Rational) -> Self {
        let scale = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut weights: Vec<BigInt> = coeffs.iter().map(|c| (c * &scale).to_integer()).collect();
        let g = weights.iter().fold(BigInt::zero(), |acc, w| acc.gcd(w));
        let g = if g.is_zero() { BigInt::one() } else { g };
        for w in weights.iter_mut() {
            *w /= &g;
        }
        let factor = Rational::new(scale, g);
        let lo = (&lower * &factor).ceil().to_integer();
        let hi = (&upper * &factor).floor().to_integer();
        ConstraintRow { x, coeffs, lower, upper, weights, lo, hi }
    }

    pub fn dot(&self, c: &[BigInt]) -> BigInt {
        self.weights.iter().zip(c).map(|(w, v)| w * v).sum()
    }

    pub fn satisfied(&self, c: &[BigInt]) -> bool {
        let s = self.dot(c);
        self.lo <= s && s <= self.hi
    }
}

/// The sampled constraints at `x_j = (j/d) A`, `j = 0..d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSet {
    pub rows: Vec<ConstraintRow>,
    /// The dyadic sampling endpoint `A <= a`.
    pub a_sample: Rational,
    pub d: u64,
    pub lambda: Rational,
    pub epsilon_hat: Enclosure,
    pub bits: BitBudget,
}

impl ConstraintSet {
    /// A set with no rows, which constrains nothing.
    pub fn unconstrained(bits: BitBudget) -> Self {
        ConstraintSet {
            rows: Vec::new(),
            a_sample: Rational::zero(),
            d: 0,
            lambda: Rational::one(),
            epsilon_hat: Enclosure::zero(64),
            bits,
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn points(&self) -> Vec<Rational> {
        self.rows.iter().map(|r| r.x.clone()).collect()
    }

    pub fn satisfied(&self, c: &[BigInt]) -> bool {
        self.rows.iter().all(|r| r.satisfied(c))
    }
}

/// The dyadic `A = floor(a 2^k) / 2^k` for the smallest `k >= 0` with
/// `(a - A) / a < 2^-20`.
pub fn sampling_endpoint(a: &Rational) -> Rational {
    let limit = a * pow2(-20);
    let mut k = 0i64;
    loop {
        let scale = pow2(k);
        let cand = (a * &scale).floor() / scale;
        if a - &cand < limit {
            return cand;
        }
        k += 1;
    }
}

/// Band constraints `f(x_j) - λε̂ <= q(x_j) <= f(x_j) + λε̂` at `d + 1`
/// points, with `f(x_j)` and `ε̂` enclosed outward so no admissible `q` is cut.
pub fn sampled_constraints(
    f: &FunctionOracle,
    a: &Rational,
    d: u64,
    lambda: &Rational,
    epsilon_hat: &Enclosure,
    bits: &BitBudget,
    prec: u32,
) -> Result<ConstraintSet, CandidateError> {
    if d == 0 {
        return Err(CandidateError::BadSampleCount);
    }
    let a_sample = sampling_endpoint(a);
    let band = lambda * epsilon_hat.hi().to_rational();
    let mut rows = Vec::with_capacity(d as usize + 1);
    for j in 0..=d {
        let x = &a_sample * Rational::new(j.into(), d.into());
        let fx = eval_enclosure(f.expr(), &x, prec)?;
        let mut pw = Rational::one();
        let mut coeffs = Vec::with_capacity(bits.len());
        for i in 0..bits.len() {
            coeffs.push(&pw * pow2(-bits.m(i)));
            pw *= &x;
        }
        let lower = fx.lo().to_rational() - &band;
        let upper = fx.hi().to_rational() + &band;
        rows.push(ConstraintRow::new(x, coeffs, lower, upper));
    }
    Ok(ConstraintSet { rows, a_sample, d, lambda: lambda.clone(), epsilon_hat: epsilon_hat.clone(), bits: bits.clone() })
}

/// Shrinks each `[lo_i, hi_i]` to `[ceil(min c_i), floor(max c_i)]` over the
/// polytope cut out by the box and the constraint rows.
pub fn lp_tighten(bx: &CandidateBox, cs: &ConstraintSet) -> CandidateBox {
    lp_tighten_with_vertices(bx, cs).0
}

/// [`lp_tighten`], also returning the optimal vertex of each of the `2(n+1)` LPs.
pub fn lp_tighten_with_vertices(bx: &CandidateBox, cs: &ConstraintSet) -> (CandidateBox, Vec<Vec<Rational>>) {
    if bx.is_empty() {
        return (CandidateBox::empty(bx.bits.clone()), Vec::new());
    }
    let n = bx.len();
    let lo_q: Vec<Rational> = bx.lo.iter().map(|v| Rational::from_integer(v.clone())).collect();
    // variables y_i = c_i - lo_i >= 0
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..n {
        let mut row = vec![Rational::zero(); n];
        row[i] = Rational::one();
        a.push(row);
        b.push(Rational::from_integer(&bx.hi[i] - &bx.lo[i]));
    }
    for r in &cs.rows {
        let w: Vec<Rational> = r.weights.iter().map(|v| Rational::from_integer(v.clone())).collect();
        let offset: Rational = w.iter().zip(&lo_q).map(|(x, y)| x * y).sum();
        a.push(w.clone());
        b.push(Rational::from_integer(r.hi.clone()) - &offset);
        a.push(w.iter().map(|v| -v.clone()).collect());
        b.push(offset - Rational::from_integer(r.lo.clone()));
    }
    let Some(t) = feasible(&a, &b) else {
        return (CandidateBox::empty(bx.bits.clone()), Vec::new());
    };
    let mut lo = bx.lo.clone();
    let mut hi = bx.hi.clone();
    let mut vertices = Vec::new();
    for i in 0..n {
        let mut c = vec![Rational::zero(); n];
        c[i] = Rational::one();
        for maximise in [false, true] {
            let out = if maximise { t.maximise(&c) } else { t.minimise(&c) };
            let LpOutcome::Optimal { value, x } = out else {
                unreachable!("bounded by the box")
            };
            if maximise {
                hi[i] = &bx.lo[i] + value.floor().to_integer();
            } else {
                lo[i] = &bx.lo[i] + value.ceil().to_integer();
            }
            vertices.push(x.iter().zip(&lo_q).map(|(y, l)| y + l).collect());
        }
    }
    let out = CandidateBox::new(lo, hi, bx.bits.clone());
    if out.is_empty() {
        return (CandidateBox::empty(bx.bits.clone()), vertices);
    }
    (out, vertices)
}
