//! Independent reference search: every tuple of a small box, each scored on a
//! dense uniform grid.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use super::{PointWalker, SearchError, SearchResult};
use crate::candidates::{BitBudget, CandidateBox, ConstraintSet};
use crate::funcexpr::FunctionOracle;
use crate::numerics::{Enclosure, Rational, Real, Round};
use crate::poly::horner;

/// Largest box [`brute_force_oracle`] accepts.
pub const BRUTE_FORCE_CAP: u64 = 1_000_000;

const CELLS: u32 = 2048;
const PREC: u32 = 192;

/// Scores every tuple of `wide_box` by its dense-grid error and returns the
/// smallest, ties going to the lexicographically smallest tuple.
///
/// The error enclosure is `[grid max, grid max + h^2 M / 8]` where `M` bounds
/// `|f'' - q''|` on `[0, a]`: an interior extremum is within `h/2` of a grid
/// point and `e' = 0` there.
pub fn brute_force_oracle(
    f: &FunctionOracle,
    a: &Rational,
    bits: &BitBudget,
    wide_box: &CandidateBox,
) -> Result<SearchResult, SearchError> {
    if wide_box.is_empty() {
        return Err(SearchError::EmptyBox);
    }
    let total = wide_box.total();
    if total > BigInt::from(BRUTE_FORCE_CAP) {
        return Err(SearchError::TooMany { count: total.to_string(), cap: BRUTE_FORCE_CAP });
    }
    let n = bits.len();
    let xs: Vec<Enclosure> = (0..=CELLS)
        .map(|k| Enclosure::from_rational(&(a * Rational::new(k.into(), CELLS.into())), PREC))
        .collect();
    let fs = xs.iter().map(|x| f.value(x)).collect::<Result<Vec<_>, _>>()?;
    // x^i / 2^m_i at every grid point
    let powers: Vec<Vec<Enclosure>> = xs
        .iter()
        .map(|x| {
            let mut p = Enclosure::one(PREC);
            (0..n)
                .map(|i| {
                    let v = p.mul_pow2(-bits.m(i));
                    p = p.mul(x);
                    v
                })
                .collect()
        })
        .collect();

    let whole = Enclosure::new(Real::zero(PREC), Real::from_rational(a, PREC, Round::Up));
    let f2 = FunctionOracle::new(f.derivative().differentiate()).value(&whole)?.mag_hi();
    let h = Enclosure::from_rational(&(a / Rational::from_integer(CELLS.into())), PREC);
    let h2_8 = h.sqr().div_int(8);

    let mut tuples = Vec::new();
    PointWalker::new(wide_box, &ConstraintSet::unconstrained(bits.clone())).walk(|c| {
        tuples.push(c.to_vec());
        std::ops::ControlFlow::Continue(())
    });

    let scored: Vec<(Real, Enclosure)> = tuples
        .par_iter()
        .map(|c| {
            let mut best = Real::zero(PREC);
            let mut best_hi = Real::zero(PREC);
            for (fx, pw) in fs.iter().zip(&powers) {
                let mut q = Enclosure::zero(PREC);
                for (ci, p) in c.iter().zip(pw) {
                    if !ci.is_zero() {
                        q = q.add(&p.mul_int(ci));
                    }
                }
                let e = fx.sub(&q);
                best = best.max(e.mag_lo());
                best_hi = best_hi.max(e.mag_hi());
            }
            let q2 = second_derivative_bound(bits, c, &whole);
            let slack = h2_8.mul(&Enclosure::point(f2.add(&q2, Round::Up))).hi().clone();
            let err = Enclosure::new(best.clone(), best_hi.add(&slack, Round::Up));
            (best, err)
        })
        .collect();

    let mut win = 0;
    for k in 1..scored.len() {
        if scored[k].0 < scored[win].0 {
            win = k;
        }
    }
    let scaled = tuples[win].clone();
    Ok(SearchResult {
        pstar: bits.polynomial(&scaled),
        scaled,
        error: scored[win].1.clone(),
        checked: tuples.len().to_u64().unwrap_or(u64::MAX),
        pruned: BigInt::zero(),
        feasible: true,
        unconstrained_fallback: false,
    })
}

/// Upper bound of `|q''|` on the interval `x`.
fn second_derivative_bound(bits: &BitBudget, c: &[BigInt], x: &Enclosure) -> Real {
    let coeffs: Vec<Enclosure> = (2..c.len())
        .map(|i| {
            let k = BigInt::from(i * (i - 1)) * &c[i];
            Enclosure::from_bigint(&k, PREC).mul_pow2(-bits.m(i))
        })
        .collect();
    if coeffs.is_empty() {
        return Real::zero(PREC);
    }
    horner(&coeffs, x).mag_hi()
}
