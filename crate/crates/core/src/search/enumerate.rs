//! Integer points of a candidate box cut by constraint rows.

use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::candidates::{CandidateBox, ConstraintSet};

/// Walks the integer tuples of `box ∩ rows` in lexicographic order.
///
/// At depth `k` each row, with the prefix fixed and the remaining coordinates
/// free in the box, bounds `c_k` to an interval; at the last depth this is
/// exact, so every emitted tuple satisfies every row and none is skipped.
pub struct PointWalker<'a> {
    bx: &'a CandidateBox,
    weights: Vec<&'a [BigInt]>,
    lo: Vec<&'a BigInt>,
    hi: Vec<&'a BigInt>,
    /// `rest_min[j][k]` = min over the box of `sum_{i >= k} w_ji c_i`.
    rest_min: Vec<Vec<BigInt>>,
    rest_max: Vec<Vec<BigInt>>,
}

impl<'a> PointWalker<'a> {
    pub fn new(bx: &'a CandidateBox, cs: &'a ConstraintSet) -> Self {
        let n = bx.len();
        let mut rest_min = Vec::with_capacity(cs.len());
        let mut rest_max = Vec::with_capacity(cs.len());
        for r in &cs.rows {
            let mut mn = vec![BigInt::zero(); n + 1];
            let mut mx = vec![BigInt::zero(); n + 1];
            for i in (0..n).rev() {
                let a = &r.weights[i] * &bx.lo[i];
                let b = &r.weights[i] * &bx.hi[i];
                let (small, big) = if a <= b { (a, b) } else { (b, a) };
                mn[i] = &mn[i + 1] + small;
                mx[i] = &mx[i + 1] + big;
            }
            rest_min.push(mn);
            rest_max.push(mx);
        }
        PointWalker {
            bx,
            weights: cs.rows.iter().map(|r| r.weights.as_slice()).collect(),
            lo: cs.rows.iter().map(|r| &r.lo).collect(),
            hi: cs.rows.iter().map(|r| &r.hi).collect(),
            rest_min,
            rest_max,
        }
    }

    /// Calls `visit` on each point until it breaks. Returns the number of
    /// points visited.
    pub fn walk(&self, mut visit: impl FnMut(&[BigInt]) -> ControlFlow<()>) -> u64 {
        if self.bx.is_empty() {
            return 0;
        }
        let mut c = self.bx.lo.clone();
        let partial = vec![BigInt::zero(); self.weights.len()];
        let mut count = 0;
        let _ = self.descend(0, &partial, &mut c, &mut visit, &mut count);
        count
    }

    fn descend(
        &self,
        k: usize,
        partial: &[BigInt],
        c: &mut Vec<BigInt>,
        visit: &mut impl FnMut(&[BigInt]) -> ControlFlow<()>,
        count: &mut u64,
    ) -> ControlFlow<()> {
        let n = c.len();
        let Some((from, to)) = self.range(k, partial) else {
            return ControlFlow::Continue(());
        };
        let mut v = from;
        while v <= to {
            c[k] = v.clone();
            if k + 1 == n {
                *count += 1;
                visit(c)?;
            } else {
                let next: Vec<BigInt> = partial.iter().zip(&self.weights).map(|(s, w)| s + &w[k] * &v).collect();
                self.descend(k + 1, &next, c, visit, count)?;
            }
            v += 1;
        }
        ControlFlow::Continue(())
    }

    fn range(&self, k: usize, partial: &[BigInt]) -> Option<(BigInt, BigInt)> {
        let mut from = self.bx.lo[k].clone();
        let mut to = self.bx.hi[k].clone();
        for j in 0..self.weights.len() {
            let w = &self.weights[j][k];
            // need  lo_j - s - rest_max  <=  w c  <=  hi_j - s - rest_min
            let upper = self.hi[j] - &partial[j] - &self.rest_min[j][k + 1];
            let lower = self.lo[j] - &partial[j] - &self.rest_max[j][k + 1];
            if w.is_zero() {
                if lower.is_positive() || upper.is_negative() {
                    return None;
                }
                continue;
            }
            let (a, b) = if w.is_positive() {
                (ceil_div(&lower, w), upper.div_floor(w))
            } else {
                (ceil_div(&upper, w), lower.div_floor(w))
            };
            from = from.max(a);
            to = to.min(b);
            if from > to {
                return None;
            }
        }
        Some((from, to))
    }
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::candidates::{BitBudget, ConstraintRow};
    use crate::numerics::Rational;
    use proptest::prelude::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn rows(spec: &[(&[i64], i64, i64)], bits: &BitBudget) -> ConstraintSet {
        let rows = spec
            .iter()
            .map(|(w, lo, hi)| ConstraintRow {
                x: Rational::zero(),
                coeffs: Vec::new(),
                lower: Rational::zero(),
                upper: Rational::zero(),
                weights: big(w),
                lo: BigInt::from(*lo),
                hi: BigInt::from(*hi),
            })
            .collect();
        ConstraintSet { rows, ..ConstraintSet::unconstrained(bits.clone()) }
    }

    fn naive(bx: &CandidateBox, cs: &ConstraintSet) -> Vec<Vec<BigInt>> {
        let mut out = Vec::new();
        let mut c = bx.lo.clone();
        loop {
            if cs.satisfied(&c) {
                out.push(c.clone());
            }
            let mut i = c.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if c[i] < bx.hi[i] {
                    c[i] += 1;
                    break;
                }
                c[i] = bx.lo[i].clone();
            }
        }
    }

    fn collect(bx: &CandidateBox, cs: &ConstraintSet) -> Vec<Vec<BigInt>> {
        let mut out = Vec::new();
        PointWalker::new(bx, cs).walk(|c| {
            out.push(c.to_vec());
            ControlFlow::Continue(())
        });
        out
    }

    #[test]
    fn unconstrained_box_is_walked_in_order() {
        let bits = BitBudget::new(vec![0, 0]);
        let bx = CandidateBox::new(big(&[0, -1]), big(&[1, 1]), bits.clone());
        let got = collect(&bx, &ConstraintSet::unconstrained(bits));
        assert_eq!(got.len(), 6);
        assert_eq!(got[0], big(&[0, -1]));
        assert_eq!(got[5], big(&[1, 1]));
    }

    #[test]
    fn diagonal_band() {
        let bits = BitBudget::new(vec![0, 0]);
        let bx = CandidateBox::new(big(&[0, 0]), big(&[5, 5]), bits.clone());
        let cs = rows(&[(&[1, -1], 0, 0)], &bits);
        assert_eq!(collect(&bx, &cs), (0..=5).map(|v| big(&[v, v])).collect::<Vec<_>>());
    }

    #[test]
    fn early_stop() {
        let bits = BitBudget::new(vec![0, 0]);
        let bx = CandidateBox::new(big(&[0, 0]), big(&[9, 9]), bits.clone());
        let mut seen = 0;
        let n = PointWalker::new(&bx, &ConstraintSet::unconstrained(bits)).walk(|_| {
            seen += 1;
            if seen == 7 { ControlFlow::Break(()) } else { ControlFlow::Continue(()) }
        });
        assert_eq!((n, seen), (7, 7));
    }

    proptest! {
        #[test]
        fn walker_matches_filtered_scan(
            lo in proptest::collection::vec(-4i64..3, 3),
            span in proptest::collection::vec(0i64..5, 3),
            ws in proptest::collection::vec((proptest::collection::vec(-5i64..6, 3), -20i64..20, 0i64..15), 0..4),
        ) {
            let bits = BitBudget::new(vec![0, 0, 0]);
            let hi: Vec<i64> = lo.iter().zip(&span).map(|(l, s)| l + s).collect();
            let bx = CandidateBox::new(big(&lo), big(&hi), bits.clone());
            let spec: Vec<(&[i64], i64, i64)> = ws.iter().map(|(w, l, s)| (w.as_slice(), *l, l + s)).collect();
            let cs = rows(&spec, &bits);
            prop_assert_eq!(collect(&bx, &cs), naive(&bx, &cs));
        }
    }
}
