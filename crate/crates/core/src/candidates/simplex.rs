//! Dense two-phase primal simplex over exact rationals, with Bland's rule.
//!
//! Problems have the form `max c·x` subject to `A x <= b`, `x >= 0`.

use num_traits::{One, Signed, Zero};

use crate::numerics::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, x: Vec<Rational> },
    Unbounded,
}

/// A tableau that has passed phase one and can be re-optimised for any
/// objective over the original variables.
#[derive(Clone, Debug)]
pub struct FeasibleTableau {
    vars: usize,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
}

/// Runs phase one. `None` if `A x <= b, x >= 0` has no solution.
pub fn feasible(a: &[Vec<Rational>], b: &[Rational]) -> Option<FeasibleTableau> {
    let m = a.len();
    let vars = a.first().map_or(0, Vec::len);
    let negative: Vec<usize> = (0..m).filter(|&i| b[i].is_negative()).collect();
    // columns: originals, one slack per row, one artificial per negative row
    let cols = vars + m + negative.len();
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![Rational::zero(); cols];
        let flip = b[i].is_negative();
        for j in 0..vars {
            row[j] = if flip { -a[i][j].clone() } else { a[i][j].clone() };
        }
        row[vars + i] = if flip { -Rational::one() } else { Rational::one() };
        if flip {
            let art = vars + m + negative.iter().position(|&r| r == i).unwrap();
            row[art] = Rational::one();
            basis.push(art);
        } else {
            basis.push(vars + i);
        }
        rhs.push(b[i].abs());
        rows.push(row);
    }
    let mut t = Tableau { rows, rhs, basis };
    if !negative.is_empty() {
        let mut cost = vec![Rational::zero(); cols];
        for c in cost.iter_mut().skip(vars + m) {
            *c = -Rational::one();
        }
        t.optimise(&cost, cols);
        if t.value(&cost).is_negative() {
            return None;
        }
        t.expel_artificials(vars + m);
    }
    // drop artificial columns
    for row in t.rows.iter_mut() {
        row.truncate(vars + m);
    }
    Some(FeasibleTableau { vars, rows: t.rows, rhs: t.rhs, basis: t.basis })
}

impl FeasibleTableau {
    /// Maximises `c·x` over the feasible set.
    pub fn maximise(&self, c: &[Rational]) -> LpOutcome {
        let cols = self.rows.first().map_or(self.vars, Vec::len);
        let mut cost = vec![Rational::zero(); cols];
        cost[..self.vars].clone_from_slice(c);
        let mut t = Tableau { rows: self.rows.clone(), rhs: self.rhs.clone(), basis: self.basis.clone() };
        if !t.optimise(&cost, cols) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![Rational::zero(); self.vars];
        for (i, &bv) in t.basis.iter().enumerate() {
            if bv < self.vars {
                x[bv] = t.rhs[i].clone();
            }
        }
        LpOutcome::Optimal { value: t.value(&cost), x }
    }

    pub fn minimise(&self, c: &[Rational]) -> LpOutcome {
        let neg: Vec<Rational> = c.iter().map(|v| -v.clone()).collect();
        match self.maximise(&neg) {
            LpOutcome::Optimal { value, x } => LpOutcome::Optimal { value: -value, x },
            LpOutcome::Unbounded => LpOutcome::Unbounded,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn value(&self, cost: &[Rational]) -> Rational {
        self.basis.iter().zip(&self.rhs).map(|(&b, v)| &cost[b] * v).sum()
    }

    /// Primal simplex on the first `cols` columns. Returns `false` if unbounded.
    fn optimise(&mut self, cost: &[Rational], cols: usize) -> bool {
        loop {
            // Bland: lowest-index column with positive reduced cost
            let entering = (0..cols).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let z: Rational = self.basis.iter().zip(&self.rows).map(|(&b, r)| &cost[b] * &r[j]).sum();
                (&cost[j] - z).is_positive()
            });
            let Some(j) = entering else { return true };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let aij = &self.rows[i][j];
                if !aij.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / aij;
                let better = match &leave {
                    None => true,
                    Some((k, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((i, _)) = leave else { return false };
            self.pivot(i, j);
        }
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let inv = self.rows[pr][pc].recip();
        for v in self.rows[pr].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        self.rhs[pr] *= &inv;
        let prow = self.rows[pr].clone();
        let prhs = self.rhs[pr].clone();
        for i in 0..self.rows.len() {
            if i == pr || self.rows[i][pc].is_zero() {
                continue;
            }
            let factor = self.rows[i][pc].clone();
            for (v, p) in self.rows[i].iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
            self.rhs[i] -= &factor * &prhs;
        }
        self.basis[pr] = pc;
    }

    /// Pivots zero-level artificials out of the basis; rows where that is
    /// impossible are redundant and removed.
    fn expel_artificials(&mut self, first_art: usize) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= first_art {
                match (0..first_art).find(|&j| !self.rows[i][j].is_zero()) {
                    Some(j) => self.pivot(i, j),
                    None => {
                        self.rows.remove(i);
                        self.rhs.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }
}
