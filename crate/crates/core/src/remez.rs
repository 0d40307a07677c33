//! Minimax approximation by the Remez exchange algorithm.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::funcexpr::{eval_enclosure, FunctionOracle};
use crate::numerics::{EvalError, Enclosure, Rational, Real, Round, DEFAULT_PRECISION};
use crate::poly::Polynomial;
use crate::supnorm::{Extremum, NormConfig, NormError, NormProbe, NormResult, DEFAULT_TOL};

const GUARD: u32 = 32;

#[derive(Clone, Debug, PartialEq)]
pub struct RemezConfig {
    /// Relative gap between the levelled error and the true maximum error at
    /// which the iteration stops.
    pub tol: f64,
    pub prec: u32,
    pub max_iterations: usize,
}

impl Default for RemezConfig {
    fn default() -> Self {
        RemezConfig { tol: DEFAULT_TOL, prec: DEFAULT_PRECISION, max_iterations: 60 }
    }
}

#[derive(Clone, Debug)]
pub struct MinimaxResult {
    pub p: Polynomial<Real>,
    /// Encloses `||f - p||` on `[0, a]`.
    pub epsilon: Enclosure,
    /// `n + 2` increasing abscissae with alternating signed errors.
    pub alternation: Vec<Extremum>,
    /// `|E|` after each exchange.
    pub history: Vec<Rational>,
}

impl MinimaxResult {
    pub fn iterations(&self) -> usize {
        self.history.len()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RemezError {
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("singular reference system")]
    Singular,
    #[error("no convergence after {iterations} iterations (relative gap {gap:.3e})")]
    NoConvergence { iterations: usize, gap: f64 },
}

/// Degree-`n` minimax approximation of `f` on `[0, a]` at the default precision.
pub fn minimax(f: &FunctionOracle, a: &Rational, n: usize, tol: f64) -> Result<MinimaxResult, RemezError> {
    minimax_with(f, a, n, &RemezConfig { tol, ..RemezConfig::default() })
}

pub fn minimax_with(f: &FunctionOracle, a: &Rational, n: usize, cfg: &RemezConfig) -> Result<MinimaxResult, RemezError> {
    let work = cfg.prec + GUARD;
    let probe = NormProbe::new(f, a, n, NormConfig { tol: cfg.tol / 16.0, prec: cfg.prec })?;
    let mut reference = chebyshev_reference(a, n, work);
    let mut history = Vec::new();
    let mut gap = f64::INFINITY;
    let tol = Real::from_f64(cfg.tol, 64);
    for _ in 0..cfg.max_iterations {
        let samples = reference
            .iter()
            .map(|x| Ok(eval_enclosure(f.expr(), x, work)?.mid().to_rational()))
            .collect::<Result<Vec<_>, EvalError>>()?;
        let (coeffs, level) = solve_reference(&reference, &samples, n).ok_or(RemezError::Singular)?;
        history.push(level.abs());
        let p = Polynomial::new(coeffs.iter().map(|c| Real::from_rational(c, work, Round::Nearest)).collect());
        let norm = probe.extrema(&p)?;
        let max_err = norm.value.hi().clone();
        let floor = sample_scale(&samples).mul_pow2(-(cfg.prec as i64 - 16));
        let level_r = Real::from_rational(&level.abs(), work, Round::Down);
        let diff = max_err.sub(&level_r, Round::Up);
        if max_err <= floor || diff <= max_err.mul(&tol, Round::Down) {
            let alternation = alternating_subset(&norm.extrema, n + 2).unwrap_or_else(|| {
                reference
                    .iter()
                    .map(|x| Extremum { x: x.clone(), error: error_at(&norm, x) })
                    .collect()
            });
            return Ok(MinimaxResult { p, epsilon: norm.value, alternation, history });
        }
        gap = diff.div(&max_err, Round::Up).to_f64();
        reference = match alternating_subset(&norm.extrema, n + 2) {
            Some(set) => set.into_iter().map(|e| e.x).collect(),
            None => single_exchange(&reference, &level, &norm),
        };
    }
    Err(RemezError::NoConvergence { iterations: cfg.max_iterations, gap })
}

/// Extrema of `T_(n+1)` mapped to `[0, a]`, as dyadic rationals.
fn chebyshev_reference(a: &Rational, n: usize, work: u32) -> Vec<Rational> {
    let m = n + 1;
    (0..=m)
        .map(|k| {
            if k == 0 {
                return Rational::zero();
            }
            if k == m {
                return Real::from_rational(a, work, Round::Down).to_rational();
            }
            let t = (1.0 - (k as f64 * std::f64::consts::PI / m as f64).cos()) / 2.0;
            let x = a * Rational::from_float(t).expect("finite");
            Real::from_rational(&x, work, Round::Nearest).to_rational()
        })
        .collect()
}

fn sample_scale(samples: &[Rational]) -> Real {
    samples
        .iter()
        .map(|s| Real::from_rational(&s.abs(), 64, Round::Up))
        .fold(Real::one(64), Real::max)
}

/// Solves `sum_i p_i x_k^i + (-1)^k E = f_k` exactly. Returns `(p, E)`.
fn solve_reference(xs: &[Rational], fs: &[Rational], n: usize) -> Option<(Vec<Rational>, Rational)> {
    let size = n + 2;
    let mut rows: Vec<Vec<Rational>> = xs
        .iter()
        .zip(fs)
        .enumerate()
        .map(|(k, (x, fx))| {
            let mut row = Vec::with_capacity(size + 1);
            let mut pw = Rational::from_integer(1.into());
            for _ in 0..=n {
                row.push(pw.clone());
                pw *= x;
            }
            row.push(Rational::from_integer(if k % 2 == 0 { 1 } else { -1 }.into()));
            row.push(fx.clone());
            row
        })
        .collect();
    let sol = gauss_solve(&mut rows, size)?;
    let level = sol[size - 1].clone();
    Some((sol[..size - 1].to_vec(), level))
}

/// Gaussian elimination on an augmented `size x (size + 1)` system.
pub(crate) fn gauss_solve(rows: &mut [Vec<Rational>], size: usize) -> Option<Vec<Rational>> {
    for col in 0..size {
        let piv = (col..size).find(|&r| !rows[r][col].is_zero())?;
        rows.swap(col, piv);
        let inv = rows[col][col].recip();
        for c in col..=size {
            rows[col][c] = &rows[col][c] * &inv;
        }
        for r in 0..size {
            if r == col || rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone();
            for c in col..=size {
                let delta = &factor * &rows[col][c];
                rows[r][c] -= delta;
            }
        }
    }
    Some(rows.iter().map(|r| r[size].clone()).collect())
}

/// The largest-magnitude alternating subsequence of exactly `count` points:
/// same-sign neighbours are merged keeping the larger, then the smaller end is
/// trimmed until `count` remain.
pub fn alternating_subset(extrema: &[Extremum], count: usize) -> Option<Vec<Extremum>> {
    let mut seq: Vec<Extremum> = Vec::new();
    for e in extrema {
        let Some(s) = e.error.sign() else { continue };
        match seq.last_mut() {
            Some(last) if last.error.sign() == Some(s) => {
                if e.error.mag_hi() > last.error.mag_hi() {
                    *last = e.clone();
                }
            }
            _ => seq.push(e.clone()),
        }
    }
    if seq.len() < count {
        return None;
    }
    while seq.len() > count {
        if seq[0].error.mag_hi() < seq[seq.len() - 1].error.mag_hi() {
            seq.remove(0);
        } else {
            seq.pop();
        }
    }
    Some(seq)
}

fn error_at(norm: &NormResult, x: &Rational) -> Enclosure {
    norm.extrema
        .iter()
        .min_by_key(|e| (&e.x - x).abs())
        .map(|e| e.error.clone())
        .expect("extrema include the endpoints")
}

/// Swaps the point of largest error into the reference, keeping signs
/// alternating.
fn single_exchange(reference: &[Rational], level: &Rational, norm: &NormResult) -> Vec<Rational> {
    let worst = norm
        .extrema
        .iter()
        .filter(|e| e.error.sign().is_some())
        .max_by(|a, b| a.error.mag_hi().cmp(&b.error.mag_hi()))
        .expect("extrema include the endpoints");
    let s = worst.error.sign().unwrap();
    let lsign = if level.is_negative() { -1 } else { 1 };
    let sign_at = |k: usize| if k % 2 == 0 { lsign } else { -lsign };
    let mut out = reference.to_vec();
    let last = out.len() - 1;
    let x = worst.x.clone();
    if x < out[0] {
        if sign_at(0) == s {
            out[0] = x;
        } else {
            out.pop();
            out.insert(0, x);
        }
    } else if x > out[last] {
        if sign_at(last) == s {
            out[last] = x;
        } else {
            out.remove(0);
            out.push(x);
        }
    } else if let Some(j) = (0..last).find(|&j| out[j] <= x && x <= out[j + 1]) {
        if sign_at(j) == s {
            out[j] = x;
        } else {
            out[j + 1] = x;
        }
    }
    out
}
