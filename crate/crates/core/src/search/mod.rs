//! Exhaustive search for the best truncated polynomial in a candidate box.
//!
//! Tuples come from [`PointWalker`], so only integer points of the sampled
//! polytope are visited. Each survivor is first tested against a handful of
//! cached sample points, then gets a sup norm that stops early once it is
//! certainly worse than the best upper bound seen so far. The cutoff is only
//! ever used to drop candidates that are strictly worse than some other
//! candidate, so the winner does not depend on evaluation order.

mod enumerate;
mod oracle;

use std::cmp::Ordering as CmpOrdering;
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use rayon::prelude::*;
use thiserror::Error;

use crate::candidates::{CandidateBox, ConstraintSet};
use crate::funcexpr::FunctionOracle;
use crate::numerics::{EvalError, Enclosure, Rational, Real, Round, DEFAULT_PRECISION};
use crate::poly::Polynomial;
use crate::supnorm::{Bounded, NormConfig, NormError, NormProbe, SamplePoints, DEFAULT_TOL};

pub use enumerate::PointWalker;
pub use oracle::{brute_force_oracle, BRUTE_FORCE_CAP};

const BATCH: usize = 1024;
const UNIFORM_POINTS: u32 = 16;

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub tol: f64,
    pub prec: u32,
    /// Worker threads; 0 lets the thread pool decide.
    pub workers: usize,
    /// A tuple to evaluate first, typically the naive rounding. Ignored if it
    /// lies outside the polytope.
    pub hint: Option<Vec<BigInt>>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { tol: DEFAULT_TOL, prec: DEFAULT_PRECISION, workers: 0, hint: None }
    }
}

/// Snapshot passed to the progress callback after each batch.
#[derive(Clone, Debug)]
pub struct Progress {
    pub visited: u64,
    pub checked: u64,
    pub pruned: u64,
    /// Upper bound on the best error so far.
    pub best: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub pstar: Polynomial<Rational>,
    /// Scaled coefficients `2^m_i p*_i`.
    pub scaled: Vec<BigInt>,
    pub error: Enclosure,
    /// Candidates whose norm was computed to the tolerance.
    pub checked: u64,
    /// Box tuples rejected by the constraint rows, the sample points or a
    /// norm cutoff.
    pub pruned: BigInt,
    pub feasible: bool,
    /// True if the constraint rows admitted no tuple and the box was searched
    /// without them.
    pub unconstrained_fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("the candidate box is empty")]
    EmptyBox,
    #[error("box holds {count} tuples, above the cap of {cap}")]
    TooMany { count: String, cap: u64 },
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// The minimum-norm tuple of `bx` satisfying `cs`, with default settings.
pub fn best_truncated(
    f: &FunctionOracle,
    a: &Rational,
    bx: &CandidateBox,
    cs: &ConstraintSet,
    lambda_bound: &Real,
    tol: f64,
) -> Result<SearchResult, SearchError> {
    let cfg = SearchConfig { tol, ..SearchConfig::default() };
    best_truncated_with(f, a, bx, cs, lambda_bound, &cfg, None)
}

pub fn best_truncated_with(
    f: &FunctionOracle,
    a: &Rational,
    bx: &CandidateBox,
    cs: &ConstraintSet,
    lambda_bound: &Real,
    cfg: &SearchConfig,
    progress: Option<&(dyn Fn(&Progress) + Sync)>,
) -> Result<SearchResult, SearchError> {
    if bx.is_empty() {
        return Err(SearchError::EmptyBox);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .expect("thread pool");
    pool.install(|| {
        let probe = NormProbe::new(f, a, bx.bits.degree(), NormConfig { tol: cfg.tol, prec: cfg.prec })?;
        let mut out = Searcher::new(&probe, bx, cs, cfg)?.run(progress)?;
        if out.is_none() && !cs.is_empty() {
            let free = ConstraintSet::unconstrained(bx.bits.clone());
            out = Searcher::new(&probe, bx, &free, cfg)?.run(progress)?;
            if let Some(r) = out.as_mut() {
                r.unconstrained_fallback = true;
            }
        }
        let mut r = out.ok_or(SearchError::EmptyBox)?;
        let bound = lambda_bound.mul(&Real::from_f64(1.0 + cfg.tol, 64), Round::Up);
        r.feasible = *r.error.hi() <= bound;
        Ok(r)
    })
}

struct Searcher<'p, 'f> {
    probe: &'p NormProbe<'f>,
    bx: &'p CandidateBox,
    cs: &'p ConstraintSet,
    cfg: &'p SearchConfig,
    points: SamplePoints,
    /// f64 bits of an upper bound on the best error found so far.
    incumbent: AtomicU64,
}

enum Verdict {
    Pruned,
    Within(Enclosure),
}

impl<'p, 'f> Searcher<'p, 'f> {
    fn new(probe: &'p NormProbe<'f>, bx: &'p CandidateBox, cs: &'p ConstraintSet, cfg: &'p SearchConfig) -> Result<Self, SearchError> {
        let a = probe.endpoint();
        let mut xs = cs.points();
        xs.extend((0..=UNIFORM_POINTS).map(|k| a * Rational::new(k.into(), UNIFORM_POINTS.into())));
        let points = SamplePoints::new(probe.oracle(), &xs, cfg.prec)?;
        Ok(Searcher { probe, bx, cs, cfg, points, incumbent: AtomicU64::new(f64::INFINITY.to_bits()) })
    }

    fn cutoff(&self) -> Option<Real> {
        let v = f64::from_bits(self.incumbent.load(Ordering::Relaxed));
        v.is_finite().then(|| Real::from_f64(v, 64))
    }

    fn offer(&self, hi: &Real) {
        let v = hi.to_f64_directed(Round::Up);
        if v.is_finite() && v >= 0.0 {
            self.incumbent.fetch_min(v.to_bits(), Ordering::Relaxed);
        }
    }

    fn judge(&self, c: &[BigInt]) -> Result<Verdict, SearchError> {
        let q = self.bx.bits.polynomial(c);
        let cutoff = self.cutoff();
        if let Some(cut) = &cutoff {
            let qc = q.enclose_coeffs(self.points.work());
            if self.points.exceeds(&qc, cut) {
                return Ok(Verdict::Pruned);
            }
        }
        let r = match &cutoff {
            Some(cut) => match self.probe.norm_below(&q, cut)? {
                Bounded::Within(r) => r,
                Bounded::Exceeds { .. } => return Ok(Verdict::Pruned),
            },
            None => self.probe.norm(&q)?,
        };
        self.offer(r.value.hi());
        Ok(Verdict::Within(r.value))
    }

    /// `None` if no tuple of the box satisfies the rows.
    fn run(&self, progress: Option<&(dyn Fn(&Progress) + Sync)>) -> Result<Option<SearchResult>, SearchError> {
        let mut contenders: Vec<(Vec<BigInt>, Enclosure)> = Vec::new();
        let mut checked = 0u64;
        let mut pruned = 0u64;
        let mut visited = 0u64;

        let hint = self.cfg.hint.as_deref().filter(|h| h.len() == self.bx.len() && self.bx.contains(h) && self.cs.satisfied(h));
        if let Some(h) = hint {
            if let Verdict::Within(e) = self.judge(h)? {
                checked += 1;
                contenders.push((h.to_vec(), e));
            }
        }

        let mut batch: Vec<Vec<BigInt>> = Vec::with_capacity(BATCH);
        let mut flush = |batch: &mut Vec<Vec<BigInt>>, visited: u64| -> Result<(), SearchError> {
            let verdicts: Vec<Result<Verdict, SearchError>> = batch.par_iter().map(|c| self.judge(c)).collect();
            for (c, v) in batch.drain(..).zip(verdicts) {
                match v? {
                    Verdict::Pruned => pruned += 1,
                    Verdict::Within(e) => {
                        checked += 1;
                        contenders.push((c, e));
                    }
                }
            }
            if let Some(cut) = self.cutoff() {
                contenders.retain(|(_, e)| *e.lo() <= cut);
            }
            if let Some(p) = progress {
                p(&Progress { visited, checked, pruned, best: self.cutoff().map(|r| r.to_f64()) });
            }
            Ok(())
        };

        let mut failure = None;
        PointWalker::new(self.bx, self.cs).walk(|c| {
            visited += 1;
            if Some(c) == hint {
                return ControlFlow::Continue(());
            }
            batch.push(c.to_vec());
            if batch.len() == BATCH {
                if let Err(e) = flush(&mut batch, visited) {
                    failure = Some(e);
                    return ControlFlow::Break(());
                }
            }
            ControlFlow::Continue(())
        });
        if let Some(e) = failure {
            return Err(e);
        }
        flush(&mut batch, visited)?;
        drop(flush);
        if visited == 0 {
            return Ok(None);
        }

        let (scaled, error) = self.resolve(contenders)?;
        Ok(Some(SearchResult {
            pstar: self.bx.bits.polynomial(&scaled),
            scaled,
            error,
            checked,
            pruned: self.bx.total() - BigInt::from(checked),
            feasible: false,
            unconstrained_fallback: false,
        }))
    }

    /// Picks the winner among the surviving contenders: the smallest error,
    /// and among enclosures that still overlap after recomputation at twice
    /// the precision, the lexicographically smallest tuple.
    fn resolve(&self, mut contenders: Vec<(Vec<BigInt>, Enclosure)>) -> Result<(Vec<BigInt>, Enclosure), SearchError> {
        overlapping_min(&mut contenders);
        if contenders.len() > 1 {
            let fine = NormProbe::new(
                self.probe.oracle(),
                self.probe.endpoint(),
                self.bx.bits.degree(),
                NormConfig { tol: self.cfg.tol * 2f64.powi(-20), prec: 2 * self.cfg.prec },
            )?;
            contenders = contenders
                .into_par_iter()
                .map(|(c, _)| fine.norm(&self.bx.bits.polynomial(&c)).map(|r| (c, r.value)))
                .collect::<Result<_, _>>()?;
            overlapping_min(&mut contenders);
        }
        let (scaled, _) = contenders.into_iter().min_by(|x, y| x.0.cmp(&y.0)).expect("at least one contender");
        // a fresh norm without cutoff, so the reported enclosure does not
        // depend on which cutoffs were in force
        let error = self.probe.norm(&self.bx.bits.polynomial(&scaled))?.value;
        Ok((scaled, error))
    }
}

/// Keeps the contenders whose enclosure reaches down to the smallest upper
/// bound.
fn overlapping_min(contenders: &mut Vec<(Vec<BigInt>, Enclosure)>) {
    let Some(best) = contenders.iter().map(|(_, e)| e.hi().clone()).min_by(|x, y| x.partial_cmp(y).unwrap_or(CmpOrdering::Equal)) else {
        return;
    };
    contenders.retain(|(_, e)| *e.lo() <= best);
}
