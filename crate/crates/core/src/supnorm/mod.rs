//! Certified sup norms `||f - q||` on `[0, a]`.
//!
//! The error `e = f - q` and its derivative are enclosed on a uniform grid.
//! Cells where `e'` changes sign hold a local extremum; such a cell is shrunk
//! by safeguarded regula falsi on `e'` until the tangent lines at its two ends
//! pin the extremum value down to the requested relative tolerance. On a cell
//! where `s·e` is concave, `s·e` lies below both tangents, so the height where
//! they cross bounds the extremum from above.

mod points;

use num_traits::Signed;
use thiserror::Error;

use crate::funcexpr::FunctionOracle;
use crate::numerics::{EvalError, Enclosure, Rational, Real, Round, DEFAULT_PRECISION};
use crate::poly::{horner, Coefficient, Polynomial};

pub use points::{grid_lower_bound, SamplePoints};

/// `2^-40`, the default relative tolerance.
pub const DEFAULT_TOL: f64 = 9.094947017729282e-13;

const GUARD: u32 = 32;
const ESCALATIONS: u32 = 2;
const MAX_STEPS: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct NormConfig {
    /// Relative width allowed for the returned enclosure.
    pub tol: f64,
    /// Target precision in bits; evaluation runs a little above it.
    pub prec: u32,
}

impl Default for NormConfig {
    fn default() -> Self {
        NormConfig { tol: DEFAULT_TOL, prec: DEFAULT_PRECISION }
    }
}

/// A local extremum of the signed error `f - q`.
#[derive(Clone, Debug)]
pub struct Extremum {
    pub x: Rational,
    pub error: Enclosure,
}

#[derive(Clone, Debug)]
pub struct NormResult {
    /// Encloses `max |f - q|` over `[0, a]`.
    pub value: Enclosure,
    /// A point where `|f - q| >= value.lo`.
    pub witness: Rational,
    /// Endpoints and located local extrema, sorted by abscissa.
    pub extrema: Vec<Extremum>,
}

/// Outcome of a norm computation with a cutoff.
#[derive(Clone, Debug)]
pub enum Bounded {
    Within(NormResult),
    /// The norm is certainly larger than the cutoff.
    Exceeds { lower: Real },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("unresolved norm: enclosure [{lo}, {hi}] is wider than the tolerance")]
    Unresolved { lo: String, hi: String },
    #[error("interval endpoint must be positive, got {0}")]
    BadEndpoint(String),
}

/// `||f - q||` on `[0, a]` at the default precision.
pub fn sup_norm<T: Coefficient>(
    f: &FunctionOracle,
    q: &Polynomial<T>,
    a: &Rational,
    tol: f64,
) -> Result<NormResult, NormError> {
    let cfg = NormConfig { tol, ..NormConfig::default() };
    NormProbe::new(f, a, q.degree_bound(), cfg)?.norm(q)
}

/// Number of initial grid cells for a given degree.
pub fn grid_size(degree: usize) -> usize {
    64.max(32 * (degree + 1))
}

/// A function and interval with `f` and `f'` cached on the initial grid, for
/// evaluating many polynomials against the same `f`.
pub struct NormProbe<'f> {
    f: &'f FunctionOracle,
    a: Rational,
    cfg: NormConfig,
    base: Grid,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Refine only cells that can still raise the maximum.
    Norm,
    /// Refine every local extremum to the tolerance.
    Extrema,
}

impl<'f> NormProbe<'f> {
    pub fn new(f: &'f FunctionOracle, a: &Rational, degree: usize, cfg: NormConfig) -> Result<Self, NormError> {
        if !a.is_positive() {
            return Err(NormError::BadEndpoint(a.to_string()));
        }
        let base = Grid::build(f, a, grid_size(degree), cfg.prec + GUARD)?;
        Ok(NormProbe { f, a: a.clone(), cfg, base })
    }

    pub fn config(&self) -> &NormConfig {
        &self.cfg
    }

    pub fn endpoint(&self) -> &Rational {
        &self.a
    }

    pub fn oracle(&self) -> &FunctionOracle {
        self.f
    }

    pub fn norm<T: Coefficient>(&self, q: &Polynomial<T>) -> Result<NormResult, NormError> {
        match self.run(q, Mode::Norm, None)? {
            Bounded::Within(r) => Ok(r),
            Bounded::Exceeds { .. } => unreachable!("no cutoff given"),
        }
    }

    /// Like [`NormProbe::norm`], but stops as soon as the norm is certainly
    /// above `cutoff`.
    pub fn norm_below<T: Coefficient>(&self, q: &Polynomial<T>, cutoff: &Real) -> Result<Bounded, NormError> {
        self.run(q, Mode::Norm, Some(cutoff))
    }

    /// The norm with every local extremum of `f - q` located to the tolerance.
    pub fn extrema<T: Coefficient>(&self, q: &Polynomial<T>) -> Result<NormResult, NormError> {
        match self.run(q, Mode::Extrema, None)? {
            Bounded::Within(r) => Ok(r),
            Bounded::Exceeds { .. } => unreachable!("no cutoff given"),
        }
    }

    fn run<T: Coefficient>(&self, q: &Polynomial<T>, mode: Mode, cutoff: Option<&Real>) -> Result<Bounded, NormError> {
        let q = q.to_rational();
        let mut last = None;
        for level in 0..=ESCALATIONS {
            let owned;
            let grid = if level == 0 {
                &self.base
            } else {
                let n = (self.base.xs.len() - 1) << level;
                owned = Grid::build(self.f, &self.a, n, (self.cfg.prec << level) + GUARD)?;
                &owned
            };
            let scan = Scan::new(self.f, grid, &q, &self.cfg, mode, cutoff);
            match scan.run()? {
                Outcome::Done(r) => return Ok(Bounded::Within(r)),
                Outcome::Exceeds(lower) => return Ok(Bounded::Exceeds { lower }),
                Outcome::Wide(lo, hi) => last = Some((lo, hi)),
            }
        }
        let (lo, hi) = last.unwrap();
        Err(NormError::Unresolved { lo: lo.to_decimal(12), hi: hi.to_decimal(12) })
    }
}

struct Grid {
    work: u32,
    xs: Vec<Real>,
    fs: Vec<Enclosure>,
    dfs: Vec<Enclosure>,
    /// `2^-(prec - 16) max(1, |f|)`: norms below this count as resolved.
    floor: Real,
}

impl Grid {
    fn build(f: &FunctionOracle, a: &Rational, cells: usize, work: u32) -> Result<Grid, NormError> {
        let mut xs = Vec::with_capacity(cells + 1);
        let mut fs = Vec::with_capacity(cells + 1);
        let mut dfs = Vec::with_capacity(cells + 1);
        let mut fmax = Real::one(work);
        for k in 0..=cells {
            let x = if k == cells {
                Real::from_rational(a, work, Round::Down)
            } else {
                Real::from_rational(&(a * Rational::from_integer(k.into()) / Rational::from_integer(cells.into())), work, Round::Nearest)
            };
            let xe = Enclosure::point(x.clone());
            let fx = f.value(&xe)?;
            fmax = fmax.max(fx.mag_hi());
            dfs.push(f.slope(&xe)?);
            fs.push(fx);
            xs.push(x);
        }
        let floor = fmax.mul_pow2(-(work as i64 - GUARD as i64 - 16));
        Ok(Grid { work, xs, fs, dfs, floor })
    }
}

#[derive(Clone)]
struct Pt {
    x: Real,
    e: Enclosure,
    de: Enclosure,
}

impl Pt {
    /// Certified lower bound of `s·e`.
    fn g_lo(&self, s: i32) -> Real {
        if s > 0 { self.e.lo().clone() } else { self.e.hi().neg() }
    }

    fn g_hi(&self, s: i32) -> Real {
        if s > 0 { self.e.hi().clone() } else { self.e.lo().neg() }
    }

    /// Upper bound of `s·e'`, clamped at zero.
    fn slope_up(&self, s: i32) -> Real {
        let v = if s > 0 { self.de.hi().clone() } else { self.de.lo().neg() };
        v.max(Real::zero(64))
    }

    fn de_sign(&self) -> Option<i32> {
        self.de.sign()
    }
}

/// Upper bound of `s·e` on `[u, v]`, valid where `s·e` is concave: the
/// height where the tangents at `u` and `v` cross.
fn tangent_bound(s: i32, u: &Pt, v: &Pt) -> Real {
    let gu = u.g_hi(s);
    let gv = v.g_hi(s);
    let du = u.slope_up(s);
    let dv = v.slope_up(-s);
    let ends = gu.clone().max(gv.clone());
    if du.is_zero() && dv.is_zero() {
        return ends;
    }
    let len = v.x.sub(&u.x, Round::Up);
    let num = gu
        .mul(&dv, Round::Up)
        .add(&gv.mul(&du, Round::Up), Round::Up)
        .add(&du.mul(&dv, Round::Up).mul(&len, Round::Up), Round::Up);
    let den = du.add(&dv, Round::Down);
    num.div(&den, Round::Up).max(ends)
}

fn mag_hi_pt(p: &Pt) -> Real {
    p.e.mag_hi()
}

enum Outcome {
    Done(NormResult),
    Exceeds(Real),
    Wide(Real, Real),
}

struct Scan<'s> {
    f: &'s FunctionOracle,
    grid: &'s Grid,
    qc: Vec<Enclosure>,
    dqc: Vec<Enclosure>,
    tol: Real,
    mode: Mode,
    cutoff: Option<&'s Real>,
    lo: Real,
    witness: Real,
}

struct Bracket {
    s: i32,
    l: Pt,
    r: Pt,
    bound: Real,
    best: Pt,
}

impl<'s> Scan<'s> {
    fn new(
        f: &'s FunctionOracle,
        grid: &'s Grid,
        q: &Polynomial<Rational>,
        cfg: &NormConfig,
        mode: Mode,
        cutoff: Option<&'s Real>,
    ) -> Self {
        let qc = q.enclose_coeffs(grid.work);
        let dqc = q.derivative().enclose_coeffs(grid.work);
        Scan {
            f,
            grid,
            qc,
            dqc,
            tol: Real::from_f64(cfg.tol, 64),
            mode,
            cutoff,
            lo: Real::zero(64),
            witness: Real::zero(64),
        }
    }

    fn at_grid(&self, k: usize) -> Pt {
        let x = Enclosure::point(self.grid.xs[k].clone());
        Pt {
            e: self.grid.fs[k].sub(&horner(&self.qc, &x)),
            de: self.grid.dfs[k].sub(&horner(&self.dqc, &x)),
            x: self.grid.xs[k].clone(),
        }
    }

    fn at(&self, x: Real) -> Result<Pt, NormError> {
        let xe = Enclosure::point(x.clone());
        let e = self.f.value(&xe)?.sub(&horner(&self.qc, &xe));
        let de = self.f.slope(&xe)?.sub(&horner(&self.dqc, &xe));
        Ok(Pt { x, e, de })
    }

    /// Raises the certified lower bound; `true` once it passes the cutoff.
    fn observe(&mut self, p: &Pt) -> bool {
        let m = p.e.mag_lo();
        if m > self.lo {
            self.lo = m;
            self.witness = p.x.clone();
        }
        self.cutoff.is_some_and(|c| self.lo > *c)
    }

    fn slack(&self, v: &Real) -> Real {
        // v (1 + tol/4)
        v.add(&v.abs().mul(&self.tol, Round::Up).mul_pow2(-2), Round::Up)
    }

    fn bracket_done(&self, b: &Bracket) -> bool {
        if b.bound <= self.grid.floor {
            return true;
        }
        let local = b.best.g_lo(b.s);
        match self.mode {
            Mode::Norm => b.bound <= self.slack(&self.lo.clone().max(local)),
            Mode::Extrema => {
                let gap = b.bound.sub(&local, Round::Up);
                let scale = local.abs().max(b.bound.abs());
                gap <= scale.mul(&self.tol, Round::Down).mul_pow2(-2)
            }
        }
    }

    fn run(mut self) -> Result<Outcome, NormError> {
        let n = self.grid.xs.len();
        let pts: Vec<Pt> = (0..n).map(|k| self.at_grid(k)).collect();
        for p in &pts {
            if self.observe(p) {
                return Ok(Outcome::Exceeds(self.lo));
            }
        }
        let mut hi = pts.iter().map(mag_hi_pt).max().unwrap();
        let mut brackets = Vec::new();
        let mut extrema: Vec<(Real, Enclosure)> = vec![
            (pts[0].x.clone(), pts[0].e.clone()),
            (pts[n - 1].x.clone(), pts[n - 1].e.clone()),
        ];
        for k in 0..n - 1 {
            let (u, v) = (&pts[k], &pts[k + 1]);
            match (u.de_sign(), v.de_sign()) {
                (Some(a), Some(b)) if a == b => {}
                (Some(a), Some(b)) => {
                    let s = if a > 0 && b < 0 { 1 } else { -1 };
                    let bound = tangent_bound(s, u, v);
                    let best = if u.g_lo(s) >= v.g_lo(s) { u.clone() } else { v.clone() };
                    brackets.push(Bracket { s, l: u.clone(), r: v.clone(), bound, best });
                }
                _ => {
                    hi = hi.max(tangent_bound(1, u, v)).max(tangent_bound(-1, u, v));
                }
            }
            if k > 0 && u.de_sign().is_none() {
                extrema.push((u.x.clone(), u.e.clone()));
            }
        }
        brackets.sort_by(|x, y| y.bound.cmp(&x.bound));
        for b in brackets.iter_mut() {
            if !self.bracket_done(b) && self.refine(b)? {
                return Ok(Outcome::Exceeds(self.lo));
            }
            hi = hi.max(b.bound.clone());
            extrema.push((b.best.x.clone(), b.best.e.clone()));
        }
        let lo = self.lo.clone();
        let resolved = hi <= self.grid.floor || hi.sub(&lo, Round::Up) <= hi.mul(&self.tol, Round::Down);
        if !resolved {
            return Ok(Outcome::Wide(lo, hi));
        }
        extrema.sort_by(|a, b| a.0.cmp(&b.0));
        extrema.dedup_by(|a, b| a.0 == b.0);
        let prec = self.grid.work - GUARD;
        Ok(Outcome::Done(NormResult {
            value: Enclosure::new(lo.with_prec(prec, Round::Down), hi.with_prec(prec, Round::Up)),
            witness: self.witness.to_rational(),
            extrema: extrema.into_iter().map(|(x, error)| Extremum { x: x.to_rational(), error }).collect(),
        }))
    }

    /// Shrinks a sign-change cell until its bound is tight enough. Returns
    /// `true` if the cutoff was passed on the way.
    fn refine(&mut self, b: &mut Bracket) -> Result<bool, NormError> {
        let s = b.s;
        let mut weights = (1.0f64, 1.0f64);
        let mut last_side = 0i32;
        let mut stalls = 0;
        for _ in 0..MAX_STEPS {
            if self.bracket_done(b) {
                break;
            }
            let dl = (if s > 0 { b.l.de.mid() } else { b.l.de.mid().neg() }).to_f64().abs() * weights.0;
            let dr = (if s > 0 { b.r.de.mid() } else { b.r.de.mid().neg() }).to_f64().abs() * weights.1;
            let mut t = if stalls >= 2 || !(dl + dr).is_normal() { 0.5 } else { dl / (dl + dr) };
            t = t.clamp(1.0 / 64.0, 63.0 / 64.0);
            let width = b.r.x.sub(&b.l.x, Round::Nearest);
            let step = width.mul(&Real::from_f64(t, self.grid.work), Round::Nearest);
            let x = b.l.x.add(&step, Round::Nearest).with_prec(self.grid.work, Round::Nearest);
            if x <= b.l.x || x >= b.r.x {
                break;
            }
            let p = self.at(x)?;
            if self.observe(&p) {
                return Ok(true);
            }
            if p.g_lo(s) > b.best.g_lo(s) {
                b.best = p.clone();
            }
            match p.de_sign() {
                None => {
                    b.bound = tangent_bound(s, &b.l, &p).max(tangent_bound(s, &p, &b.r));
                    return Ok(false);
                }
                Some(sg) => {
                    let side = if sg == s { -1 } else { 1 };
                    if side == -1 {
                        b.l = p;
                    } else {
                        b.r = p;
                    }
                    // Illinois: halve the weight of an end that keeps surviving
                    if side == last_side {
                        if side == -1 {
                            weights.1 *= 0.5;
                        } else {
                            weights.0 *= 0.5;
                        }
                    } else {
                        weights = (1.0, 1.0);
                    }
                    last_side = side;
                }
            }
            let new_width = b.r.x.sub(&b.l.x, Round::Nearest);
            if new_width.mul_pow2(1) > width {
                stalls += 1;
            } else {
                stalls = 0;
            }
            b.bound = tangent_bound(s, &b.l, &b.r);
        }
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcexpr::parse;
    use crate::numerics::{parse_decimal, pi};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn quarter_pi() -> Rational {
        pi(200).lo().to_rational() / q(4, 1)
    }

    fn rel_err(v: &Enclosure, expect: &str) -> f64 {
        let e = parse_decimal(expect).unwrap();
        let r = (v.mid().to_rational() - &e) / e;
        Real::from_rational(&r.abs(), 64, Round::Up).to_f64()
    }

    #[test]
    fn cosine_naive_rounding_error() {
        let f = FunctionOracle::builtin("cos").unwrap();
        let hatp = Polynomial::new(vec![q(1, 1), q(5, 1024), q(-17, 32), q(1, 16)]);
        let r = sup_norm(&f, &hatp, &quarter_pi(), DEFAULT_TOL).unwrap();
        assert!(rel_err(&r.value, "0.0006939707") < 1e-6, "{:?}", r.value);
    }

    #[test]
    fn cosine_best_truncated_error() {
        let f = FunctionOracle::builtin("cos").unwrap();
        let pstar = Polynomial::new(vec![q(4095, 4096), q(3, 512), q(-17, 32), q(1, 16)]);
        let r = sup_norm(&f, &pstar, &quarter_pi(), DEFAULT_TOL).unwrap();
        assert!(rel_err(&r.value, "0.0002441406250") < 1e-8, "{:?}", r.value);
        // the maximum sits at x = 0, where the error is exactly 2^-12
        assert_eq!(r.witness, q(0, 1));
        let hi = r.value.hi().to_rational();
        let lo = r.value.lo().to_rational();
        assert!(&hi - &lo <= &hi * Rational::from_float(DEFAULT_TOL).unwrap());
    }

    #[test]
    fn identical_functions_have_zero_norm() {
        let f = FunctionOracle::new(parse("x^2").unwrap());
        let p = Polynomial::from_ints(&[0, 0, 1]);
        let r = sup_norm(&f, &p, &q(3, 2), DEFAULT_TOL).unwrap();
        assert!(r.value.lo().is_zero());
        assert!(r.value.hi() <= &Real::one(64).mul_pow2(-100));
    }

    #[test]
    fn interior_extremum_is_located() {
        // x - x^2 on [0, 1] peaks at 1/4 for x = 1/2
        let f = FunctionOracle::new(parse("x").unwrap());
        let p = Polynomial::from_ints(&[0, 0, 1]);
        let r = sup_norm(&f, &p, &q(1, 1), DEFAULT_TOL).unwrap();
        assert!(r.value.contains_rational(&q(1, 4)));
        assert_eq!(r.witness, q(1, 2));
    }

    #[test]
    fn cutoff_stops_early() {
        let f = FunctionOracle::builtin("exp").unwrap();
        let p = Polynomial::from_ints(&[1, 1]);
        let probe = NormProbe::new(&f, &q(1, 2), 1, NormConfig::default()).unwrap();
        match probe.norm_below(&p, &Real::from_f64(0.01, 64)).unwrap() {
            Bounded::Exceeds { lower } => assert!(lower > Real::from_f64(0.01, 64)),
            Bounded::Within(r) => panic!("expected cutoff, got {:?}", r.value),
        }
        match probe.norm_below(&p, &Real::from_f64(0.2, 64)).unwrap() {
            Bounded::Within(r) => assert!(rel_err(&r.value, "0.1487212707001281468486507878") < 1e-12),
            Bounded::Exceeds { .. } => panic!("norm is about 0.1487"),
        }
    }

    #[test]
    fn extrema_of_chebyshev_error_alternate() {
        // x^3 - (3/4)x on [-1,1] equioscillates; shift to [0,2] via f = (x-1)^3
        let f = FunctionOracle::new(parse("(x - 1)^3").unwrap());
        // best quadratic: (x-1)^3 - T3(x-1)/4
        let p = Polynomial::new(vec![q(0, 1), q(3, 4), q(0, 1)]).compose_linear(&q(1, 1), &q(-1, 1));
        let probe = NormProbe::new(&f, &q(2, 1), 2, NormConfig::default()).unwrap();
        let r = probe.extrema(&p).unwrap();
        let signs: Vec<i32> = r.extrema.iter().filter_map(|e| e.error.sign()).collect();
        assert_eq!(signs, vec![-1, 1, -1, 1]);
        for e in &r.extrema {
            assert!(e.error.mag_hi() >= Real::from_f64(0.249999, 64));
        }
        assert!(r.value.contains_rational(&q(1, 4)));
    }

    #[test]
    fn nonpositive_endpoint_rejected() {
        let f = FunctionOracle::builtin("exp").unwrap();
        let p = Polynomial::from_ints(&[1]);
        assert!(matches!(sup_norm(&f, &p, &q(0, 1), DEFAULT_TOL), Err(NormError::BadEndpoint(_))));
    }
}
