//! Elementary functions over enclosures.
//!
//! Every function evaluates its series in interval arithmetic at the input
//! precision plus guard bits, adds an explicit bound on the truncated tail,
//! and rounds the result outward back to the input precision.

use std::sync::OnceLock;

use num_bigint::BigInt;

use super::{Enclosure, EvalError, Rational, Real};

const GUARD: u32 = 24;
const CACHE_PREC: u32 = 1088;
/// Reduction arguments beyond this magnitude are rejected.
const MAX_REDUCED_ARG: f64 = 1e12;

fn tiny(w: u32) -> Real {
    Real::one(w).mul_pow2(-(w as i64) - 2)
}

fn compute_ln2(prec: u32) -> Enclosure {
    // ln 2 = sum_{k>=1} 1 / (k 2^k); tail after N terms is below 2^-N
    let w = prec + 16;
    let n = w as i64 + 4;
    let mut sum = Enclosure::zero(w);
    for k in 1..=n {
        sum = sum.add(&Enclosure::one(w).mul_pow2(-k).div_int(k));
    }
    let tail = Real::one(w).mul_pow2(-n);
    Enclosure::new(sum.lo().clone(), sum.hi().add(&tail, super::Round::Up)).with_prec(prec)
}

fn atan_inv(m: i64, w: u32) -> Enclosure {
    // sum (-1)^k / ((2k+1) m^(2k+1)), alternating with decreasing terms
    let mb = BigInt::from(m);
    let m2 = &mb * &mb;
    let mut pw = mb.clone();
    let mut sum = Enclosure::zero(w);
    let mut k: i64 = 0;
    loop {
        let den = &pw * BigInt::from(2 * k + 1);
        let term = Enclosure::from_rational(&Rational::new(1.into(), den.clone()), w);
        if k % 2 == 0 {
            sum = sum.add(&term);
        } else {
            sum = sum.sub(&term);
        }
        if den.bits() > w as u64 + 8 {
            let next = Enclosure::from_rational(&Rational::new(1.into(), &pw * &m2 * BigInt::from(2 * k + 3)), w);
            return sum.inflate(next.hi());
        }
        pw *= &m2;
        k += 1;
    }
}

fn compute_pi(prec: u32) -> Enclosure {
    let w = prec + 16;
    let a = atan_inv(5, w).mul_int(&BigInt::from(16));
    let b = atan_inv(239, w).mul_int(&BigInt::from(4));
    a.sub(&b).with_prec(prec)
}

fn cached(cell: &OnceLock<Enclosure>, compute: fn(u32) -> Enclosure, prec: u32) -> Enclosure {
    if prec + 16 <= CACHE_PREC {
        cell.get_or_init(|| compute(CACHE_PREC)).with_prec(prec)
    } else {
        compute(prec)
    }
}

/// Enclosure of π at the given precision.
pub fn pi(prec: u32) -> Enclosure {
    static PI: OnceLock<Enclosure> = OnceLock::new();
    cached(&PI, compute_pi, prec)
}

/// Enclosure of ln 2 at the given precision.
pub fn ln2(prec: u32) -> Enclosure {
    static LN2: OnceLock<Enclosure> = OnceLock::new();
    cached(&LN2, compute_ln2, prec)
}

/// Enclosure of e at the given precision.
pub fn e_const(prec: u32) -> Enclosure {
    static E: OnceLock<Enclosure> = OnceLock::new();
    cached(&E, |p| exp(&Enclosure::one(p)).expect("exp(1) is finite"), prec)
}

fn reduction_multiple(x: &Enclosure, period: f64, name: &'static str) -> Result<i64, EvalError> {
    let mid = x.mid().to_f64();
    if !mid.is_finite() || mid.abs() > MAX_REDUCED_ARG {
        return Err(EvalError::Overflow(name));
    }
    Ok((mid / period).round() as i64)
}

fn bits_of(k: i64) -> u32 {
    64 - k.unsigned_abs().leading_zeros()
}

pub fn exp(x: &Enclosure) -> Result<Enclosure, EvalError> {
    let p = x.prec();
    let w = p + GUARD;
    let k = reduction_multiple(x, std::f64::consts::LN_2, "exp")?;
    let l2 = ln2(w + bits_of(k) + 4);
    let r = x.with_prec(w).sub(&l2.mul_int(&BigInt::from(k)));
    // exp(r) = exp(r / 2^8)^(2^8)
    const HALVINGS: i64 = 8;
    let y = r.mul_pow2(-HALVINGS);
    let eps = tiny(w);
    let mut term = Enclosure::one(w);
    let mut sum = Enclosure::one(w);
    let mut j = 1;
    loop {
        term = term.mul(&y).div_int(j);
        sum = sum.add(&term);
        let m = term.mag_hi();
        if m < eps {
            // |y| < 1/2, so the remaining terms sum to less than the last one
            sum = sum.inflate(&m);
            break;
        }
        j += 1;
    }
    for _ in 0..HALVINGS {
        sum = sum.sqr();
    }
    Ok(sum.mul_pow2(k).with_prec(p))
}

fn ln_point(v: &Real, w: u32) -> Enclosure {
    let mut t = v.top().expect("positive");
    let mut y = v.mul_pow2(-t).with_prec(w, super::Round::Nearest);
    if y < Real::from_f64(0.75, 64) {
        y = y.mul_pow2(1);
        t -= 1;
    }
    let y = Enclosure::point(y);
    let one = Enclosure::one(w);
    // ln y = 2 atanh(z), z = (y-1)/(y+1), |z| <= 1/5
    let z = y.sub(&one).div(&y.add(&one)).expect("y + 1 > 0");
    let z2 = z.sqr();
    let eps = tiny(w);
    let mut pw = z.clone();
    let mut sum = z.clone();
    let mut k: i64 = 0;
    loop {
        if pw.mag_hi() < eps {
            sum = sum.inflate(&pw.mag_hi());
            break;
        }
        pw = pw.mul(&z2);
        k += 1;
        sum = sum.add(&pw.div_int(2 * k + 1));
    }
    let l2 = ln2(w + 72);
    sum.mul_pow2(1).add(&l2.mul_int(&BigInt::from(t)))
}

pub fn ln(x: &Enclosure) -> Result<Enclosure, EvalError> {
    if x.lo().signum() <= 0 {
        return Err(EvalError::Domain("ln of a nonpositive value".into()));
    }
    let p = x.prec();
    let w = p + GUARD;
    let lo = ln_point(x.lo(), w);
    let res = if x.is_point() {
        lo
    } else {
        let hi = ln_point(x.hi(), w);
        Enclosure::new(lo.lo().clone(), hi.hi().clone())
    };
    Ok(res.with_prec(p))
}

fn clamp_unit(e: Enclosure) -> Enclosure {
    let w = e.prec();
    let one = Real::one(w);
    let lo = e.lo().clone().max(one.neg());
    let hi = e.hi().clone().min(one);
    if lo <= hi {
        Enclosure::new(lo, hi)
    } else {
        e
    }
}

/// Taylor series for sin and cos on a reduced argument.
fn sin_cos_series(r: &Enclosure, w: u32) -> (Enclosure, Enclosure) {
    let m = r.mag_hi();
    if m > Real::from_int(4, 64) {
        let unit = Enclosure::new(Real::from_int(-1, w), Real::one(w));
        return (unit.clone(), unit);
    }
    let r2 = r.sqr();
    let eps = tiny(w);
    let series = |first: Enclosure, offset: i64| -> Enclosure {
        let mut term = first.clone();
        let mut sum = first;
        let mut j: i64 = 1;
        loop {
            let a = 2 * j + offset - 1;
            term = term.mul(&r2).neg().div_int(a * (a + 1));
            sum = sum.add(&term);
            let mag = term.mag_hi();
            // ratio of successive terms is at most m^2 / ((a+2)(a+3)) <= 1/2 once a >= 4
            if a >= 4 && mag < eps {
                return sum.inflate(&mag);
            }
            j += 1;
        }
    };
    let s = series(r.clone(), 1);
    let c = series(Enclosure::one(w), 0);
    (clamp_unit(s), clamp_unit(c))
}

fn sin_cos(x: &Enclosure) -> Result<(Enclosure, Enclosure), EvalError> {
    let p = x.prec();
    let w = p + GUARD;
    let k = reduction_multiple(x, std::f64::consts::FRAC_PI_2, "sin/cos")?;
    let half_pi = pi(w + bits_of(k) + 4).mul_pow2(-1);
    let r = x.with_prec(w).sub(&half_pi.mul_int(&BigInt::from(k)));
    let (s, c) = sin_cos_series(&r, w);
    let (s, c) = match k.rem_euclid(4) {
        0 => (s, c),
        1 => (c, s.neg()),
        2 => (s.neg(), c.neg()),
        _ => (c.neg(), s),
    };
    Ok((s.with_prec(p), c.with_prec(p)))
}

pub fn sin(x: &Enclosure) -> Result<Enclosure, EvalError> {
    sin_cos(x).map(|(s, _)| s)
}

pub fn cos(x: &Enclosure) -> Result<Enclosure, EvalError> {
    sin_cos(x).map(|(_, c)| c)
}

pub fn tan(x: &Enclosure) -> Result<Enclosure, EvalError> {
    let p = x.prec();
    let (s, c) = sin_cos(&x.with_prec(p + 8))?;
    s.div(&c)
        .map(|t| t.with_prec(p))
        .map_err(|_| EvalError::Domain("tan at a pole".into()))
}

fn atan_reduced(y: Enclosure, w: u32) -> Enclosure {
    // atan y = 2 atan(y / (1 + sqrt(1 + y^2))), applied three times
    let one = Enclosure::one(w);
    let mut y = y;
    for _ in 0..3 {
        let root = one.add(&y.sqr()).sqrt().expect("positive");
        y = y.div(&one.add(&root)).expect("positive denominator");
    }
    let y2 = y.sqr();
    let eps = tiny(w);
    let mut pw = y.clone();
    let mut sum = y;
    let mut k: i64 = 0;
    loop {
        pw = pw.mul(&y2).neg();
        k += 1;
        let term = pw.div_int(2 * k + 1);
        sum = sum.add(&term);
        let mag = term.mag_hi();
        if mag < eps {
            sum = sum.inflate(&mag);
            break;
        }
    }
    sum.mul_pow2(3)
}

fn atan_point(v: &Real, w: u32) -> Enclosure {
    if v.is_zero() {
        return Enclosure::zero(w);
    }
    let a = v.abs().with_prec(w, super::Round::Nearest);
    let one = Real::one(w);
    let res = if a > one {
        let inv = Enclosure::one(w).div(&Enclosure::point(a)).expect("nonzero");
        pi(w + 4).mul_pow2(-1).sub(&atan_reduced(inv, w))
    } else {
        atan_reduced(Enclosure::point(a), w)
    };
    if v.is_negative() {
        res.neg()
    } else {
        res
    }
}

pub fn atan(x: &Enclosure) -> Result<Enclosure, EvalError> {
    let p = x.prec();
    let w = p + GUARD;
    let lo = atan_point(x.lo(), w);
    let res = if x.is_point() {
        lo
    } else {
        let hi = atan_point(x.hi(), w);
        Enclosure::new(lo.lo().clone(), hi.hi().clone())
    };
    Ok(res.with_prec(p))
}

fn exp_pair(x: &Enclosure) -> Result<(Enclosure, Enclosure), EvalError> {
    let w = x.prec() + 8;
    let xw = x.with_prec(w);
    Ok((exp(&xw)?, exp(&xw.neg())?))
}

pub fn sinh(x: &Enclosure) -> Result<Enclosure, EvalError> {
    let (ep, en) = exp_pair(x)?;
    Ok(ep.sub(&en).mul_pow2(-1).with_prec(x.prec()))
}

pub fn cosh(x: &Enclosure) -> Result<Enclosure, EvalError> {
    let (ep, en) = exp_pair(x)?;
    let c = ep.add(&en).mul_pow2(-1);
    let one = Real::one(c.prec());
    let lo = c.lo().clone().max(one);
    Ok(Enclosure::new(lo, c.hi().clone().max(Real::one(c.prec()))).with_prec(x.prec()))
}
