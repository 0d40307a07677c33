//! Binary floating values of arbitrary size with explicit rounding.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{pow2, Rational};

/// Smallest working precision a [`Real`] will carry.
pub const MIN_PRECISION: u32 = 64;

/// Rounding direction for inexact operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    /// Toward negative infinity.
    Down,
    /// Toward positive infinity.
    Up,
    /// To nearest, ties to even mantissa.
    Nearest,
}

/// A dyadic value `mant * 2^exp` tagged with the precision (in bits) used to
/// round results derived from it.
///
/// The mantissa is kept odd (or zero) and never wider than `prec` bits, so two
/// equal values always share the same representation.
#[derive(Clone)]
pub struct Real {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

impl Real {
    pub fn zero(prec: u32) -> Self {
        Real { mant: BigInt::zero(), exp: 0, prec: prec.max(MIN_PRECISION) }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_int(1, prec)
    }

    pub fn from_int(v: i64, prec: u32) -> Self {
        Self::from_parts(BigInt::from(v), 0, prec, Round::Nearest)
    }

    pub fn from_bigint(v: &BigInt, prec: u32, rnd: Round) -> Self {
        Self::from_parts(v.clone(), 0, prec, rnd)
    }

    /// Rounds `mant * 2^exp` to `prec` bits.
    pub fn from_parts(mant: BigInt, exp: i64, prec: u32, rnd: Round) -> Self {
        let prec = prec.max(MIN_PRECISION);
        if mant.is_zero() {
            return Real::zero(prec);
        }
        let bits = mant.bits();
        let (mant, exp) = if bits > prec as u64 {
            let shift = bits - prec as u64;
            (round_shift(mant, shift, rnd), exp + shift as i64)
        } else {
            (mant, exp)
        };
        let mut r = Real { mant, exp, prec };
        r.normalize();
        r
    }

    /// Exact conversion; every finite `f64` is dyadic.
    pub fn from_f64(v: f64, prec: u32) -> Self {
        assert!(v.is_finite(), "non-finite f64");
        if v == 0.0 {
            return Real::zero(prec);
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 0 { 1 } else { -1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Self::from_parts(BigInt::from(m) * sign, e, prec.max(64), Round::Nearest)
    }

    pub fn from_rational(q: &Rational, prec: u32, rnd: Round) -> Self {
        div_scaled(q.numer(), q.denom(), 0, prec, rnd)
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp += tz as i64;
        }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Same value, rounded to a new precision tag.
    pub fn with_prec(&self, prec: u32, rnd: Round) -> Self {
        Self::from_parts(self.mant.clone(), self.exp, prec, rnd)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    /// Position just above the leading bit: `2^(top-1) <= |x| < 2^top`.
    /// Returns `None` for zero.
    pub fn top(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exp + self.mant.bits() as i64)
        }
    }

    pub fn neg(&self) -> Self {
        Real { mant: -&self.mant, exp: self.exp, prec: self.prec }
    }

    pub fn abs(&self) -> Self {
        Real { mant: self.mant.abs(), exp: self.exp, prec: self.prec }
    }

    /// Exact multiplication by `2^k`.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Real { mant: self.mant.clone(), exp: self.exp + k, prec: self.prec }
    }

    pub fn add(&self, other: &Real, rnd: Round) -> Self {
        let prec = self.prec.min(other.prec);
        if self.is_zero() {
            return other.with_prec(prec, rnd);
        }
        if other.is_zero() {
            return self.with_prec(prec, rnd);
        }
        let (big, small) = if self.top() >= other.top() { (self, other) } else { (other, self) };
        let big_top = big.top().unwrap();
        let small_top = small.top().unwrap();
        // A summand far below the rounding position only acts as a sticky bit.
        let sticky_pos = big_top - prec as i64 - 4;
        if small_top < sticky_pos + 1 && small_top < big.exp {
            let sticky = BigInt::from(small.signum());
            return sum_aligned(&big.mant, big.exp, &sticky, sticky_pos, prec, rnd);
        }
        sum_aligned(&self.mant, self.exp, &other.mant, other.exp, prec, rnd)
    }

    pub fn sub(&self, other: &Real, rnd: Round) -> Self {
        self.add(&other.neg(), rnd)
    }

    pub fn mul(&self, other: &Real, rnd: Round) -> Self {
        let prec = self.prec.min(other.prec);
        Self::from_parts(&self.mant * &other.mant, self.exp + other.exp, prec, rnd)
    }

    /// Multiplication by an integer, rounded to this value's precision.
    pub fn mul_int(&self, k: &BigInt, rnd: Round) -> Self {
        Self::from_parts(&self.mant * k, self.exp, self.prec, rnd)
    }

    /// Division; panics on a zero divisor.
    pub fn div(&self, other: &Real, rnd: Round) -> Self {
        assert!(!other.is_zero(), "division by zero");
        let prec = self.prec.min(other.prec);
        div_scaled(&self.mant, &other.mant, self.exp - other.exp, prec, rnd)
    }

    /// Square root of a nonnegative value; panics on negative input.
    pub fn sqrt(&self, rnd: Round) -> Self {
        assert!(!self.is_negative(), "sqrt of negative value");
        if self.is_zero() {
            return self.clone();
        }
        let prec = self.prec;
        let want = 2 * (prec as i64 + 2);
        let mut shift = (want - self.mant.bits() as i64).max(0);
        if (self.exp - shift) % 2 != 0 {
            shift += 1;
        }
        let scaled = self.mant.magnitude() << shift as usize;
        let root = scaled.sqrt();
        let inexact = &root * &root != scaled;
        let mant = (BigInt::from(root) << 1usize) + if inexact { 1 } else { 0 };
        Self::from_parts(mant, (self.exp - shift) / 2 - 1, prec, rnd)
    }

    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.mant << self.exp as usize)
        } else {
            Rational::new(self.mant.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    /// Nearest `f64` (overflow saturates to infinity).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let (m, e) = if bits > 64 {
            let shift = bits - 64;
            (round_shift(self.mant.clone(), shift as u64, Round::Nearest), self.exp + shift)
        } else {
            (self.mant.clone(), self.exp)
        };
        let mut v = m.to_f64().unwrap_or(f64::NAN);
        let mut e = e;
        while e > 0 {
            let step = e.min(1000);
            v *= 2f64.powi(step as i32);
            e -= step;
        }
        while e < 0 {
            let step = (-e).min(1000);
            v /= 2f64.powi(step as i32);
            e += step;
        }
        v
    }

    /// An `f64` lying on the requested side of this value.
    pub fn to_f64_directed(&self, rnd: Round) -> f64 {
        let v = self.to_f64();
        if !v.is_finite() {
            return v;
        }
        let back = Real::from_f64(v, 64);
        match rnd {
            Round::Up if back < *self => v.next_up(),
            Round::Down if back > *self => v.next_down(),
            _ => v,
        }
    }

    /// `floor(x * 2^m)` computed exactly.
    pub fn floor_scaled(&self, m: i64) -> BigInt {
        (self.to_rational() * pow2(m)).floor().to_integer()
    }

    /// `ceil(x * 2^m)` computed exactly.
    pub fn ceil_scaled(&self, m: i64) -> BigInt {
        (self.to_rational() * pow2(m)).ceil().to_integer()
    }

    /// Scientific notation with `digits` significant decimal digits, rounded to nearest.
    pub fn to_decimal(&self, digits: usize) -> String {
        format_decimal(&self.to_rational(), digits)
    }

    pub fn min(self, other: Real) -> Real {
        if other < self { other } else { self }
    }

    pub fn max(self, other: Real) -> Real {
        if other > self { other } else { self }
    }
}

fn sum_aligned(m1: &BigInt, e1: i64, m2: &BigInt, e2: i64, prec: u32, rnd: Round) -> Real {
    let e = e1.min(e2);
    let a = m1 << (e1 - e) as usize;
    let b = m2 << (e2 - e) as usize;
    Real::from_parts(a + b, e, prec, rnd)
}

/// Shifts `mant` right by `shift` bits, rounding in the requested direction.
fn round_shift(mant: BigInt, shift: u64, rnd: Round) -> BigInt {
    let negative = mant.is_negative();
    let mag = mant.magnitude();
    let q = mag >> shift as usize;
    let low_mask_nonzero = |bits: u64| -> bool {
        // true when any of the lowest `bits` bits of mag is set
        match mag.trailing_zeros() {
            Some(tz) => tz < bits,
            None => false,
        }
    };
    let inexact = low_mask_nonzero(shift);
    let round_away = match rnd {
        Round::Down => negative && inexact,
        Round::Up => !negative && inexact,
        Round::Nearest => {
            let half = mag.bit(shift - 1);
            let sticky = low_mask_nonzero(shift - 1);
            half && (sticky || q.bit(0))
        }
    };
    let q = if round_away { q + 1u32 } else { q };
    let q = BigInt::from(q);
    if negative { -q } else { q }
}

/// Rounds `num / den * 2^exp`.
fn div_scaled(num: &BigInt, den: &BigInt, exp: i64, prec: u32, rnd: Round) -> Real {
    assert!(!den.is_zero(), "division by zero");
    if num.is_zero() {
        return Real::zero(prec);
    }
    let prec = prec.max(MIN_PRECISION);
    let shift = (prec as i64 + 2 + den.bits() as i64 - num.bits() as i64).max(0);
    let scaled = num << shift as usize;
    let (q, r) = scaled.div_rem(den);
    // one extra bit that is set whenever the division was inexact
    let mut q2 = q << 1usize;
    if !r.is_zero() {
        let negative = num.is_negative() != den.is_negative();
        q2 += if negative { -1 } else { 1 };
    }
    Real::from_parts(q2, exp - shift - 1, prec, rnd)
}

pub(crate) fn format_decimal(q: &Rational, digits: usize) -> String {
    let digits = digits.max(1);
    if q.is_zero() {
        return format!("0.{}e0", "0".repeat(digits - 1));
    }
    let negative = q.is_negative();
    let mag = q.abs();
    let approx = mag_log10(&mag);
    let mut k = approx;
    // 10^k <= mag < 10^(k+1)
    loop {
        let lo = pow10(k);
        if mag < lo {
            k -= 1;
            continue;
        }
        if mag >= pow10(k + 1) {
            k += 1;
            continue;
        }
        break;
    }
    let scaled = &mag * pow10(digits as i64 - 1 - k);
    let mut int = scaled.round().to_integer();
    if int.to_string().len() > digits {
        k += 1;
        int = (&mag * pow10(digits as i64 - 1 - k)).round().to_integer();
    }
    let s = int.to_string();
    let (head, tail) = s.split_at(1);
    let sign = if negative { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{k}")
    } else {
        format!("{sign}{head}.{tail}e{k}")
    }
}

fn mag_log10(q: &Rational) -> i64 {
    let nb = q.numer().bits() as f64;
    let db = q.denom().bits() as f64;
    ((nb - db) * std::f64::consts::LOG10_2).floor() as i64
}

fn pow10(k: i64) -> Rational {
    let p = num_traits::pow(BigInt::from(10), k.unsigned_abs() as usize);
    if k >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.mant == other.mant && self.exp == other.exp
    }
}

impl Eq for Real {}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        let (s1, s2) = (self.signum(), other.signum());
        if s1 != s2 {
            return s1.cmp(&s2);
        }
        if s1 == 0 {
            return Ordering::Equal;
        }
        let mag = match self.top().cmp(&other.top()) {
            Ordering::Equal => {
                let e = self.exp.min(other.exp);
                let a = self.mant.magnitude() << (self.exp - e) as usize;
                let b = other.mant.magnitude() << (other.exp - e) as usize;
                a.cmp(&b)
            }
            o => o,
        };
        if s1 > 0 { mag } else { mag.reverse() }
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(24))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(((self.prec as f64) * std::f64::consts::LOG10_2) as usize);
        write!(f, "{}", self.to_decimal(digits))
    }
}
