use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{EvalError, Rational, Real, Round};

/// A closed interval `[lo, hi]` certified to contain some exact real quantity.
#[derive(Clone, PartialEq, Eq)]
pub struct Enclosure {
    lo: Real,
    hi: Real,
}

impl Enclosure {
    pub fn new(lo: Real, hi: Real) -> Self {
        assert!(lo <= hi, "enclosure with lo > hi");
        Enclosure { lo, hi }
    }

    pub fn point(x: Real) -> Self {
        Enclosure { lo: x.clone(), hi: x }
    }

    pub fn zero(prec: u32) -> Self {
        Self::point(Real::zero(prec))
    }

    pub fn one(prec: u32) -> Self {
        Self::point(Real::one(prec))
    }

    pub fn from_int(v: i64, prec: u32) -> Self {
        Self::from_bigint(&BigInt::from(v), prec)
    }

    pub fn from_bigint(v: &BigInt, prec: u32) -> Self {
        Enclosure {
            lo: Real::from_bigint(v, prec, Round::Down),
            hi: Real::from_bigint(v, prec, Round::Up),
        }
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        Enclosure {
            lo: Real::from_rational(q, prec, Round::Down),
            hi: Real::from_rational(q, prec, Round::Up),
        }
    }

    pub fn lo(&self) -> &Real {
        &self.lo
    }

    pub fn hi(&self) -> &Real {
        &self.hi
    }

    pub fn into_bounds(self) -> (Real, Real) {
        (self.lo, self.hi)
    }

    pub fn prec(&self) -> u32 {
        self.lo.prec().min(self.hi.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Enclosure { lo: self.lo.with_prec(prec, Round::Down), hi: self.hi.with_prec(prec, Round::Up) }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    pub fn contains(&self, x: &Real) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_rational(&self, q: &Rational) -> bool {
        &self.lo.to_rational() <= q && q <= &self.hi.to_rational()
    }

    /// True when `other` lies inside this enclosure.
    pub fn encloses(&self, other: &Enclosure) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Certified sign: `Some(1)` if every enclosed value is positive,
    /// `Some(-1)` if every one is negative, `None` otherwise.
    pub fn sign(&self) -> Option<i32> {
        if self.lo.signum() > 0 {
            Some(1)
        } else if self.hi.signum() < 0 {
            Some(-1)
        } else {
            None
        }
    }

    pub fn width(&self) -> Real {
        self.hi.sub(&self.lo, Round::Up)
    }

    pub fn mid(&self) -> Real {
        let p = self.prec() + 1;
        self.lo.with_prec(p + 1, Round::Nearest).add(&self.hi.with_prec(p + 1, Round::Nearest), Round::Nearest).mul_pow2(-1)
    }

    /// Largest magnitude of an enclosed value.
    pub fn mag_hi(&self) -> Real {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest magnitude of an enclosed value.
    pub fn mag_lo(&self) -> Real {
        if self.contains_zero() {
            Real::zero(self.prec())
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn abs(&self) -> Self {
        if self.lo.signum() >= 0 {
            self.clone()
        } else if self.hi.signum() <= 0 {
            self.neg()
        } else {
            Enclosure { lo: Real::zero(self.prec()), hi: self.mag_hi() }
        }
    }

    pub fn neg(&self) -> Self {
        Enclosure { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn add(&self, o: &Enclosure) -> Self {
        Enclosure { lo: self.lo.add(&o.lo, Round::Down), hi: self.hi.add(&o.hi, Round::Up) }
    }

    pub fn sub(&self, o: &Enclosure) -> Self {
        Enclosure { lo: self.lo.sub(&o.hi, Round::Down), hi: self.hi.sub(&o.lo, Round::Up) }
    }

    pub fn mul(&self, o: &Enclosure) -> Self {
        if o.is_point() {
            return self.mul_real(&o.lo);
        }
        if self.is_point() {
            return o.mul_real(&self.lo);
        }
        let (a, b, c, d) = (&self.lo, &self.hi, &o.lo, &o.hi);
        if a.signum() >= 0 && c.signum() >= 0 {
            return Enclosure { lo: a.mul(c, Round::Down), hi: b.mul(d, Round::Up) };
        }
        let pairs = [(a, c), (a, d), (b, c), (b, d)];
        let lo = pairs.iter().map(|(x, y)| x.mul(y, Round::Down)).min().unwrap();
        let hi = pairs.iter().map(|(x, y)| x.mul(y, Round::Up)).max().unwrap();
        Enclosure { lo, hi }
    }

    pub fn mul_real(&self, x: &Real) -> Self {
        if x.signum() >= 0 {
            Enclosure { lo: self.lo.mul(x, Round::Down), hi: self.hi.mul(x, Round::Up) }
        } else {
            Enclosure { lo: self.hi.mul(x, Round::Down), hi: self.lo.mul(x, Round::Up) }
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Enclosure::zero(self.prec());
        }
        if k.sign() == num_bigint::Sign::Plus {
            Enclosure { lo: self.lo.mul_int(k, Round::Down), hi: self.hi.mul_int(k, Round::Up) }
        } else {
            Enclosure { lo: self.hi.mul_int(k, Round::Down), hi: self.lo.mul_int(k, Round::Up) }
        }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        Enclosure { lo: self.lo.mul_pow2(k), hi: self.hi.mul_pow2(k) }
    }

    pub fn div(&self, o: &Enclosure) -> Result<Self, EvalError> {
        if o.contains_zero() {
            return Err(EvalError::Domain("division by an interval containing zero".into()));
        }
        let (a, b, c, d) = (&self.lo, &self.hi, &o.lo, &o.hi);
        let pairs = [(a, c), (a, d), (b, c), (b, d)];
        let lo = pairs.iter().map(|(x, y)| x.div(y, Round::Down)).min().unwrap();
        let hi = pairs.iter().map(|(x, y)| x.div(y, Round::Up)).max().unwrap();
        Ok(Enclosure { lo, hi })
    }

    /// Division by a nonzero integer.
    pub fn div_int(&self, k: i64) -> Self {
        assert!(k != 0);
        let kr = Real::from_int(k, self.prec().max(64));
        if k > 0 {
            Enclosure { lo: self.lo.div(&kr, Round::Down), hi: self.hi.div(&kr, Round::Up) }
        } else {
            Enclosure { lo: self.hi.div(&kr, Round::Down), hi: self.lo.div(&kr, Round::Up) }
        }
    }

    pub fn sqr(&self) -> Self {
        let a = self.abs();
        Enclosure { lo: a.lo.mul(&a.lo, Round::Down), hi: a.hi.mul(&a.hi, Round::Up) }
    }

    /// Integer power by binary exponentiation.
    pub fn powi(&self, k: i64) -> Result<Self, EvalError> {
        if k < 0 {
            let pos = self.powi(-k)?;
            return Enclosure::one(self.prec()).div(&pos);
        }
        if k == 0 {
            return Ok(Enclosure::one(self.prec()));
        }
        let k = k as u64;
        if k % 2 == 0 {
            return Ok(pow_nonneg(&self.abs(), k));
        }
        // odd power is monotone; the magnitude of each end is raised separately
        let end = |x: &Real, upper: bool| -> Real {
            let p = pow_nonneg(&Enclosure::point(x.abs()), k);
            match (x.is_negative(), upper) {
                (false, false) => p.lo,
                (false, true) => p.hi,
                (true, false) => p.hi.neg(),
                (true, true) => p.lo.neg(),
            }
        };
        Ok(Enclosure { lo: end(&self.lo, false), hi: end(&self.hi, true) })
    }

    pub fn sqrt(&self) -> Result<Self, EvalError> {
        if self.hi.is_negative() {
            return Err(EvalError::Domain("sqrt of a negative value".into()));
        }
        let lo = if self.lo.is_negative() { Real::zero(self.prec()) } else { self.lo.sqrt(Round::Down) };
        Ok(Enclosure { lo, hi: self.hi.sqrt(Round::Up) })
    }

    /// Smallest interval containing both.
    pub fn hull(&self, o: &Enclosure) -> Self {
        Enclosure { lo: self.lo.clone().min(o.lo.clone()), hi: self.hi.clone().max(o.hi.clone()) }
    }

    /// Widens both ends by `r >= 0`.
    pub fn inflate(&self, r: &Real) -> Self {
        Enclosure { lo: self.lo.sub(r, Round::Down), hi: self.hi.add(r, Round::Up) }
    }
}

fn pow_nonneg(x: &Enclosure, mut k: u64) -> Enclosure {
    let mut base = x.clone();
    let mut acc = Enclosure::one(x.prec());
    while k > 0 {
        if k & 1 == 1 {
            acc = acc.mul(&base);
        }
        k >>= 1;
        if k > 0 {
            base = base.sqr();
        }
    }
    acc
}

impl fmt::Debug for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}
