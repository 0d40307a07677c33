//! Scalar arithmetic: exact rationals, precision-tagged binary floats,
//! certified enclosures and rounding onto `2^-m` grids.

mod elementary;
mod enclosure;
mod real;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use thiserror::Error;

pub use elementary::{atan, cos, cosh, e_const, exp, ln, ln2, pi, sin, sinh, tan};
pub use enclosure::Enclosure;
pub use real::{Real, Round, MIN_PRECISION};

/// Exact rational in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

/// Working precision used when nothing else is requested.
pub const DEFAULT_PRECISION: u32 = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("argument too large for {0}")]
    Overflow(&'static str),
    #[error("could not reach {0} bits of accuracy")]
    Precision(u32),
}

/// `2^k` as an exact rational; `k` may be negative.
pub fn pow2(k: i64) -> Rational {
    let p = BigInt::one() << k.unsigned_abs() as usize;
    if k >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// Nearest multiple of `2^-m` to `x`, ties going to the even multiple.
pub fn round_to_multiple(x: &Rational, m: i64) -> Rational {
    let k = round_half_even(&(x * pow2(m)));
    Rational::from_integer(k) * pow2(-m)
}

/// The integer numerator `k` of [`round_to_multiple`], i.e. `x ≈ k / 2^m`.
pub fn round_scaled(x: &Rational, m: i64) -> BigInt {
    round_half_even(&(x * pow2(m)))
}

fn round_half_even(v: &Rational) -> BigInt {
    let fl = v.floor().to_integer();
    let frac = v - Rational::from_integer(fl.clone());
    let half = Rational::new(1.into(), 2.into());
    if frac > half || (frac == half && fl.is_odd()) {
        fl + 1
    } else {
        fl
    }
}

/// `floor(2^m x)` for an exact value.
pub fn floor_scaled(x: &Rational, m: i64) -> BigInt {
    (x * pow2(m)).floor().to_integer()
}

/// `ceil(2^m x)` for an exact value.
pub fn ceil_scaled(x: &Rational, m: i64) -> BigInt {
    (x * pow2(m)).ceil().to_integer()
}

impl Enclosure {
    /// `floor(2^m hi)`: no integer `k` with `k <= 2^m q` for an enclosed `q` is cut off.
    pub fn floor_scaled(&self, m: i64) -> BigInt {
        self.hi().floor_scaled(m)
    }

    /// `ceil(2^m lo)`.
    pub fn ceil_scaled(&self, m: i64) -> BigInt {
        self.lo().ceil_scaled(m)
    }
}

/// Renders a rational as a reduced fraction string such as `-17/32`.
pub fn fraction_string(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p/q`, an integer, or a plain decimal into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d == BigInt::from(0) {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    parse_decimal(t)
}

pub(crate) fn parse_decimal(t: &str) -> Option<Rational> {
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (mantissa, exp10) = match body.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exp10 - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let p = num_traits::pow(ten, scale.unsigned_abs() as usize);
    let v = if scale >= 0 { Rational::from_integer(digits * p) } else { Rational::new(digits, p) };
    Some(if neg { -v } else { v })
}
