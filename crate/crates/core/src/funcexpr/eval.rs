use super::{Constant, Expr, Func};
use crate::numerics::{self, Enclosure, EvalError, Rational, Real};

const EVAL_GUARD: u32 = 32;
const MAX_RETRIES: u32 = 4;

impl Expr {
    /// Interval evaluation with `x` ranging over `x`. Literals and constants
    /// are enclosed at the precision carried by `x`.
    pub fn eval(&self, x: &Enclosure) -> Result<Enclosure, EvalError> {
        let prec = x.prec();
        Ok(match self {
            Expr::Var => x.clone(),
            Expr::Lit(q) => Enclosure::from_rational(q, prec),
            Expr::Const(Constant::Pi) => numerics::pi(prec),
            Expr::Const(Constant::E) => numerics::e_const(prec),
            Expr::Neg(a) => a.eval(x)?.neg(),
            Expr::Add(a, b) => a.eval(x)?.add(&b.eval(x)?),
            Expr::Sub(a, b) => a.eval(x)?.sub(&b.eval(x)?),
            Expr::Mul(a, b) => a.eval(x)?.mul(&b.eval(x)?),
            Expr::Div(a, b) => a.eval(x)?.div(&b.eval(x)?)?,
            Expr::Pow(a, k) => a.eval(x)?.powi(*k)?,
            Expr::Call(f, a) => {
                let v = a.eval(x)?;
                match f {
                    Func::Exp => numerics::exp(&v)?,
                    Func::Ln => numerics::ln(&v)?,
                    Func::Sin => numerics::sin(&v)?,
                    Func::Cos => numerics::cos(&v)?,
                    Func::Tan => numerics::tan(&v)?,
                    Func::Atan => numerics::atan(&v)?,
                    Func::Sqrt => v.sqrt()?,
                    Func::Sinh => numerics::sinh(&v)?,
                    Func::Cosh => numerics::cosh(&v)?,
                }
            }
        })
    }
}

/// True when `hi - lo <= 2^(1-prec) max(1, |value|)`.
pub(crate) fn meets_width(e: &Enclosure, prec: u32) -> bool {
    let scale = e.mag_hi().max(Real::one(64));
    let allowed = scale.mul_pow2(1 - prec as i64);
    e.width() <= allowed
}

/// Encloses `e(x)` for an exact rational `x` with
/// `hi - lo <= 2^(1-prec) max(1, |value|)`, doubling the working precision
/// (at most four times) until the width holds.
pub fn eval_enclosure(e: &Expr, x: &Rational, prec: u32) -> Result<Enclosure, EvalError> {
    let mut work = prec + EVAL_GUARD;
    for _ in 0..=MAX_RETRIES {
        let xe = Enclosure::from_rational(x, work);
        let v = e.eval(&xe)?;
        if meets_width(&v, prec) {
            return Ok(v);
        }
        work *= 2;
    }
    Err(EvalError::Precision(prec))
}
