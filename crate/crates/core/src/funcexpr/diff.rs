use num_traits::{One, Zero};

use super::{Expr, Func};
use crate::numerics::Rational;

fn as_lit(e: &Expr) -> Option<&Rational> {
    match e {
        Expr::Lit(q) => Some(q),
        _ => None,
    }
}

fn is_zero(e: &Expr) -> bool {
    as_lit(e).is_some_and(|q| q.is_zero())
}

fn is_one(e: &Expr) -> bool {
    as_lit(e).is_some_and(|q| q.is_one())
}

// Constructors that fold literal arithmetic and the identities 0 and 1.

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Lit(q) => Expr::Lit(-q),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        return b;
    }
    if is_zero(&b) {
        return a;
    }
    match (a, b) {
        (Expr::Lit(x), Expr::Lit(y)) => Expr::Lit(x + y),
        (a, Expr::Neg(b)) => Expr::Sub(Box::new(a), b),
        (a, b) => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    if is_zero(&b) {
        return a;
    }
    if is_zero(&a) {
        return neg(b);
    }
    match (a, b) {
        (Expr::Lit(x), Expr::Lit(y)) => Expr::Lit(x - y),
        (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) || is_zero(&b) {
        return Expr::lit(0);
    }
    if is_one(&a) {
        return b;
    }
    if is_one(&b) {
        return a;
    }
    match (a, b) {
        (Expr::Lit(x), Expr::Lit(y)) => Expr::Lit(x * y),
        (Expr::Neg(a), b) => neg(mul(*a, b)),
        (a, Expr::Neg(b)) => neg(mul(a, *b)),
        // keep literal factors in front
        (a, b @ Expr::Lit(_)) => Expr::Mul(Box::new(b), Box::new(a)),
        (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        return Expr::lit(0);
    }
    if is_one(&b) {
        return a;
    }
    match (a, b) {
        (Expr::Lit(x), Expr::Lit(y)) if !y.is_zero() => Expr::Lit(x / y),
        (a, b) => Expr::Div(Box::new(a), Box::new(b)),
    }
}

fn pow(a: Expr, k: i64) -> Expr {
    match k {
        0 => Expr::lit(1),
        1 => a,
        _ => Expr::Pow(Box::new(a), k),
    }
}

impl Expr {
    /// Symbolic derivative with respect to `x`. Only literal folding and the
    /// 0/1 identities are applied; no further simplification.
    pub fn differentiate(&self) -> Expr {
        match self {
            Expr::Var => Expr::lit(1),
            Expr::Lit(_) | Expr::Const(_) => Expr::lit(0),
            Expr::Neg(a) => neg(a.differentiate()),
            Expr::Add(a, b) => add(a.differentiate(), b.differentiate()),
            Expr::Sub(a, b) => sub(a.differentiate(), b.differentiate()),
            Expr::Mul(a, b) => add(
                mul(a.differentiate(), (**b).clone()),
                mul((**a).clone(), b.differentiate()),
            ),
            Expr::Div(a, b) => div(
                sub(mul(a.differentiate(), (**b).clone()), mul((**a).clone(), b.differentiate())),
                pow((**b).clone(), 2),
            ),
            Expr::Pow(a, k) => {
                if *k == 0 {
                    return Expr::lit(0);
                }
                mul(mul(Expr::lit(*k), pow((**a).clone(), k - 1)), a.differentiate())
            }
            Expr::Call(f, a) => {
                let u = (**a).clone();
                let du = a.differentiate();
                if is_zero(&du) {
                    return Expr::lit(0);
                }
                let outer = match f {
                    Func::Exp => Expr::call(Func::Exp, u),
                    Func::Ln => return div(du, u),
                    Func::Sin => Expr::call(Func::Cos, u),
                    Func::Cos => neg(Expr::call(Func::Sin, u)),
                    Func::Tan => add(Expr::lit(1), pow(Expr::call(Func::Tan, u), 2)),
                    Func::Atan => return div(du, add(Expr::lit(1), pow(u, 2))),
                    Func::Sqrt => return div(du, mul(Expr::lit(2), Expr::call(Func::Sqrt, u))),
                    Func::Sinh => Expr::call(Func::Cosh, u),
                    Func::Cosh => Expr::call(Func::Sinh, u),
                };
                mul(outer, du)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcexpr::{eval_enclosure, parse};
    use crate::numerics::Enclosure;
    use num_traits::Signed;

    fn d(text: &str) -> Expr {
        parse(text).unwrap().differentiate()
    }

    #[test]
    fn textbook_rules() {
        assert_eq!(d("cos(x)"), Expr::Neg(Box::new(Expr::call(Func::Sin, Expr::Var))));
        assert_eq!(d("exp(x)"), Expr::call(Func::Exp, Expr::Var));
        assert_eq!(d("x^3"), Expr::Mul(Box::new(Expr::lit(3)), Box::new(Expr::Pow(Box::new(Expr::Var), 2))));
        assert_eq!(d("5"), Expr::lit(0));
        assert_eq!(d("pi*x"), Expr::Const(super::super::Constant::Pi));
        assert_eq!(d("ln(1 + x)").to_string(), "1/(1 + x)");
    }

    /// Central differences agree with the symbolic derivative to O(h^2).
    #[test]
    fn finite_difference_check() {
        let cases = [
            "cos(x)",
            "exp(x)*sin(2*x)",
            "ln(1 + x)",
            "atan(x)/(1 + x^2)",
            "sqrt(2 + x)*cosh(x) - sinh(x)^3",
            "tan(x/3) + x^(-2)",
        ];
        let h = Rational::new(1.into(), 1_000_000.into());
        for text in cases {
            let e = parse(text).unwrap();
            let de = e.differentiate();
            for xv in [(1, 3), (3, 4), (6, 5)] {
                let x = Rational::new(xv.0.into(), xv.1.into());
                let f = |t: &Rational| eval_enclosure(&e, t, 160).unwrap().mid().to_rational();
                let fd = (f(&(&x + &h)) - f(&(&x - &h))) / (&h * Rational::from_integer(2.into()));
                let exact = de.eval(&Enclosure::from_rational(&x, 160)).unwrap().mid().to_rational();
                let diff = (fd - exact).abs();
                // h^2/6 times the third derivative; x^-2 at 1/3 is the largest case (~1e-9)
                assert!(diff < Rational::new(1.into(), 100_000_000u64.into()), "{text} at {x}: {diff}");
            }
        }
    }
}
