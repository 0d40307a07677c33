//! Textual function definitions: parsing, certified evaluation and symbolic
//! differentiation.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' integer)?
//! integer := ['-' | '+'] digits | '(' ['-' | '+'] digits ')'
//! primary := number | 'x' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//! func    := exp | ln | log | sin | cos | tan | atan | arctan | sqrt | sinh | cosh
//! ```
//!
//! `log` is the natural logarithm. Numbers are decimal literals (`0.5`,
//! `1e-3`) and are read exactly.

mod diff;
mod eval;
mod oracle;
mod parser;

use std::fmt;

use crate::numerics::{fraction_string, Rational};

pub use eval::eval_enclosure;
pub use oracle::FunctionOracle;
pub use parser::{parse, ParseError};

/// Unary elementary functions known to the evaluator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Tan,
    Atan,
    Sqrt,
    Sinh,
    Cosh,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Atan => "atan",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "atan" | "arctan" => Func::Atan,
            "sqrt" => Func::Sqrt,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Constant {
    Pi,
    E,
}

/// Expression tree over the single variable `x`.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Var,
    Lit(Rational),
    Const(Constant),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Integer power.
    Pow(Box<Expr>, i64),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn lit(v: i64) -> Expr {
        Expr::Lit(Rational::from_integer(v.into()))
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    /// True when the expression does not mention `x`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Var => false,
            Expr::Lit(_) | Expr::Const(_) => true,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_constant() && b.is_constant()
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Lit(q) if q.numer().sign() == num_bigint::Sign::Minus || !q.is_integer() => 2,
            _ => 5,
        }
    }
}

struct Wrapped<'a>(&'a Expr, u8);

impl fmt::Display for Wrapped<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.precedence() < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var => write!(f, "x"),
            Expr::Lit(q) => write!(f, "{}", fraction_string(q)),
            Expr::Const(Constant::Pi) => write!(f, "pi"),
            Expr::Const(Constant::E) => write!(f, "e"),
            Expr::Neg(a) => write!(f, "-{}", Wrapped(a, 4)),
            Expr::Add(a, b) => write!(f, "{} + {}", Wrapped(a, 1), Wrapped(b, 2)),
            Expr::Sub(a, b) => write!(f, "{} - {}", Wrapped(a, 1), Wrapped(b, 2)),
            Expr::Mul(a, b) => write!(f, "{}*{}", Wrapped(a, 2), Wrapped(b, 3)),
            Expr::Div(a, b) => write!(f, "{}/{}", Wrapped(a, 2), Wrapped(b, 3)),
            Expr::Pow(a, k) if *k < 0 => write!(f, "{}^({k})", Wrapped(a, 5)),
            Expr::Pow(a, k) => write!(f, "{}^{k}", Wrapped(a, 5)),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_round_trips_through_parser() {
        for text in ["cos(x)", "exp(x) - 1", "-x^2 + 3*x/(1 + x)", "ln(1 + x)", "x^(-2)*pi - e", "-(x - 1)"] {
            let e = parse(text).unwrap();
            let again = parse(&e.to_string()).unwrap();
            assert_eq!(e, again, "{text} -> {e}");
        }
    }

    #[test]
    fn constant_detection() {
        assert!(parse("log(1+1/2048)").unwrap().is_constant());
        assert!(parse("pi/4").unwrap().is_constant());
        assert!(!parse("cos(x)").unwrap().is_constant());
    }
}
