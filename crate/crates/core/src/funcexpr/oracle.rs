use super::{parse, Expr, Func, ParseError};
use crate::numerics::{Enclosure, EvalError};

/// The function being approximated together with its exact derivative.
#[derive(Clone, Debug)]
pub struct FunctionOracle {
    name: String,
    expr: Expr,
    derivative: Expr,
}

impl FunctionOracle {
    pub fn new(expr: Expr) -> Self {
        let derivative = expr.differentiate();
        FunctionOracle { name: expr.to_string(), expr, derivative }
    }

    pub fn named(name: impl Into<String>, expr: Expr) -> Self {
        let mut f = Self::new(expr);
        f.name = name.into();
        f
    }

    /// Built-in functions that can be requested by name, without going
    /// through the parser.
    pub fn builtin(name: &str) -> Option<Self> {
        let x = || Expr::Var;
        let one_plus_x = || Expr::Add(Box::new(Expr::lit(1)), Box::new(Expr::Var));
        let expr = match name {
            "log1p" => Expr::call(Func::Ln, one_plus_x()),
            "expm1" => Expr::Sub(Box::new(Expr::call(Func::Exp, x())), Box::new(Expr::lit(1))),
            "zero" => Expr::lit(0),
            other => Expr::call(Func::from_name(other)?, x()),
        };
        Some(Self::named(name, expr))
    }

    /// A built-in name or an expression in `x`.
    pub fn from_text(text: &str) -> Result<Self, ParseError> {
        let t = text.trim();
        if let Some(f) = Self::builtin(t) {
            return Ok(f);
        }
        Ok(Self::new(parse(t)?))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn derivative(&self) -> &Expr {
        &self.derivative
    }

    pub fn value(&self, x: &Enclosure) -> Result<Enclosure, EvalError> {
        self.expr.eval(x)
    }

    pub fn slope(&self, x: &Enclosure) -> Result<Enclosure, EvalError> {
        self.derivative.eval(x)
    }
}
