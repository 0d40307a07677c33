use thiserror::Error;

use super::{Constant, Expr, Func};
use crate::numerics::{parse_decimal, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("non-integer exponent unsupported at position {pos}")]
    NonIntegerExponent { pos: usize },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent part only when digits follow, so `2e` is not swallowed
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lexeme: String = chars[start..i].iter().collect();
            let value = parse_decimal(&lexeme)
                .ok_or_else(|| ParseError::Syntax { pos: start, msg: format!("bad number `{lexeme}`") })?;
            out.push((Tok::Num(value), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), start));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), i));
            i += 1;
        } else {
            return Err(ParseError::Syntax { pos: i, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<(), ParseError> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(ParseError::Syntax { pos: self.offset(), msg: format!("expected `{op}`") })
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let at = self.offset();
        let k = self.integer_exponent().ok_or(ParseError::NonIntegerExponent { pos: at })?;
        if self.peek() == Some(&Tok::Op('^')) {
            return Err(ParseError::Syntax { pos: self.offset(), msg: "chained exponents need parentheses".into() });
        }
        Ok(Expr::Pow(Box::new(base), k))
    }

    fn integer_exponent(&mut self) -> Option<i64> {
        let save = self.pos;
        let parenthesized = self.eat('(');
        let negative = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let value = match self.peek() {
            Some(Tok::Num(q)) if q.is_integer() => {
                let v: i64 = q.to_integer().try_into().ok()?;
                self.pos += 1;
                v
            }
            _ => {
                self.pos = save;
                return None;
            }
        };
        if parenthesized && !self.eat(')') {
            self.pos = save;
            return None;
        }
        Some(if negative { -value } else { value })
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        let Some((tok, _)) = self.toks.get(self.pos).cloned() else {
            return Err(ParseError::Syntax { pos: at, msg: "unexpected end of input".into() });
        };
        self.pos += 1;
        match tok {
            Tok::Num(q) => Ok(Expr::Lit(q)),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Op(c) => Err(ParseError::Syntax { pos: at, msg: format!("unexpected `{c}`") }),
            Tok::Ident(name) => match name.as_str() {
                "x" => Ok(Expr::Var),
                "pi" | "Pi" => Ok(Expr::Const(Constant::Pi)),
                "e" => Ok(Expr::Const(Constant::E)),
                _ => match Func::from_name(&name) {
                    Some(f) => {
                        if !self.eat('(') {
                            return Err(ParseError::Syntax {
                                pos: self.offset(),
                                msg: format!("`{name}` must be applied with parentheses"),
                            });
                        }
                        let arg = self.expr()?;
                        self.expect(')')?;
                        Ok(Expr::call(f, arg))
                    }
                    None => Err(ParseError::UnknownIdentifier { name, pos: at }),
                },
            },
        }
    }
}

/// Parses a function definition in `x`.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(ParseError::Empty);
    }
    let mut p = Parser { toks, pos: 0, end: text.chars().count() };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(ParseError::Syntax { pos: p.offset(), msg: "trailing input".into() });
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var() -> Box<Expr> {
        Box::new(Expr::Var)
    }

    #[test]
    fn parses_calls_and_literals() {
        assert_eq!(parse("cos(x)").unwrap(), Expr::Call(Func::Cos, var()));
        assert_eq!(
            parse("exp(x) - 1").unwrap(),
            Expr::Sub(Box::new(Expr::Call(Func::Exp, var())), Box::new(Expr::lit(1)))
        );
        assert_eq!(parse("0.25").unwrap(), Expr::Lit(Rational::new(1.into(), 4.into())));
        assert_eq!(parse("log(1)").unwrap(), parse("ln(1)").unwrap());
    }

    #[test]
    fn precedence_and_associativity() {
        // power binds tighter than unary minus
        assert_eq!(parse("-x^2").unwrap(), Expr::Neg(Box::new(Expr::Pow(var(), 2))));
        // left-associative subtraction and division
        assert_eq!(
            parse("x - 1 - 2").unwrap(),
            Expr::Sub(Box::new(Expr::Sub(var(), Box::new(Expr::lit(1)))), Box::new(Expr::lit(2)))
        );
        assert_eq!(
            parse("x / 2 * 3").unwrap(),
            Expr::Mul(Box::new(Expr::Div(var(), Box::new(Expr::lit(2)))), Box::new(Expr::lit(3)))
        );
        assert_eq!(
            parse("1 + 2*x").unwrap(),
            Expr::Add(Box::new(Expr::lit(1)), Box::new(Expr::Mul(Box::new(Expr::lit(2)), var())))
        );
        assert_eq!(parse("x^-2").unwrap(), Expr::Pow(var(), -2));
        assert_eq!(parse("x^(-2)").unwrap(), Expr::Pow(var(), -2));
    }

    #[test]
    fn e_constant_versus_exponent() {
        assert_eq!(parse("2e").unwrap_err(), ParseError::Syntax { pos: 1, msg: "trailing input".into() });
        assert_eq!(parse("2*e").unwrap(), Expr::Mul(Box::new(Expr::lit(2)), Box::new(Expr::Const(Constant::E))));
        assert_eq!(parse("2e3").unwrap(), Expr::lit(2000));
    }

    #[test]
    fn errors() {
        assert_eq!(parse("2^x").unwrap_err(), ParseError::NonIntegerExponent { pos: 2 });
        assert_eq!(parse("x^0.5").unwrap_err(), ParseError::NonIntegerExponent { pos: 2 });
        assert_eq!(parse("foo(x)").unwrap_err(), ParseError::UnknownIdentifier { name: "foo".into(), pos: 0 });
        assert!(matches!(parse("cos x"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("(x + 1"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("x $ 1"), Err(ParseError::Syntax { pos: 2, .. })));
        assert_eq!(parse("   ").unwrap_err(), ParseError::Empty);
    }
}
