//! Recursive-descent parser for the expression language.
//!
//! ```text
//! expr    = term , { ("+" | "-") , term } ;
//! term    = unary , { ("*" | "/") , unary } ;
//! unary   = "-" , unary | power ;
//! power   = primary , [ "^" , unary ] ;
//! primary = number | constant | variable | func , "(" , expr , ")" | "(" , expr , ")" ;
//! ```
//!
//! A minus sign written directly in front of a number literal that is not
//! itself raised to a power is folded into a negative constant.

use super::{Expr, Func, Var};
use crate::error::{Error, Result};

pub(super) fn parse(text: &str, arity: usize) -> Result<Expr> {
    let mut p = Parser {
        src: text,
        bytes: text.as_bytes(),
        pos: 0,
        arity,
    };
    p.skip_ws();
    if p.pos == p.bytes.len() {
        return Err(p.error("empty expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    arity: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if !self.eat(b'-') {
            return self.power();
        }
        if matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == b'.') {
            let save = self.pos;
            let value = self.number()?;
            if self.peek() != Some(b'^') {
                return Ok(Expr::Const(-value));
            }
            self.pos = save;
        }
        Ok(Expr::Neg(Box::new(self.unary()?)))
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.eat(b'^') {
            let exponent = self.unary()?;
            Ok(Expr::Pow(Box::new(base), Box::new(exponent)))
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Expr::Const(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            Some(_) => Err(self.error("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.bytes.len() && p.bytes[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.bytes.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.bytes.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if matches!(self.bytes.get(self.pos), Some(c) if c.is_ascii_digit()) {
                digits(self);
            } else {
                // not an exponent after all, e.g. `2e` followed by something else
                self.pos = mark;
            }
        }
        self.src[start..self.pos].parse::<f64>().map_err(|_| Error::Syntax {
            offset: start,
            message: format!("malformed number `{}`", &self.src[start..self.pos]),
        })
    }

    fn identifier(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let word = &self.src[start..self.pos];
        if let Some(func) = Func::from_name(word) {
            if !self.eat(b'(') {
                return Err(self.error(&format!("expected `(` after `{word}`")));
            }
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.error("expected `)`"));
            }
            return Ok(Expr::Call(func, Box::new(arg)));
        }
        match word {
            "x" => return Ok(Expr::Var(Var::X)),
            "pi" => return Ok(Expr::Const(std::f64::consts::PI)),
            "e" => return Ok(Expr::Const(std::f64::consts::E)),
            _ => {}
        }
        let unknown = || Error::Syntax {
            offset: start,
            message: format!("unknown identifier `{word}`"),
        };
        let (make, digits): (fn(usize) -> Var, &str) = if let Some(d) = word.strip_prefix("dy") {
            (Var::Dy, d)
        } else if let Some(d) = word.strip_prefix("Dy") {
            (Var::Frac, d)
        } else if let Some(d) = word.strip_prefix('y') {
            (Var::Y, d)
        } else {
            return Err(unknown());
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0')
        {
            return Err(unknown());
        }
        let index: usize = digits.parse().map_err(|_| unknown())?;
        if index > self.arity {
            return Err(Error::Arity {
                name: word.to_string(),
                arity: self.arity,
            });
        }
        Ok(Expr::Var(make(index - 1)))
    }
}
