//! Recursive-descent parser for the component expression grammar:
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := factor (("*"|"/") factor)*
//! factor := base ("^" rational)?
//! base   := number | ident | func "(" expr ")" | "(" expr ")" | "-" base
//! func   := "sin" | "cos" | "exp" | "log" | "sqrt"
//! ident  := "t" | "q"digits | "p"digits | "p0"
//! ```
//!
//! The exponent may be written bare (`q1^2`, `q1^-1`, `q1^0.5`) or
//! parenthesised (`q1^(1/2)`); it must fold to a constant.

use num_rational::Rational64;

use super::{Expr, Func};
use crate::error::Error;
use crate::space::{Coord, Space};

pub fn parse_expr(src: &str, space: &Space) -> Result<Expr, Error> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, space: *space };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    space: Space,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), Error> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, Error> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.term()?);
            } else if self.eat(b'-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, Error> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = acc.mul(&self.factor()?);
            } else if self.eat(b'/') {
                acc = acc.div(&self.factor()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, Error> {
        let base = self.base()?;
        if self.eat(b'^') {
            let at = self.pos;
            let r = self.exponent(at)?;
            Ok(base.powr(r))
        } else {
            Ok(base)
        }
    }

    fn exponent(&mut self, at: usize) -> Result<Rational64, Error> {
        let e = self.base()?;
        let c = e.as_const().ok_or(Error::NonConstantExponent { pos: at })?;
        to_rational(c).ok_or(Error::Parse { pos: at, msg: format!("exponent {c} is not a small rational") })
    }

    fn base(&mut self) -> Result<Expr, Error> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'-') => {
                self.pos += 1;
                Ok(self.base()?.neg())
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(c) => Err(self.err(format!("unexpected `{}`", c as char))),
        }
    }

    fn number(&mut self) -> Result<Expr, Error> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            digits(self);
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            let exp_start = self.pos;
            digits(self);
            if self.pos == exp_start {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>()
            .map(Expr::constant)
            .map_err(|_| Error::Parse { pos: start, msg: format!("bad number `{text}`") })
    }

    fn ident(&mut self) -> Result<Expr, Error> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if let Some(f) = Func::from_name(name) {
            self.expect(b'(')?;
            let arg = self.expr()?;
            self.expect(b')')?;
            return Ok(arg.apply(f));
        }
        match Coord::parse(name) {
            Some(c) if self.space.contains(c) => Ok(Expr::var(c)),
            _ => Err(Error::UnknownIdentifier { name: name.to_string(), pos: start, space: self.space }),
        }
    }
}

/// Exact conversion of a decimal exponent to a rational with a small
/// denominator.
fn to_rational(c: f64) -> Option<Rational64> {
    if !c.is_finite() || c.abs() > 1e9 {
        return None;
    }
    for den in 1..=1000i64 {
        let num = (c * den as f64).round();
        if (num / den as f64 - c).abs() <= 1e-12 * c.abs().max(1.0) {
            return Some(Rational64::new(num as i64, den));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str, space: Space) -> Result<Expr, Error> {
        parse_expr(s, &space)
    }

    #[test]
    fn arithmetic() {
        let e = parse("p1*q1", Space::phase(1)).unwrap();
        assert_eq!(e.eval(&Space::phase(1), &[0.0, 2.0, 3.0]).unwrap(), 6.0);
        let e = parse("t + 0*q1", Space::base(1)).unwrap();
        assert_eq!(e, Expr::var(Coord::T));
        let e = parse("2 - 3 - 4", Space::base(1)).unwrap();
        assert_eq!(e.as_const(), Some(-5.0));
        let e = parse("8/4/2", Space::base(1)).unwrap();
        assert_eq!(e.as_const(), Some(1.0));
        let e = parse("-q1^2", Space::base(1)).unwrap();
        assert_eq!(e.eval(&Space::base(1), &[0.0, 3.0]).unwrap(), 9.0);
        let e = parse("q1^(1/2) + q1^0.5 + 1.5e1*q1^-1", Space::base(1)).unwrap();
        assert!((e.eval(&Space::base(1), &[0.0, 4.0]).unwrap() - (2.0 + 2.0 + 3.75)).abs() < 1e-14);
    }

    #[test]
    fn pythagoras() {
        let s = Space::base(1);
        let e = parse("sin(q1)^2 + cos(q1)^2", s).unwrap();
        for q in [-2.0, -0.3, 0.0, 1.1, 7.5] {
            assert!((e.eval(&s, &[0.0, q]).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(parse("q1 +", Space::base(1)), Err(Error::Parse { .. })));
        assert!(matches!(parse("q1 q1", Space::base(1)), Err(Error::Parse { pos: 3, .. })));
        assert!(matches!(parse("p1", Space::base(1)), Err(Error::UnknownIdentifier { .. })));
        assert!(matches!(parse("q2", Space::base(1)), Err(Error::UnknownIdentifier { .. })));
        assert!(matches!(parse("p0", Space::phase(1)), Err(Error::UnknownIdentifier { .. })));
        assert!(parse("p0", Space::extended(1)).is_ok());
        assert!(matches!(parse("q1^t", Space::base(1)), Err(Error::NonConstantExponent { pos: 3 })));
        assert!(matches!(parse("foo(q1)", Space::base(1)), Err(Error::UnknownIdentifier { .. })));
        assert!(matches!(parse("sin q1", Space::base(1)), Err(Error::Parse { .. })));
    }
}
