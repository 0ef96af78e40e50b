use std::fmt;

use num_rational::Rational64;

use super::{Expr, Kind};

// precedence levels: sum 1, product 2, unary minus 3, power 4, atom 5
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e.kind() {
        Kind::Const(c) if *c < 0.0 => UNARY,
        Kind::Const(_) | Kind::Var(_) | Kind::Func(..) | Kind::Call(_) => ATOM,
        Kind::Add(..) | Kind::Sub(..) => SUM,
        Kind::Mul(..) | Kind::Div(..) => PRODUCT,
        Kind::Neg(_) => UNARY,
        Kind::Pow(..) => 4,
    }
}

fn write_const(f: &mut fmt::Formatter<'_>, c: f64) -> fmt::Result {
    if c.fract() == 0.0 && c.abs() < 1e15 {
        write!(f, "{}", c as i64)
    } else {
        // Debug gives the shortest representation that round-trips
        write!(f, "{c:?}")
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, r: Rational64) -> fmt::Result {
    if r.is_integer() && *r.numer() >= 0 {
        write!(f, "{}", r.numer())
    } else if r.is_integer() {
        write!(f, "({})", r.numer())
    } else {
        write!(f, "({}/{})", r.numer(), r.denom())
    }
}

/// Writes `e`, parenthesised when its precedence is below `min`.
fn write_at(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if precedence(e) < min {
        write!(f, "(")?;
        write_expr(f, e)?;
        write!(f, ")")
    } else {
        write_expr(f, e)
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e.kind() {
        Kind::Const(c) => write_const(f, *c),
        Kind::Var(v) => write!(f, "{v}"),
        Kind::Neg(a) => {
            write!(f, "-")?;
            // the grammar's unary minus binds a base, never a power
            if matches!(a.kind(), Kind::Neg(_)) {
                write_expr(f, a)
            } else {
                write_at(f, a, ATOM)
            }
        }
        Kind::Func(func, a) => {
            write!(f, "{}(", func.name())?;
            write_expr(f, a)?;
            write!(f, ")")
        }
        Kind::Add(a, b) => {
            write_at(f, a, SUM)?;
            write!(f, " + ")?;
            write_at(f, b, SUM)
        }
        Kind::Sub(a, b) => {
            write_at(f, a, SUM)?;
            write!(f, " - ")?;
            write_at(f, b, PRODUCT)
        }
        Kind::Mul(a, b) => {
            write_at(f, a, PRODUCT)?;
            write!(f, "*")?;
            write_at(f, b, UNARY + 1)
        }
        Kind::Div(a, b) => {
            write_at(f, a, PRODUCT)?;
            write!(f, "/")?;
            write_at(f, b, UNARY + 1)
        }
        Kind::Pow(a, r) => {
            write_at(f, a, ATOM)?;
            write!(f, "^")?;
            write_rational(f, *r)
        }
        Kind::Call(c) => {
            if !c.partials.is_empty() {
                write!(f, "d")?;
                for k in &c.partials {
                    write!(f, "_{k}")?;
                }
                write!(f, " ")?;
            }
            write!(f, "{}(", c.func.name())?;
            for (i, a) in c.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write_expr(f, a)?;
            }
            write!(f, ")")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Coord;

    #[test]
    fn layout() {
        let p = Expr::var(Coord::P(1));
        let q = Expr::var(Coord::Q(1));
        let t = Expr::var(Coord::T);
        assert_eq!((&p * &q).to_string(), "p1*q1");
        assert_eq!((&p * (&q - &t)).to_string(), "p1*(q1 - t)");
        assert_eq!((&q - (&t - &p)).to_string(), "q1 - (t - p1)");
        assert_eq!(q.neg().powi(2).to_string(), "(-q1)^2");
        assert_eq!(q.powi(2).neg().to_string(), "-(q1^2)");
        assert_eq!(q.powr(Rational64::new(-1, 2)).to_string(), "q1^(-1/2)");
        assert_eq!((&q / (&t * &p)).to_string(), "q1/(t*p1)");
        assert_eq!(Expr::constant(-2.5).to_string(), "-2.5");
        assert_eq!((&q * Expr::constant(-2.0)).to_string(), "-2*q1");
    }
}
