use std::fmt;
use std::sync::Arc;

use crate::error::{Error, EvalError, Result};
use crate::expr::{parse_expr, Expr, Procedural};
use crate::space::{Coord, Space};

/// Which machinery produces values and derivatives of a field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    /// Pure expression tree, exact derivatives of any order.
    Symbolic,
    /// At least one procedural call: analytic first derivatives, second by
    /// central differences, nothing higher.
    Procedural,
}

/// A smooth function on a chart.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    space: Space,
    expr: Expr,
}

impl ScalarField {
    pub fn parse(src: &str, space: Space) -> Result<Self> {
        Ok(ScalarField { space, expr: parse_expr(src, &space)? })
    }

    /// Wraps an expression, checking that it only names coordinates of `space`.
    pub fn new(space: Space, expr: Expr) -> Result<Self> {
        if let Some(c) = expr.vars().into_iter().find(|c| !space.contains(*c)) {
            return Err(EvalError::UnknownCoord(c).into());
        }
        Ok(ScalarField { space, expr })
    }

    /// A field backed by code, called with the full coordinate tuple.
    pub fn procedural(space: Space, f: Arc<dyn Procedural>) -> Self {
        let args = space.coords().into_iter().map(Expr::var).collect();
        ScalarField { space, expr: Expr::call(f, args) }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn into_expr(self) -> Expr {
        self.expr
    }

    pub fn backend(&self) -> Backend {
        if self.expr.is_procedural() {
            Backend::Procedural
        } else {
            Backend::Symbolic
        }
    }

    pub fn differentiate(&self, coord: Coord) -> Result<Self> {
        if !self.space.contains(coord) {
            return Err(EvalError::UnknownCoord(coord).into());
        }
        let d = self.expr.diff(coord);
        let order = d.max_call_order();
        if order > 2 {
            return Err(Error::OrderOverflow(order));
        }
        Ok(ScalarField { space: self.space, expr: d })
    }

    pub fn evaluate(&self, point: &[f64]) -> Result<f64, EvalError> {
        self.expr.eval(&self.space, point)
    }

    /// The same function viewed on another chart whose coordinates include
    /// all of this field's variables (pull-back along a projection).
    pub fn pullback(&self, to: Space) -> Result<Self> {
        ScalarField::new(to, self.expr.clone())
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let f = ScalarField::parse("q1^2*t", Space::base(1)).unwrap();
        let d = f.differentiate(Coord::Q(1)).unwrap();
        assert_eq!(d.evaluate(&[3.0, 2.0]).unwrap(), 12.0);
        let g = ScalarField::parse("q1", Space::base(1)).unwrap();
        assert!(g.differentiate(Coord::T).unwrap().expr().is_zero());
        let h = ScalarField::parse("exp(0*t)", Space::base(1)).unwrap();
        assert_eq!(h.evaluate(&[0.3, -1.2]).unwrap(), 1.0);
        let s = ScalarField::parse("q1/t", Space::base(1)).unwrap();
        assert_eq!(s.evaluate(&[2.0, 6.0]).unwrap(), 3.0);
        assert!(matches!(s.evaluate(&[1e-9, 6.0]), Err(EvalError::Singular(_))));
    }

    #[test]
    fn pullback_and_foreign_coords() {
        let f = ScalarField::parse("t*q1", Space::base(1)).unwrap();
        let g = f.pullback(Space::phase(1)).unwrap();
        assert_eq!(g.evaluate(&[2.0, 3.0, 100.0]).unwrap(), 6.0);
        let h = ScalarField::parse("p1", Space::phase(1)).unwrap();
        assert!(h.pullback(Space::base(1)).is_err());
        assert!(f.differentiate(Coord::P(1)).is_err());
    }
}
