use std::collections::HashMap;
use std::sync::Arc;

use num_rational::Rational64;

use super::{Expr, Func, Kind, Node};
use crate::space::Coord;

impl Expr {
    /// Exact partial derivative with respect to a coordinate. Procedural
    /// calls are differentiated by the chain rule into calls requesting one
    /// more partial; whether that order can be evaluated is decided at
    /// evaluation time.
    pub fn diff(&self, c: Coord) -> Expr {
        let mut memo = HashMap::new();
        self.diff_inner(c, &mut memo)
    }

    fn diff_inner(&self, c: Coord, memo: &mut HashMap<*const Node, Expr>) -> Expr {
        let shared = Arc::strong_count(&self.0) > 1;
        if shared {
            if let Some(d) = memo.get(&Arc::as_ptr(&self.0)) {
                return d.clone();
            }
        }
        let out = match self.kind() {
            Kind::Const(_) => Expr::zero(),
            Kind::Var(v) => {
                if *v == c {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Kind::Neg(a) => a.diff_inner(c, memo).neg(),
            Kind::Add(a, b) => a.diff_inner(c, memo).add(&b.diff_inner(c, memo)),
            Kind::Sub(a, b) => a.diff_inner(c, memo).sub(&b.diff_inner(c, memo)),
            Kind::Mul(a, b) => {
                let da = a.diff_inner(c, memo);
                let db = b.diff_inner(c, memo);
                da.mul(b).add(&a.mul(&db))
            }
            Kind::Div(a, b) => {
                // a'/b - (a/b)(b'/b): only ever divides by b itself, so the
                // singular guard triggers on the same points as the original
                let da = a.diff_inner(c, memo);
                let db = b.diff_inner(c, memo);
                da.div(b).sub(&self.mul(&db.div(b)))
            }
            Kind::Pow(a, r) => {
                let da = a.diff_inner(c, memo);
                if da.is_zero() {
                    Expr::zero()
                } else {
                    let r1 = r - Rational64::from_integer(1);
                    Expr::constant(*r.numer() as f64 / *r.denom() as f64)
                        .mul(&a.powr(r1))
                        .mul(&da)
                }
            }
            Kind::Func(f, a) => {
                let da = a.diff_inner(c, memo);
                if da.is_zero() {
                    Expr::zero()
                } else {
                    let outer = match f {
                        Func::Sin => a.cos(),
                        Func::Cos => a.sin().neg(),
                        Func::Exp => self.clone(),
                        Func::Log => return memoize(shared, self, da.div(a), memo),
                        Func::Sqrt => {
                            return memoize(shared, self, da.div(&Expr::constant(2.0).mul(self)), memo)
                        }
                    };
                    outer.mul(&da)
                }
            }
            Kind::Call(call) => {
                let mut terms = Vec::new();
                for (k, arg) in call.args.iter().enumerate() {
                    let da = arg.diff_inner(c, memo);
                    if !da.is_zero() {
                        terms.push(Expr::call_partial(call, k).mul(&da));
                    }
                }
                Expr::sum(terms)
            }
        };
        memoize(shared, self, out, memo)
    }
}

fn memoize(shared: bool, node: &Expr, out: Expr, memo: &mut HashMap<*const Node, Expr>) -> Expr {
    if shared {
        memo.insert(Arc::as_ptr(&node.0), out.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Space;

    fn ev(e: &Expr, space: Space, pt: &[f64]) -> f64 {
        e.eval(&space, pt).unwrap()
    }

    #[test]
    fn polynomial_rule() {
        let s = Space::base(1);
        let e = Expr::var(Coord::Q(1)).powi(2) * Expr::var(Coord::T);
        assert_eq!(ev(&e.diff(Coord::Q(1)), s, &[3.0, 2.0]), 12.0);
        assert!(Expr::var(Coord::Q(1)).diff(Coord::T).is_zero());
    }

    #[test]
    fn elementary_functions() {
        let s = Space::base(1);
        let x = Expr::var(Coord::Q(1));
        let pt = [0.0, 0.7];
        let cases: Vec<(Expr, f64)> = vec![
            (x.sin(), 0.7f64.cos()),
            (x.cos(), -0.7f64.sin()),
            (x.exp(), 0.7f64.exp()),
            (x.log(), 1.0 / 0.7),
            (x.sqrt(), 0.5 / 0.7f64.sqrt()),
            (x.powr(Rational64::new(3, 2)), 1.5 * 0.7f64.sqrt()),
            (Expr::one() / &x, -1.0 / 0.49),
        ];
        for (e, want) in cases {
            let got = ev(&e.diff(Coord::Q(1)), s, &pt);
            assert!((got - want).abs() < 1e-14, "{e}: {got} vs {want}");
        }
    }
}
