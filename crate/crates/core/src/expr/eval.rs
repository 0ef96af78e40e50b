use std::collections::HashMap;
use std::sync::Arc;

use num_rational::Rational64;

use super::{Call, Expr, Kind, Node, Procedural};
use crate::error::EvalError;
use crate::space::Space;

/// Denominators (and bases raised to negative powers) smaller than this in
/// magnitude make a point singular.
pub const SINGULAR_GUARD: f64 = 1e-6;

/// Step for central differences of analytic gradients.
pub const FD_STEP: f64 = 1e-5;

type ProcKey = (usize, Vec<u64>);

/// Evaluation state for a single point. Shared subtrees are evaluated once,
/// and procedural values/gradients are cached by argument bits, which also
/// covers the shifted points used by finite differences.
pub struct EvalCtx<'a> {
    space: Space,
    point: &'a [f64],
    memo: HashMap<*const Node, (Expr, f64)>,
    values: HashMap<ProcKey, f64>,
    gradients: HashMap<ProcKey, Vec<f64>>,
}

impl<'a> EvalCtx<'a> {
    pub fn new(space: Space, point: &'a [f64]) -> Result<Self, EvalError> {
        if point.len() != space.dim() {
            return Err(EvalError::Dimension { expected: space.dim(), got: point.len() });
        }
        Ok(EvalCtx {
            space,
            point,
            memo: HashMap::new(),
            values: HashMap::new(),
            gradients: HashMap::new(),
        })
    }

    pub fn point(&self) -> &[f64] {
        self.point
    }

    pub fn eval(&mut self, e: &Expr) -> Result<f64, EvalError> {
        let v = self.eval_node(e)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::Domain("non-finite value"))
        }
    }

    pub fn eval_all(&mut self, es: &[Expr]) -> Result<Vec<f64>, EvalError> {
        es.iter().map(|e| self.eval(e)).collect()
    }

    fn eval_node(&mut self, e: &Expr) -> Result<f64, EvalError> {
        let shared = Arc::strong_count(&e.0) > 1;
        if shared {
            if let Some((_, v)) = self.memo.get(&Arc::as_ptr(&e.0)) {
                return Ok(*v);
            }
        }
        let v = match e.kind() {
            Kind::Const(c) => *c,
            Kind::Var(c) => {
                let i = self.space.index_of(*c).ok_or(EvalError::UnknownCoord(*c))?;
                self.point[i]
            }
            Kind::Neg(a) => -self.eval_node(a)?,
            Kind::Func(f, a) => {
                let x = self.eval_node(a)?;
                f.apply(x)?
            }
            Kind::Add(a, b) => self.eval_node(a)? + self.eval_node(b)?,
            Kind::Sub(a, b) => self.eval_node(a)? - self.eval_node(b)?,
            Kind::Mul(a, b) => self.eval_node(a)? * self.eval_node(b)?,
            Kind::Div(a, b) => {
                let num = self.eval_node(a)?;
                let den = self.eval_node(b)?;
                if den.abs() < SINGULAR_GUARD {
                    return Err(EvalError::Singular(den.abs()));
                }
                num / den
            }
            Kind::Pow(a, r) => pow_value(self.eval_node(a)?, *r)?,
            Kind::Call(call) => self.eval_call(call)?,
        };
        if shared {
            self.memo.insert(Arc::as_ptr(&e.0), (e.clone(), v));
        }
        Ok(v)
    }

    fn eval_call(&mut self, call: &Call) -> Result<f64, EvalError> {
        let args = call
            .args
            .iter()
            .map(|a| self.eval_node(a))
            .collect::<Result<Vec<_>, _>>()?;
        match call.partials.as_slice() {
            [] => self.proc_value(&call.func, &args),
            [k] => Ok(self.proc_gradient(&call.func, &args)?[*k]),
            [i, j] => {
                let mut fwd = args.clone();
                let mut bwd = args;
                fwd[*i] += FD_STEP;
                bwd[*i] -= FD_STEP;
                let gf = self.proc_gradient(&call.func, &fwd)?[*j];
                let gb = self.proc_gradient(&call.func, &bwd)?[*j];
                Ok((gf - gb) / (2.0 * FD_STEP))
            }
            more => Err(EvalError::OrderOverflow(more.len())),
        }
    }

    fn proc_value(&mut self, f: &Arc<dyn Procedural>, x: &[f64]) -> Result<f64, EvalError> {
        let key = proc_key(f, x);
        if let Some(v) = self.values.get(&key) {
            return Ok(*v);
        }
        let v = f.value(x)?;
        self.values.insert(key, v);
        Ok(v)
    }

    fn proc_gradient(&mut self, f: &Arc<dyn Procedural>, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        let key = proc_key(f, x);
        if let Some(g) = self.gradients.get(&key) {
            return Ok(g.clone());
        }
        let g = f.gradient(x)?;
        self.gradients.insert(key, g.clone());
        Ok(g)
    }
}

fn proc_key(f: &Arc<dyn Procedural>, x: &[f64]) -> ProcKey {
    (Arc::as_ptr(f) as *const () as usize, x.iter().map(|v| v.to_bits()).collect())
}

/// Real power with a rational exponent. Odd denominators take the real root
/// of negative bases.
pub(crate) fn pow_value(base: f64, r: Rational64) -> Result<f64, EvalError> {
    let (num, den) = (*r.numer(), *r.denom());
    if num < 0 && base.abs() < SINGULAR_GUARD {
        return Err(EvalError::Singular(base.abs()));
    }
    if den == 1 {
        return Ok(match i32::try_from(num) {
            Ok(k) => base.powi(k),
            Err(_) => base.powf(num as f64),
        });
    }
    if base < 0.0 {
        if den % 2 == 0 {
            return Err(EvalError::Domain("even root of a negative value"));
        }
        let mag = (-base).powf(num as f64 / den as f64);
        return Ok(if num % 2 == 0 { mag } else { -mag });
    }
    Ok(base.powf(num as f64 / den as f64))
}

impl Expr {
    /// Evaluate at a point of `space`.
    pub fn eval(&self, space: &Space, point: &[f64]) -> Result<f64, EvalError> {
        EvalCtx::new(*space, point)?.eval(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Coord;

    #[test]
    fn guard_and_domain() {
        let s = Space::base(1);
        let e = Expr::var(Coord::Q(1)) / Expr::var(Coord::T);
        assert_eq!(e.eval(&s, &[2.0, 6.0]).unwrap(), 3.0);
        assert!(matches!(e.eval(&s, &[1e-9, 6.0]), Err(EvalError::Singular(_))));
        let l = Expr::var(Coord::Q(1)).log();
        assert!(matches!(l.eval(&s, &[0.0, -1.0]), Err(EvalError::Domain(_))));
        let r = Expr::var(Coord::Q(1)).sqrt();
        assert!(matches!(r.eval(&s, &[0.0, -1.0]), Err(EvalError::Domain(_))));
        assert!(matches!(e.eval(&s, &[1.0]), Err(EvalError::Dimension { .. })));
    }

    #[test]
    fn rational_powers() {
        assert_eq!(pow_value(-8.0, Rational64::new(1, 3)).unwrap(), -2.0);
        assert!((pow_value(-8.0, Rational64::new(2, 3)).unwrap() - 4.0).abs() < 1e-12);
        assert!(pow_value(-4.0, Rational64::new(1, 2)).is_err());
        assert!(matches!(pow_value(0.0, Rational64::from_integer(-1)), Err(EvalError::Singular(_))));
    }
}
