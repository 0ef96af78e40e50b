//! Numerical inverse of a fibred change of coordinates `Q = Q(t, q)`,
//! exposed as procedural functions `q^i(t, Q)`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, DVector};

use crate::error::EvalError;
use crate::expr::{EvalCtx, Expr, Procedural};
use crate::space::{Coord, Space};

const MAX_ITER: usize = 50;
const MAX_HALVINGS: usize = 30;
const RESIDUAL_TOL: f64 = 1e-12;
const CACHE_LIMIT: usize = 4096;

thread_local! {
    static HINT: RefCell<Option<Vec<f64>>> = const { RefCell::new(None) };
}

/// Runs `f` with `base_point = (t, q)` as the Newton starting guess on this
/// thread. Without a hint the iteration starts from `q = Q`.
pub fn with_seed_hint<R>(base_point: &[f64], f: impl FnOnce() -> R) -> R {
    let prev = HINT.with(|h| h.borrow_mut().replace(base_point.to_vec()));
    let out = f();
    HINT.with(|h| *h.borrow_mut() = prev);
    out
}

struct Solution {
    q: Vec<f64>,
    /// Row `i`: `(∂q^i/∂t, ∂q^i/∂Q^1, ..., ∂q^i/∂Q^n)`.
    grad: Vec<Vec<f64>>,
}

pub(crate) struct NewtonSolver {
    n: usize,
    forward: Vec<Expr>,
    jac_q: Vec<Expr>,
    jac_t: Vec<Expr>,
    cache: Mutex<HashMap<Vec<u64>, Arc<Solution>>>,
}

impl fmt::Debug for NewtonSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NewtonSolver").field("forward", &self.forward).finish()
    }
}

type Residual = (DVector<f64>, DMatrix<f64>, DVector<f64>);

impl NewtonSolver {
    pub(crate) fn new(n: usize, forward: Vec<Expr>) -> Self {
        let jac_q = (0..n * n).map(|k| forward[k / n].diff(Coord::Q((k % n + 1) as u16))).collect();
        let jac_t = forward.iter().map(|f| f.diff(Coord::T)).collect();
        NewtonSolver { n, forward, jac_q, jac_t, cache: Mutex::new(HashMap::new()) }
    }

    /// Component functions `q^i(t, Q)`, `i = 1..n`.
    pub(crate) fn components(self: &Arc<Self>) -> Vec<Expr> {
        let args: Vec<Expr> = Space::base(self.n).coords().into_iter().map(Expr::var).collect();
        (0..self.n)
            .map(|i| Expr::call(Arc::new(NewtonComponent { solver: self.clone(), index: i }), args.clone()))
            .collect()
    }

    fn residual(&self, t: f64, q: &[f64], target: &[f64]) -> Result<Residual, EvalError> {
        let n = self.n;
        let mut point = Vec::with_capacity(n + 1);
        point.push(t);
        point.extend_from_slice(q);
        let mut ctx = EvalCtx::new(Space::base(n), &point)?;
        let f = ctx.eval_all(&self.forward)?;
        let jq = ctx.eval_all(&self.jac_q)?;
        let jt = ctx.eval_all(&self.jac_t)?;
        Ok((
            DVector::from_iterator(n, f.iter().zip(target).map(|(a, b)| a - b)),
            DMatrix::from_row_slice(n, n, &jq),
            DVector::from_vec(jt),
        ))
    }

    fn solve(&self, x: &[f64]) -> Result<Arc<Solution>, EvalError> {
        let key: Vec<u64> = x.iter().map(|v| v.to_bits()).collect();
        if let Some(s) = self.cache.lock().unwrap().get(&key) {
            return Ok(s.clone());
        }
        let sol = Arc::new(self.iterate(x)?);
        let mut cache = self.cache.lock().unwrap();
        if cache.len() >= CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(key, sol.clone());
        Ok(sol)
    }

    fn iterate(&self, x: &[f64]) -> Result<Solution, EvalError> {
        let n = self.n;
        let (t, target) = (x[0], &x[1..]);
        let scale = 1.0 + target.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let hint = HINT.with(|h| h.borrow().clone()).filter(|h| h.len() == n + 1);
        let mut q = hint.map(|h| h[1..].to_vec()).unwrap_or_else(|| target.to_vec());
        let (mut f, mut jq, mut jt) = self.residual(t, &q, target)?;
        for _ in 0..MAX_ITER {
            let norm = f.amax();
            let step = jq
                .clone()
                .lu()
                .solve(&(-&f))
                .ok_or_else(|| EvalError::Inverse("singular Jacobian during Newton iteration".into()))?;
            if norm <= RESIDUAL_TOL * scale {
                // one polishing step, kept only if it does not hurt
                let trial: Vec<f64> = q.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
                if let Ok(r) = self.residual(t, &trial, target) {
                    if r.0.amax() <= norm {
                        q = trial;
                        (_, jq, jt) = r;
                    }
                }
                return self.finish(q, &jq, &jt);
            }
            let mut lambda = 1.0;
            let mut accepted = None;
            for _ in 0..MAX_HALVINGS {
                let trial: Vec<f64> = q.iter().zip(step.iter()).map(|(a, b)| a + lambda * b).collect();
                if let Ok(r) = self.residual(t, &trial, target) {
                    if r.0.amax() < norm {
                        accepted = Some((trial, r));
                        break;
                    }
                }
                lambda *= 0.5;
            }
            let (trial, r) =
                accepted.ok_or_else(|| EvalError::Inverse(format!("line search stalled at residual {norm:e}")))?;
            q = trial;
            (f, jq, jt) = r;
        }
        Err(EvalError::Inverse(format!("no convergence in {MAX_ITER} iterations")))
    }

    fn finish(&self, q: Vec<f64>, jq: &DMatrix<f64>, jt: &DVector<f64>) -> Result<Solution, EvalError> {
        let inv = jq
            .clone()
            .try_inverse()
            .ok_or_else(|| EvalError::Inverse("singular Jacobian at the solution".into()))?;
        let dt = -(&inv * jt);
        let grad = (0..self.n)
            .map(|i| std::iter::once(dt[i]).chain((0..self.n).map(|j| inv[(i, j)])).collect())
            .collect();
        Ok(Solution { q, grad })
    }
}

#[derive(Debug)]
struct NewtonComponent {
    solver: Arc<NewtonSolver>,
    index: usize,
}

impl Procedural for NewtonComponent {
    fn name(&self) -> String {
        format!("qinv{}", self.index + 1)
    }

    fn arity(&self) -> usize {
        self.solver.n + 1
    }

    fn value(&self, x: &[f64]) -> Result<f64, EvalError> {
        Ok(self.solver.solve(x)?.q[self.index])
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        Ok(self.solver.solve(x)?.grad[self.index].clone())
    }
}
