//! Fibred coordinate changes `(t, q) ↦ (t, Q(t, q))` and their cotangent
//! extension to `PhaseJ`. The new chart reuses the old coordinate names, so
//! an expression "in new coordinates" is written with `t, q1, .., p1, ..`
//! standing for `t, Q1, .., P1, ..`.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, EvalError, Result};
use crate::expr::{parse_expr, EvalCtx, Expr};
use crate::field::ScalarField;
use crate::space::{Coord, Space, SpaceKind};

use super::newton::NewtonSolver;
use super::tensors::{Bivector, Components, OneForm, Tensor11, Tensor12, TwoForm, VectorField};

/// Jacobian determinants below this make a transform singular at a point.
pub const JACOBIAN_GUARD: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Express an object given in old coordinates in the new ones.
    Forward,
    /// Express an object given in new coordinates in the old ones.
    Backward,
}

#[derive(Clone, Debug)]
pub struct FibredTransform {
    n: usize,
    forward: Vec<Expr>,
    inverse: Vec<Expr>,
    symbolic_inverse: bool,
}

impl FibredTransform {
    /// `forward[i]` is `Q^{i+1}(t, q)`; `inverse[i]`, when known, is
    /// `q^{i+1}(t, Q)` written in the new chart. Without an inverse a
    /// Newton solve is used.
    pub fn new(n: usize, forward: Vec<Expr>, inverse: Option<Vec<Expr>>) -> Result<Self> {
        let base = Space::base(n);
        let check = |es: &[Expr]| -> Result<()> {
            if es.len() != n {
                return Err(Error::WrongSpace(format!("{} component functions supplied, {n} needed", es.len())));
            }
            if let Some(c) = es.iter().flat_map(|e| e.vars()).find(|c| !base.contains(*c)) {
                return Err(EvalError::UnknownCoord(c).into());
            }
            Ok(())
        };
        check(&forward)?;
        let (inverse, symbolic_inverse) = match inverse {
            Some(inv) => {
                check(&inv)?;
                (inv, true)
            }
            None => (Arc::new(NewtonSolver::new(n, forward.clone())).components(), false),
        };
        Ok(FibredTransform { n, forward, inverse, symbolic_inverse })
    }

    pub fn parse(n: usize, forward: &[&str], inverse: Option<&[&str]>) -> Result<Self> {
        let base = Space::base(n);
        let parse_all = |srcs: &[&str]| srcs.iter().map(|s| parse_expr(s, &base)).collect::<Result<Vec<_>>>();
        let fwd = parse_all(forward)?;
        let inv = inverse.map(parse_all).transpose()?;
        FibredTransform::new(n, fwd, inv)
    }

    pub fn identity(n: usize) -> Self {
        let id: Vec<Expr> = (1..=n).map(|i| Expr::var(Coord::Q(i as u16))).collect();
        FibredTransform { n, forward: id.clone(), inverse: id, symbolic_inverse: true }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn forward(&self) -> &[Expr] {
        &self.forward
    }

    pub fn inverse(&self) -> &[Expr] {
        &self.inverse
    }

    pub fn has_symbolic_inverse(&self) -> bool {
        self.symbolic_inverse
    }

    pub fn is_procedural(&self) -> bool {
        self.forward.iter().chain(&self.inverse).any(Expr::is_procedural)
    }

    /// Checks `det ∂Q/∂q` at a base point.
    pub fn check_jacobian(&self, base_point: &[f64]) -> Result<()> {
        let n = self.n;
        let mut ctx = EvalCtx::new(Space::base(n), base_point)?;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = ctx.eval(&self.forward[i].diff(Coord::Q(j as u16 + 1)))?;
            }
        }
        if m.determinant().abs() < JACOBIAN_GUARD {
            return Err(Error::SingularJacobian(base_point.to_vec()));
        }
        Ok(())
    }

    /// The induced map on `BaseE(n)` or `PhaseJ(n)`.
    pub fn chart_map(&self, space: Space) -> Result<ChartMap> {
        if space.n != self.n {
            return Err(Error::WrongSpace(format!("transform on n = {} applied to {space}", self.n)));
        }
        let n = self.n;
        let t = Expr::var(Coord::T);
        let q = |i: usize| Coord::Q(i as u16 + 1);
        let p = |i: usize| Expr::var(Coord::P(i as u16 + 1));
        match space.kind {
            SpaceKind::BaseE => {
                let to_new = std::iter::once(t.clone()).chain(self.forward.iter().cloned()).collect();
                let to_old = std::iter::once(t).chain(self.inverse.iter().cloned()).collect();
                Ok(ChartMap::new(space, to_new, to_old))
            }
            SpaceKind::PhaseJ => {
                let at_new: HashMap<Coord, Expr> = (0..n).map(|i| (q(i), self.forward[i].clone())).collect();
                let at_old: HashMap<Coord, Expr> = (0..n).map(|i| (q(i), self.inverse[i].clone())).collect();
                // P_j = p_i ∂q^i/∂Q^j evaluated at Q(t, q)
                let big_p = (0..n).map(|j| {
                    Expr::sum((0..n).map(|i| p(i).mul(&self.inverse[i].diff(q(j)).substitute(&at_new))))
                });
                // p_i = P_j ∂Q^j/∂q^i evaluated at q(t, Q)
                let small_p = (0..n).map(|i| {
                    Expr::sum((0..n).map(|j| p(j).mul(&self.forward[j].diff(q(i)).substitute(&at_old))))
                });
                let to_new = std::iter::once(t.clone())
                    .chain(self.forward.iter().cloned())
                    .chain(big_p)
                    .collect();
                let to_old = std::iter::once(t).chain(self.inverse.iter().cloned()).chain(small_p).collect();
                Ok(ChartMap::new(space, to_new, to_old))
            }
            SpaceKind::ExtendedT => {
                Err(Error::WrongSpace("coordinate changes on ExtendedT are not supported".into()))
            }
        }
    }
}

/// A diffeomorphism of a chart onto itself together with its Jacobians,
/// both expressed in the new coordinates.
#[derive(Clone, Debug)]
pub struct ChartMap {
    space: Space,
    to_new: Vec<Expr>,
    to_old: Vec<Expr>,
    /// `∂y^a/∂x^b` at `x(y)`.
    jac: Vec<Expr>,
    /// `∂x^a/∂y^b`.
    jac_inv: Vec<Expr>,
    old_at_new: HashMap<Coord, Expr>,
}

impl ChartMap {
    pub fn new(space: Space, to_new: Vec<Expr>, to_old: Vec<Expr>) -> Self {
        let coords = space.coords();
        let d = space.dim();
        let old_at_new: HashMap<Coord, Expr> = coords.iter().copied().zip(to_old.iter().cloned()).collect();
        let jac = (0..d * d).map(|k| to_new[k / d].diff(coords[k % d]).substitute(&old_at_new)).collect();
        let jac_inv = (0..d * d).map(|k| to_old[k / d].diff(coords[k % d])).collect();
        ChartMap { space, to_new, to_old, jac, jac_inv, old_at_new }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn inverted(&self) -> ChartMap {
        ChartMap::new(self.space, self.to_old.clone(), self.to_new.clone())
    }

    pub fn map_point(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        EvalCtx::new(self.space, x)?.eval_all(&self.to_new)
    }

    /// `f ∘ x(y)`.
    pub fn pull(&self, e: &Expr) -> Expr {
        e.substitute(&self.old_at_new)
    }

    fn j(&self, a: usize, b: usize) -> &Expr {
        &self.jac[a * self.space.dim() + b]
    }

    fn k(&self, a: usize, b: usize) -> &Expr {
        &self.jac_inv[a * self.space.dim() + b]
    }

    fn pulled(&self, comps: &[Expr]) -> Vec<Expr> {
        comps.iter().map(|e| self.pull(e)).collect()
    }
}

pub trait Transformable: Sized {
    fn transform_by(&self, map: &ChartMap) -> Result<Self>;
    fn chart(&self) -> Space;
}

/// Re-expresses `obj` in the chart produced by `t` (or, backward, in the
/// chart `t` started from).
pub fn transform<T: Transformable>(obj: &T, t: &FibredTransform, direction: Direction) -> Result<T> {
    let map = t.chart_map(obj.chart())?;
    match direction {
        Direction::Forward => obj.transform_by(&map),
        Direction::Backward => obj.transform_by(&map.inverted()),
    }
}

fn check_chart(map: &ChartMap, s: Space) -> Result<()> {
    if map.space == s {
        Ok(())
    } else {
        Err(Error::SpaceMismatch { expected: map.space, got: s })
    }
}

impl Transformable for ScalarField {
    fn transform_by(&self, map: &ChartMap) -> Result<Self> {
        check_chart(map, self.space())?;
        ScalarField::new(self.space(), map.pull(self.expr()))
    }
    fn chart(&self) -> Space {
        self.space()
    }
}

impl Transformable for VectorField {
    fn transform_by(&self, map: &ChartMap) -> Result<Self> {
        check_chart(map, self.space())?;
        let v = map.pulled(self.components());
        let d = v.len();
        VectorField::new(self.space(), (0..d).map(|a| Expr::sum((0..d).map(|b| map.j(a, b).mul(&v[b])))).collect())
    }
    fn chart(&self) -> Space {
        self.space()
    }
}

impl Transformable for OneForm {
    fn transform_by(&self, map: &ChartMap) -> Result<Self> {
        check_chart(map, self.space())?;
        let w = map.pulled(self.components());
        let d = w.len();
        OneForm::new(self.space(), (0..d).map(|b| Expr::sum((0..d).map(|a| w[a].mul(map.k(a, b))))).collect())
    }
    fn chart(&self) -> Space {
        self.space()
    }
}

impl Transformable for Tensor11 {
    fn transform_by(&self, map: &ChartMap) -> Result<Self> {
        check_chart(map, self.space())?;
        let d = self.dim();
        let r = Tensor11::new(self.space(), map.pulled(self.components()))?;
        // (R K)^c_b first, then J (R K)
        let rk = Tensor11::from_fn(self.space(), |c, b| Expr::sum((0..d).map(|e| r.entry(c, e).mul(map.k(e, b)))));
        Ok(Tensor11::from_fn(self.space(), |a, b| Expr::sum((0..d).map(|c| map.j(a, c).mul(rk.entry(c, b))))))
    }
    fn chart(&self) -> Space {
        self.space()
    }
}

impl Transformable for TwoForm {
    fn transform_by(&self, map: &ChartMap) -> Result<Self> {
        check_chart(map, self.space())?;
        let d = self.dim();
        let w = TwoForm::new(self.space(), map.pulled(self.components()))?;
        let wk = TwoForm::from_fn(self.space(), |c, b| Expr::sum((0..d).map(|e| w.entry(c, e).mul(map.k(e, b)))));
        Ok(TwoForm::from_fn(self.space(), |a, b| Expr::sum((0..d).map(|c| map.k(c, a).mul(wk.entry(c, b))))))
    }
    fn chart(&self) -> Space {
        self.space()
    }
}

impl Transformable for Bivector {
    fn transform_by(&self, map: &ChartMap) -> Result<Self> {
        check_chart(map, self.space())?;
        let d = self.dim();
        let l = Bivector::new(self.space(), map.pulled(self.components()))?;
        let lj = Bivector::from_fn(self.space(), |c, b| Expr::sum((0..d).map(|e| l.entry(c, e).mul(map.j(b, e)))));
        Ok(Bivector::from_fn(self.space(), |a, b| Expr::sum((0..d).map(|c| map.j(a, c).mul(lj.entry(c, b))))))
    }
    fn chart(&self) -> Space {
        self.space()
    }
}

impl Transformable for Tensor12 {
    fn transform_by(&self, map: &ChartMap) -> Result<Self> {
        check_chart(map, self.space())?;
        let d = self.dim();
        let s = self.space();
        let t = Tensor12::new(s, map.pulled(self.components()))?;
        let step1 = Tensor12::from_fn(s, |a, b, c| Expr::sum((0..d).map(|f| t.entry(a, b, f).mul(map.k(f, c)))));
        let step2 = Tensor12::from_fn(s, |a, b, c| Expr::sum((0..d).map(|e| step1.entry(a, e, c).mul(map.k(e, b)))));
        Ok(Tensor12::from_fn(s, |a, b, c| Expr::sum((0..d).map(|e| map.j(a, e).mul(step2.entry(e, b, c))))))
    }
    fn chart(&self) -> Space {
        self.space()
    }
}
