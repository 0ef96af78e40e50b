//! Component containers. Every tensor is stored in full index form over its
//! chart; block structure (vertical, `R(dt) = 0`, semi-basic) is exposed as
//! predicates rather than separate types.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::field::ScalarField;
use crate::space::{Coord, Space};

/// Shared view used by the pointwise checker and the transform code.
pub trait Components {
    fn space(&self) -> Space;
    fn components(&self) -> &[Expr];

    fn is_procedural(&self) -> bool {
        self.components().iter().any(Expr::is_procedural)
    }
}

pub(crate) fn same_space(a: Space, b: Space) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::SpaceMismatch { expected: a, got: b })
    }
}

fn check_len(space: Space, len: usize, want: usize) -> Result<()> {
    if len == want {
        Ok(())
    } else {
        Err(Error::WrongSpace(format!("{len} components supplied, {space} needs {want}")))
    }
}

/// Re-indexes components from one chart to another by coordinate name,
/// filling coordinates missing from `from` with zero. This is the pull-back
/// of forms along the bundle projections, which keep coordinate names.
fn reindex(from: Space, to: Space, comps: &[Expr]) -> Vec<Expr> {
    to.coords()
        .into_iter()
        .map(|c| from.index_of(c).map(|i| comps[i].clone()).unwrap_or_else(Expr::zero))
        .collect()
}

macro_rules! impl_components {
    ($t:ty, $field:ident) => {
        impl Components for $t {
            fn space(&self) -> Space {
                self.space
            }
            fn components(&self) -> &[Expr] {
                &self.$field
            }
        }
    };
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    space: Space,
    comps: Vec<Expr>,
}

impl_components!(VectorField, comps);

impl VectorField {
    pub fn new(space: Space, comps: Vec<Expr>) -> Result<Self> {
        check_len(space, comps.len(), space.dim())?;
        Ok(VectorField { space, comps })
    }

    pub fn zero(space: Space) -> Self {
        VectorField { space, comps: vec![Expr::zero(); space.dim()] }
    }

    /// The coordinate field `∂/∂x^idx`.
    pub fn coordinate(space: Space, idx: usize) -> Self {
        let mut v = VectorField::zero(space);
        v.comps[idx] = Expr::one();
        v
    }

    /// Builds a field from `(coordinate, expression)` pairs; unnamed
    /// directions are zero.
    pub fn from_pairs(space: Space, pairs: &[(Coord, Expr)]) -> Result<Self> {
        let mut v = VectorField::zero(space);
        for (c, e) in pairs {
            let i = space.index_of(*c).ok_or_else(|| Error::WrongSpace(format!("{c} not in {space}")))?;
            v.comps[i] = e.clone();
        }
        Ok(v)
    }

    pub fn component(&self, i: usize) -> &Expr {
        &self.comps[i]
    }

    pub fn component_field(&self, i: usize) -> ScalarField {
        ScalarField::new(self.space, self.comps[i].clone()).expect("component lives on the field's chart")
    }

    /// `⟨X, dt⟩ ≡ 0`, decided structurally after constant folding.
    pub fn is_vertical(&self) -> bool {
        self.comps[0].is_zero()
    }

    /// `⟨X, dt⟩ ≡ 1`, decided structurally after constant folding.
    pub fn is_time_normalized(&self) -> bool {
        self.comps[0].is_one()
    }

    /// Directional derivative `X(f)`.
    pub fn derivative_of(&self, f: &Expr) -> Expr {
        let coords = self.space.coords();
        Expr::sum(
            self.comps
                .iter()
                .zip(coords)
                .filter(|(x, _)| !x.is_zero())
                .map(|(x, c)| x.mul(&f.diff(c))),
        )
    }

    pub fn scale(&self, f: &Expr) -> Self {
        VectorField { space: self.space, comps: self.comps.iter().map(|c| f.mul(c)).collect() }
    }

    pub fn add(&self, other: &VectorField) -> Result<Self> {
        same_space(self.space, other.space)?;
        Ok(VectorField { space: self.space, comps: zip_with(&self.comps, &other.comps, Expr::add) })
    }

    pub fn sub(&self, other: &VectorField) -> Result<Self> {
        same_space(self.space, other.space)?;
        Ok(VectorField { space: self.space, comps: zip_with(&self.comps, &other.comps, Expr::sub) })
    }

    pub fn neg(&self) -> Self {
        VectorField { space: self.space, comps: self.comps.iter().map(Expr::neg).collect() }
    }

    /// Pairing `⟨X, α⟩`.
    pub fn pair(&self, alpha: &OneForm) -> Result<Expr> {
        same_space(self.space, alpha.space)?;
        Ok(dot(&self.comps, &alpha.comps))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OneForm {
    space: Space,
    comps: Vec<Expr>,
}

impl_components!(OneForm, comps);

impl OneForm {
    pub fn new(space: Space, comps: Vec<Expr>) -> Result<Self> {
        check_len(space, comps.len(), space.dim())?;
        Ok(OneForm { space, comps })
    }

    pub fn zero(space: Space) -> Self {
        OneForm { space, comps: vec![Expr::zero(); space.dim()] }
    }

    /// The coordinate differential `dx^idx`.
    pub fn coordinate(space: Space, idx: usize) -> Self {
        let mut a = OneForm::zero(space);
        a.comps[idx] = Expr::one();
        a
    }

    pub fn from_pairs(space: Space, pairs: &[(Coord, Expr)]) -> Result<Self> {
        let mut a = OneForm::zero(space);
        for (c, e) in pairs {
            let i = space.index_of(*c).ok_or_else(|| Error::WrongSpace(format!("{c} not in {space}")))?;
            a.comps[i] = e.clone();
        }
        Ok(a)
    }

    /// `df`.
    pub fn differential(space: Space, f: &Expr) -> Self {
        OneForm { space, comps: space.coords().into_iter().map(|c| f.diff(c)).collect() }
    }

    pub fn component(&self, i: usize) -> &Expr {
        &self.comps[i]
    }

    pub fn scale(&self, f: &Expr) -> Self {
        OneForm { space: self.space, comps: self.comps.iter().map(|c| f.mul(c)).collect() }
    }

    pub fn add(&self, other: &OneForm) -> Result<Self> {
        same_space(self.space, other.space)?;
        Ok(OneForm { space: self.space, comps: zip_with(&self.comps, &other.comps, Expr::add) })
    }

    pub fn sub(&self, other: &OneForm) -> Result<Self> {
        same_space(self.space, other.space)?;
        Ok(OneForm { space: self.space, comps: zip_with(&self.comps, &other.comps, Expr::sub) })
    }

    pub fn neg(&self) -> Self {
        OneForm { space: self.space, comps: self.comps.iter().map(Expr::neg).collect() }
    }

    /// Pull-back along a coordinate-preserving projection onto `self.space`
    /// (e.g. `π*` from `BaseE` to `PhaseJ`, `ρ*` from `PhaseJ` to `ExtendedT`).
    pub fn pullback_to(&self, to: Space) -> Self {
        OneForm { space: to, comps: reindex(self.space, to, &self.comps) }
    }

    /// Canonical representative of the class modulo `dt`.
    pub fn drop_dt(&self) -> Self {
        let mut a = self.clone();
        a.comps[0] = Expr::zero();
        a
    }

    /// No `dp` components (the `p`-directions of `PhaseJ`/`ExtendedT`).
    pub fn is_semi_basic(&self) -> bool {
        self.space
            .coords()
            .iter()
            .zip(&self.comps)
            .all(|(c, e)| matches!(c, Coord::T | Coord::Q(_)) || e.is_zero())
    }
}

/// Type (1,1) tensor; `entry(a, b)` is the coefficient of `∂_a ⊗ dx^b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor11 {
    space: Space,
    m: Vec<Expr>,
}

impl_components!(Tensor11, m);

impl Tensor11 {
    pub fn new(space: Space, m: Vec<Expr>) -> Result<Self> {
        check_len(space, m.len(), space.dim() * space.dim())?;
        Ok(Tensor11 { space, m })
    }

    pub fn from_fn(space: Space, mut f: impl FnMut(usize, usize) -> Expr) -> Self {
        let d = space.dim();
        let m = (0..d * d).map(|k| f(k / d, k % d)).collect();
        Tensor11 { space, m }
    }

    pub fn zero(space: Space) -> Self {
        Tensor11::from_fn(space, |_, _| Expr::zero())
    }

    pub fn identity(space: Space) -> Self {
        Tensor11::from_fn(space, |a, b| if a == b { Expr::one() } else { Expr::zero() })
    }

    /// Entries given as `((vector coord, form coord), expression)`.
    pub fn from_pairs(space: Space, pairs: &[((Coord, Coord), Expr)]) -> Result<Self> {
        let mut r = Tensor11::zero(space);
        let d = space.dim();
        for ((a, b), e) in pairs {
            let i = space.index_of(*a).ok_or_else(|| Error::WrongSpace(format!("{a} not in {space}")))?;
            let j = space.index_of(*b).ok_or_else(|| Error::WrongSpace(format!("{b} not in {space}")))?;
            r.m[i * d + j] = e.clone();
        }
        Ok(r)
    }

    /// `X ⊗ β`.
    pub fn tensor(x: &VectorField, beta: &OneForm) -> Result<Self> {
        same_space(x.space, beta.space)?;
        Ok(Tensor11::from_fn(x.space, |a, b| x.comps[a].mul(&beta.comps[b])))
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn entry(&self, a: usize, b: usize) -> &Expr {
        &self.m[a * self.dim() + b]
    }

    /// `R(X)`.
    pub fn apply(&self, x: &VectorField) -> Result<VectorField> {
        same_space(self.space, x.space)?;
        let d = self.dim();
        let comps = (0..d).map(|a| dot(&self.m[a * d..(a + 1) * d], &x.comps)).collect();
        Ok(VectorField { space: self.space, comps })
    }

    /// Adjoint action `R(α)`, defined by `⟨X, R(α)⟩ = ⟨R(X), α⟩`.
    pub fn adjoint(&self, alpha: &OneForm) -> Result<OneForm> {
        same_space(self.space, alpha.space)?;
        let d = self.dim();
        let comps = (0..d)
            .map(|b| Expr::sum((0..d).map(|a| alpha.comps[a].mul(self.entry(a, b)))))
            .collect();
        Ok(OneForm { space: self.space, comps })
    }

    /// Composition as maps on vectors: `(self ∘ other)(X) = self(other(X))`.
    pub fn compose(&self, other: &Tensor11) -> Result<Tensor11> {
        same_space(self.space, other.space)?;
        let d = self.dim();
        Ok(Tensor11::from_fn(self.space, |a, b| {
            Expr::sum((0..d).map(|c| self.entry(a, c).mul(other.entry(c, b))))
        }))
    }

    pub fn square(&self) -> Tensor11 {
        self.compose(self).expect("same space")
    }

    pub fn scale(&self, f: &Expr) -> Self {
        Tensor11 { space: self.space, m: self.m.iter().map(|c| f.mul(c)).collect() }
    }

    pub fn add(&self, other: &Tensor11) -> Result<Self> {
        same_space(self.space, other.space)?;
        Ok(Tensor11 { space: self.space, m: zip_with(&self.m, &other.m, Expr::add) })
    }

    pub fn sub(&self, other: &Tensor11) -> Result<Self> {
        same_space(self.space, other.space)?;
        Ok(Tensor11 { space: self.space, m: zip_with(&self.m, &other.m, Expr::sub) })
    }

    /// `R - λ·Id` for a scalar expression `λ`.
    pub fn shift(&self, lambda: &Expr) -> Self {
        Tensor11::from_fn(self.space, |a, b| {
            if a == b {
                self.entry(a, b).sub(lambda)
            } else {
                self.entry(a, b).clone()
            }
        })
    }

    /// `R(dt) = 0`: the row along `∂/∂t` vanishes identically. Decided
    /// structurally after constant folding.
    pub fn annihilates_dt(&self) -> bool {
        (0..self.dim()).all(|b| self.entry(0, b).is_zero())
    }

    pub(crate) fn require_annihilates_dt(&self) -> Result<()> {
        if self.annihilates_dt() {
            Ok(())
        } else {
            Err(Error::DtNotAnnihilated)
        }
    }
}

/// Covariant 2-tensor stored as a full matrix, `ω = ½ ω_ab dx^a ∧ dx^b` with
/// `ω(X, Y) = ω_ab X^a Y^b`. Genuine 2-forms are antisymmetric; the
/// `R ⌟₂ ω` construction produces a general bilinear form in the same
/// container.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoForm {
    space: Space,
    m: Vec<Expr>,
}

impl_components!(TwoForm, m);

impl TwoForm {
    pub fn new(space: Space, m: Vec<Expr>) -> Result<Self> {
        check_len(space, m.len(), space.dim() * space.dim())?;
        Ok(TwoForm { space, m })
    }

    pub fn from_fn(space: Space, mut f: impl FnMut(usize, usize) -> Expr) -> Self {
        let d = space.dim();
        TwoForm { space, m: (0..d * d).map(|k| f(k / d, k % d)).collect() }
    }

    pub fn zero(space: Space) -> Self {
        TwoForm::from_fn(space, |_, _| Expr::zero())
    }

    /// Antisymmetric form from its upper entries: each `((a, b), ω_ab)`
    /// also sets `ω_ba = -ω_ab`.
    pub fn from_pairs(space: Space, pairs: &[((Coord, Coord), Expr)]) -> Result<Self> {
        let mut w = TwoForm::zero(space);
        let d = space.dim();
        for ((a, b), e) in pairs {
            let i = space.index_of(*a).ok_or_else(|| Error::WrongSpace(format!("{a} not in {space}")))?;
            let j = space.index_of(*b).ok_or_else(|| Error::WrongSpace(format!("{b} not in {space}")))?;
            if i == j {
                return Err(Error::WrongSpace(format!("diagonal entry ({a},{b}) of a 2-form")));
            }
            w.m[i * d + j] = e.clone();
            w.m[j * d + i] = e.neg();
        }
        Ok(w)
    }

    /// `α ∧ β`.
    pub fn wedge(alpha: &OneForm, beta: &OneForm) -> Result<Self> {
        same_space(alpha.space, beta.space)?;
        Ok(TwoForm::from_fn(alpha.space, |a, b| {
            alpha.comps[a].mul(&beta.comps[b]).sub(&alpha.comps[b].mul(&beta.comps[a]))
        }))
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn entry(&self, a: usize, b: usize) -> &Expr {
        &self.m[a * self.dim() + b]
    }

    /// `ω(X, Y)`.
    pub fn on(&self, x: &VectorField, y: &VectorField) -> Result<Expr> {
        same_space(self.space, x.space)?;
        same_space(self.space, y.space)?;
        let d = self.dim();
        Ok(Expr::sum((0..d).flat_map(|a| {
            (0..d).map(move |b| (a, b))
        }).map(|(a, b)| x.comps[a].mul(self.entry(a, b)).mul(&y.comps[b]))))
    }

    /// `i_X ω = ω(X, ·)`.
    pub fn interior(&self, x: &VectorField) -> Result<OneForm> {
        same_space(self.space, x.space)?;
        let d = self.dim();
        let comps = (0..d)
            .map(|b| Expr::sum((0..d).map(|a| x.comps[a].mul(self.entry(a, b)))))
            .collect();
        Ok(OneForm { space: self.space, comps })
    }

    pub fn scale(&self, f: &Expr) -> Self {
        TwoForm { space: self.space, m: self.m.iter().map(|c| f.mul(c)).collect() }
    }

    pub fn add(&self, other: &TwoForm) -> Result<Self> {
        same_space(self.space, other.space)?;
        Ok(TwoForm { space: self.space, m: zip_with(&self.m, &other.m, Expr::add) })
    }

    pub fn sub(&self, other: &TwoForm) -> Result<Self> {
        same_space(self.space, other.space)?;
        Ok(TwoForm { space: self.space, m: zip_with(&self.m, &other.m, Expr::sub) })
    }

    pub fn neg(&self) -> Self {
        TwoForm { space: self.space, m: self.m.iter().map(Expr::neg).collect() }
    }

    /// `ω_ab + ω_ba` for `a < b` and `ω_aa`; all vanish pointwise exactly
    /// when the form is antisymmetric.
    pub fn antisymmetry_defect(&self) -> Vec<Expr> {
        let d = self.dim();
        let mut out = Vec::new();
        for a in 0..d {
            out.push(self.entry(a, a).clone());
            for b in a + 1..d {
                out.push(self.entry(a, b).add(self.entry(b, a)));
            }
        }
        out
    }

    pub fn pullback_to(&self, to: Space) -> Self {
        let coords = to.coords();
        TwoForm::from_fn(to, |a, b| match (self.space.index_of(coords[a]), self.space.index_of(coords[b])) {
            (Some(i), Some(j)) => self.entry(i, j).clone(),
            _ => Expr::zero(),
        })
    }
}

/// Contravariant 2-tensor, `entry(a, b) = Λ^{ab}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Bivector {
    space: Space,
    m: Vec<Expr>,
}

impl_components!(Bivector, m);

impl Bivector {
    pub fn new(space: Space, m: Vec<Expr>) -> Result<Self> {
        check_len(space, m.len(), space.dim() * space.dim())?;
        Ok(Bivector { space, m })
    }

    pub fn from_fn(space: Space, mut f: impl FnMut(usize, usize) -> Expr) -> Self {
        let d = space.dim();
        Bivector { space, m: (0..d * d).map(|k| f(k / d, k % d)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn entry(&self, a: usize, b: usize) -> &Expr {
        &self.m[a * self.dim() + b]
    }

    /// `Λ(σ, β) = Λ^{ab} σ_a β_b`.
    pub fn on(&self, sigma: &OneForm, beta: &OneForm) -> Result<Expr> {
        same_space(self.space, sigma.space)?;
        same_space(self.space, beta.space)?;
        let d = self.dim();
        Ok(Expr::sum(
            (0..d * d).map(|k| sigma.comps[k / d].mul(&self.m[k]).mul(&beta.comps[k % d])),
        ))
    }

    pub fn antisymmetry_defect(&self) -> Vec<Expr> {
        let d = self.dim();
        let mut out = Vec::new();
        for a in 0..d {
            out.push(self.entry(a, a).clone());
            for b in a + 1..d {
                out.push(self.entry(a, b).add(self.entry(b, a)));
            }
        }
        out
    }
}

/// Type (1,2) tensor antisymmetric in its covariant slots,
/// `entry(a, b, c)` is the coefficient of `∂_a ⊗ dx^b ⊗ dx^c`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor12 {
    space: Space,
    c: Vec<Expr>,
}

impl_components!(Tensor12, c);

impl Tensor12 {
    pub fn new(space: Space, c: Vec<Expr>) -> Result<Self> {
        let d = space.dim();
        check_len(space, c.len(), d * d * d)?;
        Ok(Tensor12 { space, c })
    }

    pub fn from_fn(space: Space, mut f: impl FnMut(usize, usize, usize) -> Expr) -> Self {
        let d = space.dim();
        Tensor12 { space, c: (0..d * d * d).map(|k| f(k / (d * d), (k / d) % d, k % d)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn entry(&self, a: usize, b: usize, c: usize) -> &Expr {
        let d = self.dim();
        &self.c[a * d * d + b * d + c]
    }

    /// `N(X, Y)`.
    pub fn on(&self, x: &VectorField, y: &VectorField) -> Result<VectorField> {
        same_space(self.space, x.space)?;
        same_space(self.space, y.space)?;
        let d = self.dim();
        let comps = (0..d)
            .map(|a| {
                Expr::sum((0..d).flat_map(|b| (0..d).map(move |c| (b, c))).map(|(b, c)| {
                    self.entry(a, b, c).mul(&x.comps[b]).mul(&y.comps[c])
                }))
            })
            .collect();
        Ok(VectorField { space: self.space, comps })
    }

    /// `i_X N`, the (1,1) tensor `Y ↦ N(X, Y)`.
    pub fn interior(&self, x: &VectorField) -> Result<Tensor11> {
        same_space(self.space, x.space)?;
        let d = self.dim();
        Ok(Tensor11::from_fn(self.space, |a, c| {
            Expr::sum((0..d).map(|b| x.comps[b].mul(self.entry(a, b, c))))
        }))
    }

    pub fn is_structurally_zero(&self) -> bool {
        self.c.iter().all(Expr::is_zero)
    }
}

pub(crate) fn dot(a: &[Expr], b: &[Expr]) -> Expr {
    Expr::sum(a.iter().zip(b).map(|(x, y)| x.mul(y)))
}

fn zip_with(a: &[Expr], b: &[Expr], f: impl Fn(&Expr, &Expr) -> Expr) -> Vec<Expr> {
    a.iter().zip(b).map(|(x, y)| f(x, y)).collect()
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn e(s: &str, space: Space) -> Expr {
        parse_expr(s, &space).unwrap()
    }

    /// `R = q ∂_q ⊗ dq + t ∂_q ⊗ dt` on `BaseE(1)`.
    fn r_example() -> Tensor11 {
        let s = Space::base(1);
        Tensor11::from_pairs(s, &[((Coord::Q(1), Coord::Q(1)), e("q1", s)), ((Coord::Q(1), Coord::T), e("t", s))])
            .unwrap()
    }

    #[test]
    fn contraction_examples() {
        let s = Space::base(1);
        let r = r_example();
        let rt = r.apply(&VectorField::coordinate(s, 0)).unwrap();
        assert!(rt.component(0).is_zero());
        assert_eq!(*rt.component(1), Expr::var(Coord::T));
        let rdt = r.adjoint(&OneForm::coordinate(s, 0)).unwrap();
        assert!(rdt.components().iter().all(Expr::is_zero));
        assert!(r.annihilates_dt());
        let one = VectorField::coordinate(s, 1).pair(&OneForm::coordinate(s, 1)).unwrap();
        assert!(one.is_one());
    }

    #[test]
    fn pairing_adjoint_consistency() {
        let s = Space::base(1);
        let r = r_example();
        let x = VectorField::new(s, vec![e("1", s), e("t*q1", s)]).unwrap();
        let a = OneForm::new(s, vec![e("sin(q1)", s), e("t^2", s)]).unwrap();
        let lhs = r.apply(&x).unwrap().pair(&a).unwrap();
        let rhs = x.pair(&r.adjoint(&a).unwrap()).unwrap();
        for pt in [[0.3, -1.2], [1.5, 0.7]] {
            assert!((lhs.eval(&s, &pt).unwrap() - rhs.eval(&s, &pt).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn space_mismatch_is_an_error() {
        let r = r_example();
        let x = VectorField::zero(Space::phase(1));
        assert!(matches!(r.apply(&x), Err(Error::SpaceMismatch { .. })));
        assert!(VectorField::new(Space::base(1), vec![Expr::zero()]).is_err());
    }

    #[test]
    fn interior_of_wedge() {
        let s = Space::base(1);
        let w = TwoForm::wedge(&OneForm::coordinate(s, 1), &OneForm::coordinate(s, 0)).unwrap();
        let i = w.interior(&VectorField::coordinate(s, 1)).unwrap();
        assert!(i.component(0).is_one());
        assert!(i.component(1).is_zero());
    }

    #[test]
    fn pullback_reindexes_by_name() {
        let a = OneForm::new(Space::base(1), vec![e("q1", Space::base(1)), e("t", Space::base(1))]).unwrap();
        let b = a.pullback_to(Space::phase(1));
        assert_eq!(b.components().len(), 3);
        assert!(b.component(2).is_zero());
        let c = b.pullback_to(Space::extended(1));
        assert_eq!(c.components().len(), 4);
        assert_eq!(*c.component(1), Expr::var(Coord::T));
        assert!(c.component(2).is_zero());
    }
}
