//! Lifts of objects on `BaseE(n)` to `PhaseJ(n)` (and one to `ExtendedT(n)`),
//! computed from their closed coordinate forms.

use crate::error::{Error, Result};
use crate::expr::{EvalCtx, Expr};
use crate::field::ScalarField;
use crate::geometry::{Components, OneForm, Tensor11, TwoForm, VectorField};
use crate::space::{Coord, Space, SpaceKind};

fn require_base(s: Space) -> Result<()> {
    if s.kind == SpaceKind::BaseE {
        Ok(())
    } else {
        Err(Error::WrongSpace(format!("expected an object on BaseE, got one on {s}")))
    }
}

fn p(i: usize) -> Expr {
    Expr::var(Coord::P(i as u16))
}

fn q(i: usize) -> Coord {
    Coord::Q(i as u16)
}

/// `F_X = p_i X^i` for vertical `X`.
pub fn momentum_function(x: &VectorField) -> Result<ScalarField> {
    require_base(x.space())?;
    if !x.is_vertical() {
        return Err(Error::NotVertical);
    }
    let n = x.space().n;
    ScalarField::new(Space::phase(n), Expr::sum((1..=n).map(|i| p(i).mul(x.component(i)))))
}

/// `ᵛα = α_i ∂/∂p_i`; the `dt` component is dropped.
pub fn vlift_oneform(alpha: &OneForm) -> Result<VectorField> {
    require_base(alpha.space())?;
    let n = alpha.space().n;
    let s = Space::phase(n);
    let pairs: Vec<_> = (1..=n).map(|i| (Coord::P(i as u16), alpha.component(i).clone())).collect();
    VectorField::from_pairs(s, &pairs)
}

/// `X̃ = X^0 ∂_t + X^i ∂_{q^i} - p_j ∂X^j/∂q^i ∂_{p_i}` for `X` vertical or
/// with `⟨X, dt⟩ = 1`.
pub fn complete_lift_vector(x: &VectorField) -> Result<VectorField> {
    require_base(x.space())?;
    if !x.is_vertical() && !x.is_time_normalized() {
        return Err(Error::NotVerticalOrTimeNormalized);
    }
    let n = x.space().n;
    let s = Space::phase(n);
    let mut comps: Vec<Expr> = x.components().to_vec();
    for i in 1..=n {
        comps.push(Expr::sum((1..=n).map(|j| p(j).mul(&x.component(j).diff(q(i))))).neg());
    }
    VectorField::new(s, comps)
}

/// `ᵛR = p_i R^i_j ∂/∂p_j`.
pub fn vlift_tensor11(r: &Tensor11) -> Result<VectorField> {
    require_base(r.space())?;
    r.require_annihilates_dt()?;
    let n = r.space().n;
    let pairs: Vec<_> = (1..=n)
        .map(|j| (Coord::P(j as u16), Expr::sum((1..=n).map(|i| p(i).mul(r.entry(i, j))))))
        .collect();
    VectorField::from_pairs(Space::phase(n), &pairs)
}

/// `ʰR = p_i R^i_j dq^j + p_i R^i_0 dt`.
pub fn hlift_tensor11(r: &Tensor11) -> Result<OneForm> {
    require_base(r.space())?;
    r.require_annihilates_dt()?;
    let n = r.space().n;
    let s = Space::phase(n);
    let comps = (0..=n)
        .map(|j| Expr::sum((1..=n).map(|i| p(i).mul(r.entry(i, j)))))
        .chain((0..n).map(|_| Expr::zero()))
        .collect();
    OneForm::new(s, comps)
}

/// Entries shared by the lifts to `PhaseJ` and to `ExtendedT`, as indices
/// into `target`.
fn complete_lift_entries(r: &Tensor11, target: Space) -> Vec<((usize, usize), Expr)> {
    let n = r.space().n;
    let (ti, qi, pi) = (0, |i: usize| target.q(i), |i: usize| target.p(i));
    let mut out = Vec::new();
    for i in 1..=n {
        out.push(((qi(i), ti), r.entry(i, 0).clone()));
        for j in 1..=n {
            out.push(((qi(i), qi(j)), r.entry(i, j).clone()));
            out.push(((pi(j), pi(i)), r.entry(i, j).clone()));
        }
    }
    for j in 1..=n {
        for k in 1..=n {
            if j != k {
                let c = Expr::sum((1..=n).map(|i| p(i).mul(&r.entry(i, j).diff(q(k)).sub(&r.entry(i, k).diff(q(j))))));
                out.push(((pi(j), qi(k)), c));
            }
        }
    }
    for k in 1..=n {
        let c = Expr::sum((1..=n).map(|i| p(i).mul(&r.entry(i, k).diff(Coord::T).sub(&r.entry(i, 0).diff(q(k))))));
        out.push(((pi(k), ti), c));
    }
    out
}

fn assemble(space: Space, entries: Vec<((usize, usize), Expr)>) -> Tensor11 {
    let d = space.dim();
    let mut m = vec![Expr::zero(); d * d];
    for ((a, b), e) in entries {
        m[a * d + b] = m[a * d + b].add(&e);
    }
    Tensor11::new(space, m).expect("dimensions match")
}

/// Complete lift `R̃` on `PhaseJ`.
pub fn complete_lift_tensor11(r: &Tensor11) -> Result<Tensor11> {
    require_base(r.space())?;
    r.require_annihilates_dt()?;
    let s = Space::phase(r.space().n);
    Ok(assemble(s, complete_lift_entries(r, s)))
}

/// Complete lift `R̃_{T*}` on `ExtendedT`.
pub fn complete_lift_cotangent(r: &Tensor11) -> Result<Tensor11> {
    require_base(r.space())?;
    r.require_annihilates_dt()?;
    let n = r.space().n;
    let s = Space::extended(n);
    let mut entries = complete_lift_entries(r, s);
    let p0 = s.p0();
    for i in 1..=n {
        entries.push(((p0, s.p(i)), r.entry(i, 0).clone()));
    }
    for k in 1..=n {
        let c = Expr::sum((1..=n).map(|i| p(i).mul(&r.entry(i, 0).diff(q(k)).sub(&r.entry(i, k).diff(Coord::T)))));
        entries.push(((p0, s.q(k)), c));
    }
    Ok(assemble(s, entries))
}

/// Component defects of `U(ρ*σ) - ρ*(V(σ))` for `σ` running over the
/// coordinate co-basis of `PhaseJ`.
pub fn rho_relation_defect(u: &Tensor11, v: &Tensor11) -> Result<Vec<Expr>> {
    let (su, sv) = (u.space(), v.space());
    if su.kind != SpaceKind::ExtendedT || sv.kind != SpaceKind::PhaseJ || su.n != sv.n {
        return Err(Error::WrongSpace(format!("ρ-relation needs ExtendedT and PhaseJ of equal n, got {su} and {sv}")));
    }
    let mut out = Vec::new();
    for k in 0..sv.dim() {
        let sigma = OneForm::coordinate(sv, k);
        let lhs = u.adjoint(&sigma.pullback_to(su))?;
        let rhs = v.adjoint(&sigma)?.pullback_to(su);
        out.extend(lhs.sub(&rhs)?.components().iter().cloned());
    }
    Ok(out)
}

/// Whether `U` on `ExtendedT` and `V` on `PhaseJ` are ρ-related at the given
/// points of `ExtendedT`.
pub fn rho_related(u: &Tensor11, v: &Tensor11, points: &[Vec<f64>], tol: f64) -> Result<bool> {
    let defect = rho_relation_defect(u, v)?;
    for pt in points {
        let vals = EvalCtx::new(u.space(), pt)?.eval_all(&defect)?;
        if vals.iter().any(|x| x.abs() > tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `ᵛω = ω_ij ∂_{p_j} ⊗ dq^i + ω_0j ∂_{p_j} ⊗ dt`. Applied verbatim to a
/// non-antisymmetric bilinear form it gives the same coordinate expression.
pub fn vlift_twoform(omega: &TwoForm) -> Result<Tensor11> {
    require_base(omega.space())?;
    let n = omega.space().n;
    let s = Space::phase(n);
    let mut entries = Vec::new();
    for j in 1..=n {
        entries.push(((s.p(j), 0), omega.entry(0, j).clone()));
        for i in 1..=n {
            entries.push(((s.p(j), s.q(i)), omega.entry(i, j).clone()));
        }
    }
    Ok(assemble(s, entries))
}

/// `Θ = p_i dq^i ∧ dt` on `PhaseJ(n)` and the representative `p_i dq^i` of
/// the canonical class of one-forms.
#[derive(Clone, Debug)]
pub struct CanonicalTheta {
    pub form: TwoForm,
    pub representative: OneForm,
}

impl CanonicalTheta {
    pub fn new(n: usize) -> Self {
        let s = Space::phase(n);
        let pairs: Vec<_> = (1..=n).map(|i| (q(i), p(i))).collect();
        let representative = OneForm::from_pairs(s, &pairs).expect("coordinates of PhaseJ");
        let form = TwoForm::wedge(&representative, &OneForm::coordinate(s, 0)).expect("same space");
        CanonicalTheta { form, representative }
    }
}

/// Pull-back of a 2-form on `PhaseJ` along the section `(t, q) ↦ (t, q, α_i)`
/// defined by a one-form `α` on `BaseE`.
pub fn section_pullback(omega: &TwoForm, alpha: &OneForm) -> Result<TwoForm> {
    require_base(alpha.space())?;
    let base = alpha.space();
    let n = base.n;
    if omega.space() != Space::phase(n) {
        return Err(Error::SpaceMismatch { expected: Space::phase(n), got: omega.space() });
    }
    let subst = (1..=n).map(|i| (Coord::P(i as u16), alpha.component(i).clone())).collect();
    let section: Vec<Expr> = base.coords().into_iter().map(Expr::var).chain((1..=n).map(|i| alpha.component(i).clone())).collect();
    let coords = base.coords();
    // ∂σ^c/∂x^a, indexed [c][a]
    let ds: Vec<Vec<Expr>> = section.iter().map(|s| coords.iter().map(|&c| s.diff(c)).collect()).collect();
    let w: Vec<Expr> = omega.components().iter().map(|e| e.substitute(&subst)).collect();
    let d = omega.dim();
    Ok(TwoForm::from_fn(base, |a, b| {
        Expr::sum((0..d * d).map(|k| ds[k / d][a].mul(&w[k]).mul(&ds[k % d][b])))
    }))
}
