use serde::Serialize;

use crate::check::{max_abs, CheckOptions, SYMBOLIC_TOL, PROCEDURAL_TOL};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::field::ScalarField;
use crate::geometry::{
    nijenhuis_torsion, Bivector, Components, LieDerivative, OneForm, Tensor11, VectorField,
};
use crate::lifts::complete_lift_tensor11;
use crate::space::{Coord, Space, SpaceKind};

/// The canonical bivector `Λ = ∂_{q^i} ∧ ∂_{p_i}` on `PhaseJ(n)` and its
/// Poisson map `P`, defined by `Λ(σ, β) = ⟨P(σ), β⟩`.
#[derive(Clone, Debug)]
pub struct PoissonMap {
    lambda: Bivector,
}

impl PoissonMap {
    pub fn canonical(n: usize) -> Self {
        let s = Space::phase(n);
        let lambda = Bivector::from_fn(s, |a, b| {
            match (s.coord(a), s.coord(b)) {
                (Coord::Q(i), Coord::P(j)) if i == j => Expr::one(),
                (Coord::P(i), Coord::Q(j)) if i == j => Expr::constant(-1.0),
                _ => Expr::zero(),
            }
        });
        PoissonMap { lambda }
    }

    pub fn bivector(&self) -> &Bivector {
        &self.lambda
    }

    pub fn space(&self) -> Space {
        self.lambda.space()
    }

    /// `P(σ)^b = σ_a Λ^{ab}`.
    pub fn apply(&self, sigma: &OneForm) -> Result<VectorField> {
        let s = self.space();
        if sigma.space() != s {
            return Err(Error::SpaceMismatch { expected: s, got: sigma.space() });
        }
        let d = s.dim();
        let comps = (0..d)
            .map(|b| Expr::sum((0..d).map(|a| sigma.component(a).mul(self.lambda.entry(a, b)))))
            .collect();
        VectorField::new(s, comps)
    }

    /// Entries of `P∘R̃ - R̃∘P` as maps from one-forms to vectors, indexed
    /// `[σ-slot][vector-slot]`.
    pub fn commutator_defect(&self, rt: &Tensor11) -> Result<Vec<Expr>> {
        let s = self.space();
        if rt.space() != s {
            return Err(Error::SpaceMismatch { expected: s, got: rt.space() });
        }
        let d = s.dim();
        let l = &self.lambda;
        Ok((0..d * d)
            .map(|k| {
                let (c, b) = (k / d, k % d);
                let pr = Expr::sum((0..d).map(|a| rt.entry(c, a).mul(l.entry(a, b))));
                let rp = Expr::sum((0..d).map(|a| l.entry(c, a).mul(rt.entry(b, a))));
                pr.sub(&rp)
            })
            .collect())
    }
}

fn require_phase(s: Space) -> Result<()> {
    if s.kind == SpaceKind::PhaseJ {
        Ok(())
    } else {
        Err(Error::WrongSpace(format!("expected an object on PhaseJ, got one on {s}")))
    }
}

pub fn poisson_apply(sigma: &OneForm) -> Result<VectorField> {
    require_phase(sigma.space())?;
    PoissonMap::canonical(sigma.space().n).apply(sigma)
}

/// `{F, G} = ∂F/∂q^i ∂G/∂p_i - ∂F/∂p_i ∂G/∂q^i`.
pub fn poisson_bracket(f: &ScalarField, g: &ScalarField) -> Result<ScalarField> {
    require_phase(f.space())?;
    if f.space() != g.space() {
        return Err(Error::SpaceMismatch { expected: f.space(), got: g.space() });
    }
    let s = f.space();
    let terms = (1..=s.n).map(|i| {
        let (q, p) = (s.coord(s.q(i)), s.coord(s.p(i)));
        f.expr().diff(q).mul(&g.expr().diff(p)).sub(&f.expr().diff(p).mul(&g.expr().diff(q)))
    });
    ScalarField::new(s, Expr::sum(terms))
}

/// `X_F = -P(dF) = ∂F/∂p_i ∂_{q^i} - ∂F/∂q^i ∂_{p_i}`, with no `∂_t` part.
pub fn fibre_hamiltonian_field(f: &ScalarField) -> Result<VectorField> {
    Ok(poisson_apply(&OneForm::differential(f.space(), f.expr()))?.neg())
}

/// `X_h = ∂_t + X_H`.
pub fn hamiltonian_vector_field(h: &ScalarField) -> Result<VectorField> {
    fibre_hamiltonian_field(h)?.add(&VectorField::coordinate(h.space(), 0))
}

/// `μ(σ, Z) = (L_{P(σ)} R̃)(Z) - P(L_Z(R̃(σ))) + P(L_{R̃(Z)} σ)`.
pub fn magri_morosi_unchecked(rt: &Tensor11, sigma: &OneForm, z: &VectorField) -> Result<VectorField> {
    let pm = PoissonMap::canonical(rt.space().n);
    let first = rt.lie_derivative(&pm.apply(sigma)?)?.apply(z)?;
    let second = pm.apply(&rt.adjoint(sigma)?.lie_derivative(z)?)?;
    let third = pm.apply(&sigma.lie_derivative(&rt.apply(z)?)?)?;
    first.sub(&second)?.add(&third)
}

/// Magri-Morosi concomitant, after confirming `P R̃ = R̃ P` at seeded points.
pub fn magri_morosi(rt: &Tensor11, sigma: &OneForm, z: &VectorField) -> Result<VectorField> {
    require_phase(rt.space())?;
    let defect = PoissonMap::canonical(rt.space().n).commutator_defect(rt)?;
    let opts = CheckOptions { points: 8, ..CheckOptions::default() };
    let (res, _) = max_abs(rt.space(), &defect, &opts)?;
    let tol = if rt.is_procedural() { PROCEDURAL_TOL } else { SYMBOLIC_TOL };
    if res >= tol {
        return Err(Error::CommutationFailure(res));
    }
    magri_morosi_unchecked(rt, sigma, z)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    PnStructure,
    NotPn,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PNReport {
    pub commutation: f64,
    pub magri_morosi: f64,
    pub torsion: f64,
    pub lifted_torsion: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

/// Evaluates the Poisson-Nijenhuis conditions for the complete lift of `R`.
/// `μ` is evaluated on the coordinate bases, which are made of lifted
/// objects: `dt, dq^i` are pull-backs, `dp_i = dF_{∂_{q^i}}`, and
/// `∂_t, ∂_{q^i}, ∂_{p_i}` are complete and vertical lifts.
pub fn pn_check(r: &Tensor11, opts: &CheckOptions) -> Result<PNReport> {
    let rt = complete_lift_tensor11(r)?;
    let n = r.space().n;
    let s = Space::phase(n);
    let pm = PoissonMap::canonical(n);
    let tol = opts.tol.unwrap_or(if r.is_procedural() { PROCEDURAL_TOL } else { SYMBOLIC_TOL });

    let (commutation, _) = max_abs(s, &pm.commutator_defect(&rt)?, opts)?;
    let mut mu = Vec::new();
    for a in 0..s.dim() {
        let sigma = OneForm::coordinate(s, a);
        for b in 0..s.dim() {
            let z = VectorField::coordinate(s, b);
            mu.extend(magri_morosi_unchecked(&rt, &sigma, &z)?.components().iter().cloned());
        }
    }
    let (magri_morosi, _) = max_abs(s, &mu, opts)?;
    let (torsion, _) = max_abs(r.space(), nijenhuis_torsion(r).components(), opts)?;
    let (lifted_torsion, _) = max_abs(s, nijenhuis_torsion(&rt).components(), opts)?;
    let ok = [commutation, magri_morosi, torsion, lifted_torsion].iter().all(|v| *v < tol);
    Ok(PNReport {
        commutation,
        magri_morosi,
        torsion,
        lifted_torsion,
        tolerance: tol,
        verdict: if ok { Verdict::PnStructure } else { Verdict::NotPn },
    })
}
