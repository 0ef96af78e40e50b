//! Identity suites: the relations between lifted objects, evaluated over a
//! corpus of objects on `BaseE(n)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::check::{max_abs, run_check, CheckOptions, CheckPlan, CheckReport, Identity, SYMBOLIC_TOL};
use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr};
use crate::field::ScalarField;
use crate::geometry::{
    exterior_derivative, hook2, lie_bracket, nijenhuis_torsion, ChartMap, Components, FibredTransform,
    LieDerivative, OneForm, Tensor11, Transformable, TwoForm, VectorField,
};
use crate::lifts::{
    complete_lift_cotangent, complete_lift_tensor11, complete_lift_vector, hlift_tensor11, momentum_function,
    rho_relation_defect, section_pullback, vlift_oneform, vlift_tensor11, vlift_twoform, CanonicalTheta,
};
use crate::pn::{magri_morosi_unchecked, pn_check, PNReport, PoissonMap};
use crate::space::{Coord, Space};

pub type Named<T> = (String, T);

/// Objects on `BaseE(n)` the suites draw from. Tensors must annihilate
/// `dt`; `timelike` fields have `dt`-component 1.
#[derive(Clone, Debug, Default)]
pub struct Corpus {
    pub n: usize,
    pub tensors: Vec<Named<Tensor11>>,
    pub forms: Vec<Named<OneForm>>,
    pub two_forms: Vec<Named<TwoForm>>,
    pub verticals: Vec<Named<VectorField>>,
    pub timelike: Vec<Named<VectorField>>,
    pub functions: Vec<Named<ScalarField>>,
    pub transforms: Vec<Named<FibredTransform>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Lemma1,
    Brackets,
    Theta,
    Theorem1,
    Prop2,
    Prop3,
    Prop4,
    Prop5,
    Prop6,
    Prop7,
    Theorem2,
    Theorem3,
    Lemma2,
    Naturality,
}

impl Suite {
    pub const ALL: [Suite; 14] = [
        Suite::Lemma1,
        Suite::Brackets,
        Suite::Theta,
        Suite::Theorem1,
        Suite::Prop2,
        Suite::Prop3,
        Suite::Prop4,
        Suite::Prop5,
        Suite::Prop6,
        Suite::Prop7,
        Suite::Theorem2,
        Suite::Theorem3,
        Suite::Lemma2,
        Suite::Naturality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::Brackets => "brackets",
            Suite::Theta => "theta",
            Suite::Theorem1 => "theorem1",
            Suite::Prop2 => "prop2",
            Suite::Prop3 => "prop3",
            Suite::Prop4 => "prop4",
            Suite::Prop5 => "prop5",
            Suite::Prop6 => "prop6",
            Suite::Prop7 => "prop7",
            Suite::Theorem2 => "theorem2",
            Suite::Theorem3 => "theorem3",
            Suite::Lemma2 => "lemma2",
            Suite::Naturality => "naturality",
        }
    }

    /// A suite name, or `all`.
    pub fn parse_list(name: &str) -> Option<Vec<Suite>> {
        if name == "all" {
            return Some(Suite::ALL.to_vec());
        }
        Suite::ALL.iter().find(|s| s.name() == name).map(|s| vec![*s])
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteRun {
    pub suites: Vec<String>,
    #[serde(flatten)]
    pub report: CheckReport,
    /// Poisson-Nijenhuis verdicts per tensor (theorem3 only).
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub verdicts: BTreeMap<String, PNReport>,
}

impl SuiteRun {
    pub fn all_pass(&self) -> bool {
        self.report.all_pass()
    }
}

struct Group {
    space: Space,
    identities: Vec<Identity>,
    map: Option<ChartMap>,
}

fn resid<T: Components>(a: &T, b: &T) -> Result<Vec<Expr>> {
    if a.space() != b.space() {
        return Err(Error::SpaceMismatch { expected: a.space(), got: b.space() });
    }
    Ok(a.components().iter().zip(b.components()).map(|(x, y)| x.sub(y)).collect())
}

fn comps<T: Components>(a: &T) -> Vec<Expr> {
    a.components().to_vec()
}

struct Builder<'a> {
    c: &'a Corpus,
    opts: &'a CheckOptions,
    base: Space,
    phase: Space,
    groups: Vec<Group>,
    verdicts: BTreeMap<String, PNReport>,
}

impl<'a> Builder<'a> {
    fn new(c: &'a Corpus, opts: &'a CheckOptions) -> Self {
        Builder {
            c,
            opts,
            base: Space::base(c.n),
            phase: Space::phase(c.n),
            groups: Vec::new(),
            verdicts: BTreeMap::new(),
        }
    }

    /// Appends residuals to the identity `id` on `space`, creating it on
    /// first use.
    fn add(&mut self, space: Space, id: &str, reference: &str, residuals: Vec<Expr>) {
        let group = match self.groups.iter_mut().position(|g| g.space == space && g.map.is_none()) {
            Some(k) => &mut self.groups[k],
            None => {
                self.groups.push(Group { space, identities: Vec::new(), map: None });
                self.groups.last_mut().unwrap()
            }
        };
        match group.identities.iter_mut().find(|i| i.id == id) {
            Some(ident) => ident.residuals.extend(residuals),
            None => group.identities.push(Identity::new(id, reference, residuals)),
        }
    }

    fn fields(&self) -> impl Iterator<Item = &'a Named<VectorField>> {
        self.c.verticals.iter().chain(self.c.timelike.iter())
    }

    fn dt(&self) -> OneForm {
        OneForm::coordinate(self.phase, 0)
    }

    fn pi(&self, alpha: &OneForm) -> OneForm {
        alpha.pullback_to(self.phase)
    }

    fn momentum(&self, x: &VectorField) -> Result<Expr> {
        Ok(momentum_function(x)?.into_expr())
    }

    fn d_momentum(&self, x: &VectorField) -> Result<OneForm> {
        Ok(OneForm::differential(self.phase, &self.momentum(x)?))
    }

    fn build(&mut self, suite: Suite) -> Result<()> {
        match suite {
            Suite::Lemma1 => self.lemma1(),
            Suite::Brackets => self.brackets(),
            Suite::Theta => self.theta(),
            Suite::Theorem1 => self.theorem1(),
            Suite::Prop2 => self.prop2(),
            Suite::Prop3 => self.prop3(),
            Suite::Prop4 => self.prop4(),
            Suite::Prop5 => self.prop5(),
            Suite::Prop6 => self.prop6(),
            Suite::Prop7 => self.prop7(),
            Suite::Theorem2 => self.theorem2(),
            Suite::Theorem3 => self.theorem3(),
            Suite::Lemma2 => self.lemma2(),
            Suite::Naturality => self.naturality(),
        }
    }

    fn lemma1(&mut self) -> Result<()> {
        let (base, phase) = (self.base, self.phase);
        for (_, f) in &self.c.functions {
            let f = f.expr();
            let df = OneForm::differential(base, f);
            for (_, a) in &self.c.forms {
                let r = resid(&vlift_oneform(&a.scale(f))?, &vlift_oneform(a)?.scale(f))?;
                self.add(phase, "lemma1.valpha", "ᵛ(fα) = f ᵛα", r);
            }
            for (_, rt) in &self.c.tensors {
                let r = resid(&vlift_tensor11(&rt.scale(f))?, &vlift_tensor11(rt)?.scale(f))?;
                self.add(phase, "lemma1.vR", "ᵛ(fR) = f ᵛR", r);
            }
            for (_, x) in &self.c.verticals {
                let rhs = complete_lift_vector(x)?.scale(f).sub(&vlift_oneform(&df)?.scale(&self.momentum(x)?))?;
                let r = resid(&complete_lift_vector(&x.scale(f))?, &rhs)?;
                self.add(phase, "lemma1.complete", "(fX)~ = f X̃ - F_X ᵛ(df)", r);
            }
            for (_, rt) in &self.c.tensors {
                for (_, x) in self.fields() {
                    let lhs = rt.lie_derivative(&x.scale(f))?;
                    let rhs = rt
                        .lie_derivative(x)?
                        .scale(f)
                        .sub(&Tensor11::tensor(x, &rt.adjoint(&df)?)?)?
                        .add(&Tensor11::tensor(&rt.apply(x)?, &df)?)?;
                    self.add(base, "lemma1.lie", "L_{fX}R = f L_X R - X⊗R(df) + R(X)⊗df", resid(&lhs, &rhs)?);
                }
            }
        }
        for (_, y) in &self.c.verticals {
            for (_, b) in &self.c.forms {
                let lhs = vlift_tensor11(&Tensor11::tensor(y, b)?)?;
                let rhs = vlift_oneform(b)?.scale(&self.momentum(y)?);
                self.add(phase, "lemma1.vtensor", "ᵛ(Y⊗β) = F_Y ᵛβ", resid(&lhs, &rhs)?);
            }
        }
        Ok(())
    }

    fn brackets(&mut self) -> Result<()> {
        let phase = self.phase;
        let fields: Vec<_> = self.fields().collect();
        for (_, a) in &self.c.forms {
            for (_, b) in &self.c.forms {
                let r = comps(&lie_bracket(&vlift_oneform(a)?, &vlift_oneform(b)?)?);
                self.add(phase, "brackets.vv", "[ᵛα, ᵛβ] = 0", r);
            }
            for (_, x) in &fields {
                let lhs = lie_bracket(&complete_lift_vector(x)?, &vlift_oneform(a)?)?;
                let r = resid(&lhs, &vlift_oneform(&a.lie_derivative(x)?)?)?;
                self.add(phase, "brackets.cv", "[X̃, ᵛα] = ᵛ(L_X α)", r);
            }
            for (_, rt) in &self.c.tensors {
                let lhs = lie_bracket(&vlift_oneform(a)?, &vlift_tensor11(rt)?)?;
                let r = resid(&lhs, &vlift_oneform(&rt.adjoint(a)?)?)?;
                self.add(phase, "brackets.vR_valpha", "[ᵛα, ᵛR] = ᵛ(R(α))", r);
            }
        }
        for (i, (_, x)) in fields.iter().enumerate() {
            for (_, y) in &fields[i + 1..] {
                let lhs = lie_bracket(&complete_lift_vector(x)?, &complete_lift_vector(y)?)?;
                let r = resid(&lhs, &complete_lift_vector(&lie_bracket(x, y)?)?)?;
                self.add(phase, "brackets.cc", "[X̃, Ỹ] = [X, Y]~", r);
            }
            for (_, rt) in &self.c.tensors {
                let lhs = lie_bracket(&complete_lift_vector(x)?, &vlift_tensor11(rt)?)?;
                let r = resid(&lhs, &vlift_tensor11(&rt.lie_derivative(x)?)?)?;
                self.add(phase, "brackets.cvR", "[X̃, ᵛR] = ᵛ(L_X R)", r);
            }
        }
        for (i, (_, r1)) in self.c.tensors.iter().enumerate() {
            for (_, r2) in &self.c.tensors[i + 1..] {
                let lhs = lie_bracket(&vlift_tensor11(r1)?, &vlift_tensor11(r2)?)?;
                let comm = r1.compose(r2)?.sub(&r2.compose(r1)?)?;
                let r = resid(&lhs, &vlift_tensor11(&comm)?)?;
                self.add(phase, "brackets.vR_vR", "[ᵛR₁, ᵛR₂] = ᵛ(R₁R₂ - R₂R₁)", r);
            }
        }
        Ok(())
    }

    fn theta(&mut self) -> Result<()> {
        let (base, phase) = (self.base, self.phase);
        let theta = CanonicalTheta::new(self.c.n).form;
        let dt = self.dt();
        for (_, x) in &self.c.verticals {
            let lhs = theta.interior(&complete_lift_vector(x)?)?;
            let r = resid(&lhs, &dt.scale(&self.momentum(x)?))?;
            self.add(phase, "theta.vertical", "i_{X̃}Θ = F_X dt (X vertical)", r);
        }
        for (_, x) in &self.c.timelike {
            let lhs = TwoForm::wedge(&theta.interior(&complete_lift_vector(x)?)?, &dt)?;
            let r = comps(&lhs.add(&theta)?);
            self.add(phase, "theta.timelike", "i_{X̃}Θ ∧ dt = -Θ (⟨X, dt⟩ = 1)", r);
        }
        for (_, x) in self.fields() {
            let r = comps(&theta.lie_derivative(&complete_lift_vector(x)?)?);
            self.add(phase, "theta.lie", "L_{X̃}Θ = 0", r);
        }
        let dtb = OneForm::coordinate(base, 0);
        for (_, a) in &self.c.forms {
            let r = resid(&section_pullback(&theta, a)?, &TwoForm::wedge(a, &dtb)?)?;
            self.add(base, "theta.section", "α*Θ = α ∧ dt", r);
        }
        Ok(())
    }

    fn theorem1(&mut self) -> Result<()> {
        let phase = self.phase;
        for (_, rt) in &self.c.tensors {
            let lift = complete_lift_tensor11(rt)?;
            let vr = vlift_tensor11(rt)?;
            for (_, a) in &self.c.forms {
                let r = resid(&lift.apply(&vlift_oneform(a)?)?, &vlift_oneform(&rt.adjoint(a)?)?)?;
                self.add(phase, "theorem1.valpha", "R̃(ᵛα) = ᵛ(R(α))", r);
                let r = resid(&lift.adjoint(&self.pi(a))?, &self.pi(&rt.adjoint(a)?))?;
                self.add(phase, "theorem1.adjoint_pullback", "R̃(π*α) = π*R(α)", r);
            }
            for (_, x) in self.fields() {
                let lhs = lift.apply(&complete_lift_vector(x)?)?;
                let rhs = complete_lift_vector(&rt.apply(x)?)?.add(&vlift_tensor11(&rt.lie_derivative(x)?)?)?;
                self.add(phase, "theorem1.complete", "R̃(X̃) = (R X)~ + ᵛ(L_X R)", resid(&lhs, &rhs)?);
            }
            for (_, x) in &self.c.verticals {
                let lhs = lift.adjoint(&self.d_momentum(x)?)?;
                let rhs = self.d_momentum(&rt.apply(x)?)?.sub(&hlift_tensor11(&rt.lie_derivative(x)?)?)?;
                self.add(phase, "theorem1.adjoint_momentum", "R̃(dF_X) = dF_{RX} - ʰ(L_X R)", resid(&lhs, &rhs)?);
                let r = vr.derivative_of(&self.momentum(x)?).sub(&self.momentum(&rt.apply(x)?)?);
                self.add(phase, "theorem1.vR_defining", "ᵛR(π*f) = 0, ᵛR(F_X) = F_{RX}", vec![r]);
            }
            for (_, f) in &self.c.functions {
                let r = vr.derivative_of(f.expr());
                self.add(phase, "theorem1.vR_defining", "ᵛR(π*f) = 0, ᵛR(F_X) = F_{RX}", vec![r]);
            }
        }
        for (_, a) in &self.c.forms {
            let va = vlift_oneform(a)?;
            for (_, f) in &self.c.functions {
                let r = va.derivative_of(f.expr());
                self.add(phase, "theorem1.valpha_defining", "ᵛα(π*f) = 0, ᵛα(F_X) = π*⟨X, α⟩", vec![r]);
            }
            for (_, x) in &self.c.verticals {
                let r = va.derivative_of(&self.momentum(x)?).sub(&x.pair(a)?);
                self.add(phase, "theorem1.valpha_defining", "ᵛα(π*f) = 0, ᵛα(F_X) = π*⟨X, α⟩", vec![r]);
            }
        }
        Ok(())
    }

    fn prop2(&mut self) -> Result<()> {
        let ext = Space::extended(self.c.n);
        for (_, rt) in &self.c.tensors {
            let r = rho_relation_defect(&complete_lift_cotangent(rt)?, &complete_lift_tensor11(rt)?)?;
            self.add(ext, "prop2.rho_related", "R̃_{T*}(ρ*σ) = ρ*(R̃(σ))", r);
        }
        Ok(())
    }

    fn prop3(&mut self) -> Result<()> {
        let phase = self.phase;
        for (_, w) in &self.c.two_forms {
            let vw = vlift_twoform(w)?;
            for (_, a) in &self.c.forms {
                let r = comps(&vw.apply(&vlift_oneform(a)?)?);
                self.add(phase, "prop3.valpha", "ᵛω(ᵛα) = 0", r);
            }
            for (_, x) in self.fields() {
                let r = resid(&vw.apply(&complete_lift_vector(x)?)?, &vlift_oneform(&w.interior(x)?)?)?;
                self.add(phase, "prop3.complete", "ᵛω(X̃) = ᵛ(i_X ω)", r);
            }
        }
        Ok(())
    }

    fn prop4(&mut self) -> Result<()> {
        let phase = self.phase;
        for (_, rt) in &self.c.tensors {
            let lift = complete_lift_tensor11(rt)?;
            for (_, x) in self.fields() {
                let lhs = lift.lie_derivative(&complete_lift_vector(x)?)?;
                let r = resid(&lhs, &complete_lift_tensor11(&rt.lie_derivative(x)?)?)?;
                self.add(phase, "prop4.complete", "L_{X̃}R̃ = (L_X R)~", r);
            }
            for (_, a) in &self.c.forms {
                let lhs = lift.lie_derivative(&vlift_oneform(a)?)?;
                let w = exterior_derivative(&rt.adjoint(a)?).sub(&hook2(rt, &exterior_derivative(a))?)?;
                let r = resid(&lhs, &vlift_twoform(&w)?)?;
                self.add(phase, "prop4.valpha", "L_{ᵛα}R̃ = ᵛ(-R⌟₂dα + d(R α))", r);
            }
        }
        Ok(())
    }

    fn prop5(&mut self) -> Result<()> {
        let phase = self.phase;
        for (_, rt) in &self.c.tensors {
            let r2 = rt.square();
            let lift2 = complete_lift_tensor11(rt)?.square();
            let torsion = nijenhuis_torsion(rt);
            for (_, a) in &self.c.forms {
                let r = resid(&lift2.apply(&vlift_oneform(a)?)?, &vlift_oneform(&r2.adjoint(a)?)?)?;
                self.add(phase, "prop5.valpha", "R̃²(ᵛα) = ᵛ(R²α)", r);
            }
            for (_, x) in self.fields() {
                let lhs = lift2.apply(&complete_lift_vector(x)?)?;
                let rhs = complete_lift_vector(&r2.apply(x)?)?
                    .add(&vlift_tensor11(&r2.lie_derivative(x)?)?)?
                    .add(&vlift_tensor11(&torsion.interior(x)?)?)?;
                self.add(phase, "prop5.complete", "R̃²(X̃) = (R²X)~ + ᵛ(L_X R²) + ᵛ(i_X N_R)", resid(&lhs, &rhs)?);
            }
        }
        Ok(())
    }

    fn prop6(&mut self) -> Result<()> {
        let (base, phase) = (self.base, self.phase);
        let fields: Vec<_> = self.fields().collect();
        for (_, rt) in &self.c.tensors {
            let n_r = nijenhuis_torsion(rt);
            let n_lift = nijenhuis_torsion(&complete_lift_tensor11(rt)?);
            for (_, a) in &self.c.forms {
                for (_, b) in &self.c.forms {
                    let r = comps(&n_lift.on(&vlift_oneform(a)?, &vlift_oneform(b)?)?);
                    self.add(phase, "prop6.vv", "N_{R̃}(ᵛα, ᵛβ) = 0", r);
                }
            }
            for (i, (_, x)) in fields.iter().enumerate() {
                let ix = n_r.interior(x)?;
                let aux = rt.lie_derivative(&rt.apply(x)?)?.sub(&rt.compose(&rt.lie_derivative(x)?)?)?;
                self.add(base, "prop6.aux", "i_X N_R = L_{RX}R - R∘L_X R", resid(&ix, &aux)?);
                let xt = complete_lift_vector(x)?;
                for (_, a) in &self.c.forms {
                    let lhs = n_lift.on(&xt, &vlift_oneform(a)?)?;
                    let r = resid(&lhs, &vlift_oneform(&ix.adjoint(a)?)?)?;
                    self.add(phase, "prop6.cv", "N_{R̃}(X̃, ᵛα) = ᵛ((i_X N_R)(α))", r);
                }
                for (_, y) in &fields[i + 1..] {
                    let iy = n_r.interior(y)?;
                    let lhs = n_lift.on(&xt, &complete_lift_vector(y)?)?;
                    let rhs = complete_lift_vector(&n_r.on(x, y)?)?
                        .add(&vlift_tensor11(&n_r.interior(&lie_bracket(x, y)?)?)?)?
                        .add(&vlift_tensor11(&ix.lie_derivative(y)?.sub(&iy.lie_derivative(x)?)?)?)?;
                    self.add(
                        phase,
                        "prop6.cc",
                        "N_{R̃}(X̃, Ỹ) = N_R(X,Y)~ + ᵛ(i_{[X,Y]}N_R) + ᵛ(L_Y(i_X N_R) - L_X(i_Y N_R))",
                        resid(&lhs, &rhs)?,
                    );
                }
            }
        }
        Ok(())
    }

    fn prop7(&mut self) -> Result<()> {
        let phase = self.phase;
        let pm = PoissonMap::canonical(self.c.n);
        let fields: Vec<_> = self.fields().collect();
        for (_, a) in &self.c.forms {
            let r = resid(&pm.apply(&self.pi(a))?, &vlift_oneform(a)?)?;
            self.add(phase, "prop7.poisson_basis", "P(π*α) = ᵛα, P(dF_X) = -X̃, P(ʰR) = ᵛR", r);
        }
        for (_, x) in &self.c.verticals {
            let r = comps(&pm.apply(&self.d_momentum(x)?)?.add(&complete_lift_vector(x)?)?);
            self.add(phase, "prop7.poisson_basis", "P(π*α) = ᵛα, P(dF_X) = -X̃, P(ʰR) = ᵛR", r);
        }
        // dq = π*dq, dp_i = dF_{∂q_i}, ∂p = ᵛdq, ∂q and ∂t are complete lifts
        let mut sigmas: Vec<OneForm> = (0..phase.dim()).map(|a| OneForm::coordinate(phase, a)).collect();
        for (_, a) in &self.c.forms {
            sigmas.push(self.pi(a));
        }
        for (_, x) in &self.c.verticals {
            sigmas.push(self.d_momentum(x)?);
        }
        let mut zs: Vec<VectorField> = (0..phase.dim()).map(|b| VectorField::coordinate(phase, b)).collect();
        for (_, b) in &self.c.forms {
            zs.push(vlift_oneform(b)?);
        }
        for (_, y) in &fields {
            zs.push(complete_lift_vector(y)?);
        }
        for (_, rt) in &self.c.tensors {
            let lift = complete_lift_tensor11(rt)?;
            let r = resid(&pm.apply(&hlift_tensor11(rt)?)?, &vlift_tensor11(rt)?)?;
            self.add(phase, "prop7.poisson_basis", "P(π*α) = ᵛα, P(dF_X) = -X̃, P(ʰR) = ᵛR", r);
            self.add(phase, "prop7.commutation", "P∘R̃ = R̃∘P", pm.commutator_defect(&lift)?);
            for s in &sigmas {
                for z in &zs {
                    let r = comps(&magri_morosi_unchecked(&lift, s, z)?);
                    self.add(phase, "prop7.mu", "μ(σ, Z) = 0 on lifted bases", r);
                }
            }
        }
        Ok(())
    }

    fn torsion_free(&self, rt: &Tensor11) -> Result<bool> {
        let tol = self.opts.tol.unwrap_or(SYMBOLIC_TOL);
        Ok(max_abs(self.base, nijenhuis_torsion(rt).components(), self.opts)?.0 < tol)
    }

    fn theorem2(&mut self) -> Result<()> {
        let phase = self.phase;
        let d = self.base.dim();
        for (name, rt) in &self.c.tensors {
            let n_r = nijenhuis_torsion(rt);
            let n_lift = nijenhuis_torsion(&complete_lift_tensor11(rt)?);
            let r = (0..d * d * d)
                .map(|k| {
                    let (a, b, c) = (k / (d * d), (k / d) % d, k % d);
                    n_lift.entry(a, b, c).sub(n_r.entry(a, b, c))
                })
                .collect();
            self.add(phase, "theorem2.projection", "π_*N_{R̃}(X̃, Ỹ) = N_R(X, Y)", r);
            if self.torsion_free(rt)? {
                let id = format!("theorem2.lifted_vanishes[{name}]");
                self.add(phase, &id, "N_R = 0 ⇒ N_{R̃} = 0", comps(&n_lift));
            }
        }
        Ok(())
    }

    fn theorem3(&mut self) -> Result<()> {
        let phase = self.phase;
        let pm = PoissonMap::canonical(self.c.n);
        for (name, rt) in &self.c.tensors {
            let lift = complete_lift_tensor11(rt)?;
            self.add(phase, "theorem3.commutation", "P∘R̃ = R̃∘P", pm.commutator_defect(&lift)?);
            let mut mu = Vec::new();
            for a in 0..phase.dim() {
                for b in 0..phase.dim() {
                    let m = magri_morosi_unchecked(&lift, &OneForm::coordinate(phase, a), &VectorField::coordinate(phase, b))?;
                    mu.extend(comps(&m));
                }
            }
            self.add(phase, "theorem3.mu", "μ(dx^a, ∂_b) = 0", mu);
            if self.torsion_free(rt)? {
                let id = format!("theorem3.lifted_torsion[{name}]");
                self.add(phase, &id, "N_R = 0 ⇒ N_{R̃} = 0", comps(&nijenhuis_torsion(&lift)));
            }
            self.verdicts.insert(name.clone(), pn_check(rt, self.opts)?);
        }
        Ok(())
    }

    fn lemma2(&mut self) -> Result<()> {
        let phase = self.phase;
        let fields: Vec<_> = self.fields().collect();
        let hl: Vec<OneForm> = self.c.tensors.iter().map(|(_, r)| hlift_tensor11(r)).collect::<Result<_>>()?;
        let dfs: Vec<OneForm> = self.c.verticals.iter().map(|(_, x)| self.d_momentum(x)).collect::<Result<_>>()?;
        for (_, b) in &self.c.forms {
            let vb = vlift_oneform(b)?;
            for (_, a) in &self.c.forms {
                self.add(phase, "lemma2.vbeta_pialpha", "L_{ᵛβ}(π*α) = 0", comps(&self.pi(a).lie_derivative(&vb)?));
            }
            for ((_, x), df) in self.c.verticals.iter().zip(&dfs) {
                let rhs = OneForm::differential(phase, &x.pair(b)?);
                self.add(phase, "lemma2.vbeta_dF", "L_{ᵛβ}dF_X = π*d(i_X β)", resid(&df.lie_derivative(&vb)?, &rhs)?);
            }
            for ((_, rt), h) in self.c.tensors.iter().zip(&hl) {
                let r = resid(&h.lie_derivative(&vb)?, &self.pi(&rt.adjoint(b)?))?;
                self.add(phase, "lemma2.vbeta_hR", "L_{ᵛβ}ʰR = π*R(β)", r);
            }
        }
        for (_, q) in &self.c.tensors {
            let vq = vlift_tensor11(q)?;
            for (_, a) in &self.c.forms {
                self.add(phase, "lemma2.vQ_pialpha", "L_{ᵛQ}(π*α) = 0", comps(&self.pi(a).lie_derivative(&vq)?));
            }
            for ((_, x), df) in self.c.verticals.iter().zip(&dfs) {
                let r = resid(&df.lie_derivative(&vq)?, &self.d_momentum(&q.apply(x)?)?)?;
                self.add(phase, "lemma2.vQ_dF", "L_{ᵛQ}dF_X = dF_{QX}", r);
            }
            for ((_, rt), h) in self.c.tensors.iter().zip(&hl) {
                let r = resid(&h.lie_derivative(&vq)?, &hlift_tensor11(&q.compose(rt)?)?)?;
                self.add(phase, "lemma2.vQ_hR", "L_{ᵛQ}ʰR = ʰ(Q∘R)", r);
            }
        }
        for (_, y) in &fields {
            let yt = complete_lift_vector(y)?;
            for (_, a) in &self.c.forms {
                let r = resid(&self.pi(a).lie_derivative(&yt)?, &self.pi(&a.lie_derivative(y)?))?;
                self.add(phase, "lemma2.Y_pialpha", "L_{Ỹ}(π*α) = π*(L_Y α)", r);
            }
            for ((_, x), df) in self.c.verticals.iter().zip(&dfs) {
                let r = resid(&df.lie_derivative(&yt)?, &self.d_momentum(&lie_bracket(y, x)?)?)?;
                self.add(phase, "lemma2.Y_dF", "L_{Ỹ}dF_X = dF_{[Y,X]}", r);
            }
            for ((_, rt), h) in self.c.tensors.iter().zip(&hl) {
                let r = resid(&h.lie_derivative(&yt)?, &hlift_tensor11(&rt.lie_derivative(y)?)?)?;
                self.add(phase, "lemma2.Y_hR", "L_{Ỹ}ʰR = ʰ(L_Y R)", r);
            }
        }
        Ok(())
    }

    fn naturality(&mut self) -> Result<()> {
        let (base, phase) = (self.base, self.phase);
        let theta = CanonicalTheta::new(self.c.n).form;
        let fields: Vec<_> = self.fields().collect();
        for (tname, t) in &self.c.transforms {
            let bmap = t.chart_map(base)?;
            let pmap = t.chart_map(phase)?;
            let mut lifted = Vec::new();
            let mut push = |name: &str, reference: &str, r: Vec<Expr>| {
                match lifted.iter_mut().find(|i: &&mut Identity| i.id == name) {
                    Some(i) => i.residuals.extend(r),
                    None => lifted.push(Identity::new(name, reference, r)),
                }
            };
            for (_, x) in &self.c.verticals {
                let lhs = momentum_function(x)?.transform_by(&pmap)?;
                let rhs = momentum_function(&x.transform_by(&bmap)?)?;
                push("momentum", "T(F_X) = F_{T(X)}", vec![lhs.expr().sub(rhs.expr())]);
            }
            for (_, x) in &fields {
                let lhs = complete_lift_vector(x)?.transform_by(&pmap)?;
                let rhs = complete_lift_vector(&x.transform_by(&bmap)?)?;
                push("complete", "T(X̃) = T(X)~", resid(&lhs, &rhs)?);
            }
            for (_, a) in &self.c.forms {
                let lhs = vlift_oneform(a)?.transform_by(&pmap)?;
                let rhs = vlift_oneform(&a.transform_by(&bmap)?)?;
                push("valpha", "T(ᵛα) = ᵛT(α)", resid(&lhs, &rhs)?);
            }
            for (_, rt) in &self.c.tensors {
                let rn = rt.transform_by(&bmap)?;
                let lhs = vlift_tensor11(rt)?.transform_by(&pmap)?;
                push("vR", "T(ᵛR) = ᵛT(R)", resid(&lhs, &vlift_tensor11(&rn)?)?);
                let lhs = hlift_tensor11(rt)?.transform_by(&pmap)?;
                push("hR", "T(ʰR) = ʰT(R)", resid(&lhs, &hlift_tensor11(&rn)?)?);
                let lhs = complete_lift_tensor11(rt)?.transform_by(&pmap)?;
                push("tR", "T(R̃) = T(R)~", resid(&lhs, &complete_lift_tensor11(&rn)?)?);
            }
            for (_, w) in &self.c.two_forms {
                let lhs = vlift_twoform(w)?.transform_by(&pmap)?;
                push("vomega", "T(ᵛω) = ᵛT(ω)", resid(&lhs, &vlift_twoform(&w.transform_by(&bmap)?)?)?);
            }
            push("theta", "T(Θ) = Θ", resid(&theta.transform_by(&pmap)?, &theta)?);
            let mut brackets = Vec::new();
            for (i, (_, x)) in fields.iter().enumerate() {
                for (_, y) in &fields[i + 1..] {
                    let lhs = lie_bracket(x, y)?.transform_by(&bmap)?;
                    let rhs = lie_bracket(&x.transform_by(&bmap)?, &y.transform_by(&bmap)?)?;
                    brackets.extend(resid(&lhs, &rhs)?);
                }
            }
            for ident in &mut lifted {
                ident.id = format!("naturality.{}[{tname}]", ident.id);
            }
            self.groups.push(Group { space: phase, identities: lifted, map: Some(pmap) });
            if !brackets.is_empty() {
                let ident = Identity::new(format!("naturality.bracket[{tname}]"), "T[X, Y] = [TX, TY]", brackets);
                self.groups.push(Group { space: base, identities: vec![ident], map: Some(bmap) });
            }
        }
        Ok(())
    }
}

/// Builds and evaluates the identities of `suites` over `corpus`.
pub fn run_suites(suites: &[Suite], corpus: &Corpus, opts: &CheckOptions) -> Result<SuiteRun> {
    let mut report = CheckReport::empty(opts);
    let mut verdicts = BTreeMap::new();
    for &suite in suites {
        let mut b = Builder::new(corpus, opts);
        b.build(suite)?;
        b.groups.retain(|g| g.identities.iter().any(|i| !i.residuals.is_empty()));
        if b.groups.is_empty() {
            return Err(Error::MissingObject(format!("suite `{suite}` found no applicable objects in the model")));
        }
        for g in &b.groups {
            let mut plan = CheckPlan::new(g.space, g.identities.clone());
            if let Some(m) = &g.map {
                plan = plan.through(m);
            }
            report.merge(run_check(&plan, opts)?);
        }
        verdicts.extend(b.verdicts);
    }
    Ok(SuiteRun { suites: suites.iter().map(|s| s.name().to_string()).collect(), report, verdicts })
}

impl Corpus {
    pub fn new(n: usize) -> Self {
        Corpus { n, ..Corpus::default() }
    }

    /// Built-in objects for `n = 1` or `n = 2`.
    pub fn standard(n: usize) -> Result<Self> {
        match n {
            1 => standard_1(),
            2 => standard_2(),
            _ => Err(Error::WrongSpace(format!("no built-in corpus for n = {n}"))),
        }
    }
}

struct Parser(Space);

impl Parser {
    fn e(&self, src: &str) -> Result<Expr> {
        parse_expr(src, &self.0)
    }

    fn coord(&self, name: &str) -> Coord {
        Coord::parse(name).expect("built-in coordinate name")
    }

    fn tensor(&self, entries: &[(&str, &str, &str)]) -> Result<Tensor11> {
        let pairs = entries
            .iter()
            .map(|(a, b, src)| Ok(((self.coord(a), self.coord(b)), self.e(src)?)))
            .collect::<Result<Vec<_>>>()?;
        Tensor11::from_pairs(self.0, &pairs)
    }

    fn form(&self, entries: &[(&str, &str)]) -> Result<OneForm> {
        let pairs =
            entries.iter().map(|(a, src)| Ok((self.coord(a), self.e(src)?))).collect::<Result<Vec<_>>>()?;
        OneForm::from_pairs(self.0, &pairs)
    }

    fn two_form(&self, entries: &[(&str, &str, &str)]) -> Result<TwoForm> {
        let pairs = entries
            .iter()
            .map(|(a, b, src)| Ok(((self.coord(a), self.coord(b)), self.e(src)?)))
            .collect::<Result<Vec<_>>>()?;
        TwoForm::from_pairs(self.0, &pairs)
    }

    fn field(&self, entries: &[(&str, &str)]) -> Result<VectorField> {
        let pairs =
            entries.iter().map(|(a, src)| Ok((self.coord(a), self.e(src)?))).collect::<Result<Vec<_>>>()?;
        VectorField::from_pairs(self.0, &pairs)
    }

    fn function(&self, src: &str) -> Result<ScalarField> {
        ScalarField::parse(src, self.0)
    }
}

fn named<T>(prefix: &str, items: Vec<T>) -> Vec<Named<T>> {
    items.into_iter().enumerate().map(|(i, x)| (format!("{prefix}{}", i + 1), x)).collect()
}

fn standard_1() -> Result<Corpus> {
    let p = Parser(Space::base(1));
    Ok(Corpus {
        n: 1,
        tensors: vec![
            ("flat".into(), p.tensor(&[("q1", "q1", "q1")])?),
            ("twisted".into(), p.tensor(&[("q1", "q1", "q1"), ("q1", "t", "t")])?),
            ("mixed".into(), p.tensor(&[("q1", "q1", "t*q1^2 + sin(t)"), ("q1", "t", "cos(q1)")])?),
        ],
        forms: named(
            "a",
            vec![
                p.form(&[("t", "q1"), ("q1", "t")])?,
                p.form(&[("t", "t^2"), ("q1", "sin(q1)*t")])?,
                p.form(&[("t", "exp(t)*q1"), ("q1", "q1^2")])?,
            ],
        ),
        two_forms: named(
            "w",
            vec![
                p.two_form(&[("q1", "t", "q1")])?,
                p.two_form(&[("q1", "t", "t*q1^2")])?,
                p.two_form(&[("q1", "t", "sin(t + q1)")])?,
            ],
        ),
        verticals: named(
            "X",
            vec![p.field(&[("q1", "q1")])?, p.field(&[("q1", "t*q1^2")])?, p.field(&[("q1", "sin(q1)")])?],
        ),
        timelike: named(
            "Y",
            vec![
                p.field(&[("t", "1"), ("q1", "t")])?,
                p.field(&[("t", "1"), ("q1", "q1^2")])?,
                p.field(&[("t", "1"), ("q1", "sin(t)*q1")])?,
            ],
        ),
        functions: named("f", vec![p.function("t*q1")?, p.function("sin(t)")?, p.function("q1^2 + t")?]),
        transforms: vec![
            ("exp".into(), FibredTransform::parse(1, &["exp(t)*q1"], Some(&["exp(-t)*q1"]))?),
            ("shift".into(), FibredTransform::parse(1, &["q1 + t^2"], Some(&["q1 - t^2"]))?),
        ],
    })
}

fn standard_2() -> Result<Corpus> {
    let p = Parser(Space::base(2));
    Ok(Corpus {
        n: 2,
        tensors: vec![
            (
                "pushed".into(),
                p.tensor(&[
                    ("q1", "q1", "q1 - t*q2"),
                    ("q1", "q2", "-t*(q1 - t*q2) + t*(q2 + 3)"),
                    ("q1", "t", "-q2*(q1 - t*q2)"),
                    ("q2", "q2", "q2 + 3"),
                ])?,
            ),
            (
                "generic".into(),
                p.tensor(&[
                    ("q1", "q1", "q1*q2"),
                    ("q1", "q2", "t"),
                    ("q1", "t", "q2"),
                    ("q2", "q1", "sin(q1)"),
                    ("q2", "q2", "q2^2 + t"),
                    ("q2", "t", "t*q1"),
                ])?,
            ),
            ("diag_twisted".into(), p.tensor(&[("q1", "q1", "q1"), ("q2", "q2", "q2"), ("q1", "t", "t")])?),
        ],
        forms: named(
            "a",
            vec![
                p.form(&[("t", "t*q2"), ("q1", "q1*q2"), ("q2", "t^2")])?,
                p.form(&[("t", "q1"), ("q1", "sin(q1)"), ("q2", "q2*t")])?,
                p.form(&[("q1", "exp(t)*q2"), ("q2", "q1^2")])?,
            ],
        ),
        two_forms: named(
            "w",
            vec![
                p.two_form(&[("q1", "t", "q1"), ("q2", "t", "t*q2"), ("q1", "q2", "q1*q2")])?,
                p.two_form(&[("q1", "q2", "sin(t + q2)"), ("q2", "t", "q1^2")])?,
                p.two_form(&[("q1", "t", "t"), ("q1", "q2", "exp(q1)")])?,
            ],
        ),
        verticals: named(
            "X",
            vec![
                p.field(&[("q1", "q2"), ("q2", "t*q1")])?,
                p.field(&[("q1", "q1^2"), ("q2", "sin(q2)")])?,
                p.field(&[("q1", "1"), ("q2", "t*q1*q2")])?,
            ],
        ),
        timelike: named(
            "Y",
            vec![
                p.field(&[("t", "1"), ("q1", "q2")])?,
                p.field(&[("t", "1"), ("q1", "t*q1"), ("q2", "q1*q2")])?,
                p.field(&[("t", "1"), ("q1", "q1^2"), ("q2", "sin(t)")])?,
            ],
        ),
        functions: named("f", vec![p.function("t*q1 + q2")?, p.function("sin(q1*q2)")?, p.function("q2^2 + t")?]),
        transforms: vec![(
            "shear".into(),
            FibredTransform::parse(2, &["q1 - t*q2", "q2"], Some(&["q1 + t*q2", "q2"]))?,
        )],
    })
}
