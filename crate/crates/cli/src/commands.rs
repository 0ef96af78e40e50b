use std::fmt::Write as _;

use jetlift_core::check::{CheckOptions, CheckReport};
use jetlift_core::geometry::{haantjes_tensor, nijenhuis_torsion, Components, FibredTransform, Tensor11};
use jetlift_core::identities::{run_suites, Suite, SuiteRun};
use jetlift_core::lifts::{
    complete_lift_cotangent, complete_lift_tensor11, complete_lift_vector, hlift_tensor11, momentum_function,
    vlift_oneform, vlift_tensor11, vlift_twoform,
};
use jetlift_core::pn::{build_dn_transform, eigen_analysis, hamiltonian_vector_field, pn_check, sample_eigen, verify_dn, Verdict};
use jetlift_core::{Space, SpaceKind};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::model::{Kind, Model, Object};
use crate::render::{self, Rendered};
use crate::{Cli, Command, LiftKind, PrintKind};

/// Result of a command that ran to completion. `success` is false when an
/// identity failed or an analysis refused the model.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub success: bool,
    pub text: String,
    pub json: Value,
}

impl Output {
    pub fn exit_code(&self) -> i32 {
        if self.success {
            0
        } else {
            1
        }
    }
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let common = cli.command.common();
    let opts = common.options()?;
    let model = Model::load(&common.model)?;
    match &cli.command {
        Command::Lift { object, kind, .. } => lift(&model, object, *kind),
        Command::Verify { suite, .. } => verify(&model, suite, &opts),
        Command::Darboux { object, at, .. } => darboux(&model, object, at.as_deref(), &opts),
        Command::Print { object, kind, .. } => print(&model, object, *kind),
    }
}

fn mismatch(name: &str, obj: &Object, what: &str) -> CliError {
    CliError::Usage(format!("cannot take the {what} of `{name}`, a {}", obj.kind()))
}

fn rendered_output(name: &str, op: &str, r: Rendered) -> Output {
    let text = format!("{name} [{op}] on {}: {}", r.space, r.text);
    let mut json = json!({ "object": name, "operation": op });
    json.as_object_mut().unwrap().extend(serde_json::to_value(&r).unwrap().as_object().unwrap().clone());
    Output { success: true, text, json }
}

pub fn lift(model: &Model, name: &str, kind: LiftKind) -> Result<Output, CliError> {
    let obj = model.get(name)?;
    let r = match (kind, obj) {
        (LiftKind::Vertical, Object::OneForm(a)) => render::vector(&vlift_oneform(a)?),
        (LiftKind::Vertical, Object::Tensor11(t)) => render::vector(&vlift_tensor11(t)?),
        (LiftKind::Vertical, Object::TwoForm(w)) => render::tensor11(&vlift_twoform(w)?),
        (LiftKind::Complete, Object::Vector(x)) => render::vector(&complete_lift_vector(x)?),
        (LiftKind::Complete, Object::Tensor11(t)) => render::tensor11(&complete_lift_tensor11(t)?),
        (LiftKind::Horizontal, Object::Tensor11(t)) => render::oneform(&hlift_tensor11(t)?),
        (LiftKind::Momentum, Object::Vector(x)) => render::scalar(&momentum_function(x)?),
        (LiftKind::Cotangent, Object::Tensor11(t)) => render::tensor11(&complete_lift_cotangent(t)?),
        (LiftKind::Hamiltonian, Object::Scalar(h)) if obj.kind() == Kind::ScalarJ => {
            render::vector(&hamiltonian_vector_field(h)?)
        }
        _ => return Err(mismatch(name, obj, &format!("{kind:?} lift").to_lowercase())),
    };
    Ok(rendered_output(name, &format!("{kind:?}").to_lowercase(), r))
}

fn transform_rendering(t: &FibredTransform) -> Rendered {
    let n = t.n();
    let fwd = render::list(t.forward());
    let components = (1..=n).map(|i| (format!("q{i}"), fwd[i - 1].clone())).collect();
    let forward: Vec<String> = (1..=n).map(|i| format!("Q{i} = {}", fwd[i - 1])).collect();
    let inverse = if t.has_symbolic_inverse() {
        let inv = render::list(t.inverse());
        (1..=n).map(|i| format!("q{i} = {}", inv[i - 1])).collect::<Vec<_>>().join(", ")
    } else {
        "by Newton iteration".to_string()
    };
    Rendered {
        ty: "transform",
        space: Space::base(n).to_string(),
        components,
        text: format!("{}; inverse {inverse}", forward.join(", ")),
    }
}

pub fn print(model: &Model, name: &str, kind: PrintKind) -> Result<Output, CliError> {
    let obj = model.get(name)?;
    let r = match (kind, obj) {
        (PrintKind::Object, Object::Scalar(f)) => render::scalar(f),
        (PrintKind::Object, Object::Vector(x)) => render::vector(x),
        (PrintKind::Object, Object::OneForm(a)) => render::oneform(a),
        (PrintKind::Object, Object::Tensor11(t)) => render::tensor11(t),
        (PrintKind::Object, Object::TwoForm(w)) => render::twoform(w),
        (PrintKind::Object, Object::Transform(t)) => transform_rendering(t),
        (PrintKind::Torsion, Object::Tensor11(t)) => render::tensor12(&nijenhuis_torsion(t)),
        (PrintKind::Haantjes, Object::Tensor11(t)) => render::tensor12(&haantjes_tensor(t)),
        _ => return Err(mismatch(name, obj, &format!("{kind:?}").to_lowercase())),
    };
    Ok(rendered_output(name, &format!("{kind:?}").to_lowercase(), r))
}

fn report_lines(out: &mut String, report: &CheckReport) {
    for r in &report.results {
        let status = if r.pass { "PASS" } else { "FAIL" };
        let _ = write!(out, "{status} {:<40} max {:.3e} (tol {:.0e})  {}", r.id, r.max_residual, r.tolerance, r.reference);
        if !r.pass {
            let _ = write!(out, "\n     worst point {:?}", r.worst_point);
        }
        out.push('\n');
    }
}

pub fn verify(model: &Model, suite: &str, opts: &CheckOptions) -> Result<Output, CliError> {
    let suites = Suite::parse_list(suite).ok_or_else(|| {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        CliError::Usage(format!("unknown suite `{suite}`; expected one of {} or all", names.join(", ")))
    })?;
    let run: SuiteRun = run_suites(&suites, &model.corpus()?, opts)?;
    let mut text = String::new();
    report_lines(&mut text, &run.report);
    for (name, v) in &run.verdicts {
        let _ = writeln!(
            text,
            "verdict {name}: {} (N_R {:.3e}, N_R̃ {:.3e}, μ {:.3e}, [P, R̃] {:.3e})",
            verdict_name(v.verdict),
            v.torsion,
            v.lifted_torsion,
            v.magri_morosi,
            v.commutation
        );
    }
    let failed = run.report.results.iter().filter(|r| !r.pass).count();
    let _ = write!(
        text,
        "{} identities, {failed} failed; seed {}, {} points",
        run.report.results.len(),
        run.report.seed,
        run.report.points
    );
    Ok(Output { success: run.all_pass(), text, json: serde_json::to_value(&run).unwrap() })
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::PnStructure => "pn-structure",
        Verdict::NotPn => "not-pn",
    }
}

#[derive(Serialize)]
struct Sample {
    point: Vec<f64>,
    eigenvalues: Vec<f64>,
}

fn parse_point(src: &str, space: Space) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("--at expects {} comma-separated numbers, got `{src}`", space.dim()));
    let pt = src.split(',').map(|s| s.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<Vec<_>, _>>()?;
    if pt.len() != space.dim() {
        return Err(bad());
    }
    Ok(pt)
}

fn fmt_values(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.10}")).collect::<Vec<_>>().join(", ")
}

pub fn darboux(model: &Model, name: &str, at: Option<&str>, opts: &CheckOptions) -> Result<Output, CliError> {
    let r: &Tensor11 = model.tensor(name)?;
    if r.space().kind != SpaceKind::BaseE {
        return Err(CliError::Usage(format!("`{name}` must live on BaseE")));
    }
    let at = at.map(|src| parse_point(src, r.space())).transpose()?;
    let pn = pn_check(r, opts)?;
    let mut text = format!(
        "{name}: {} (N_R {:.3e}, N_R̃ {:.3e}, μ {:.3e}, [P, R̃] {:.3e})\n",
        verdict_name(pn.verdict),
        pn.torsion,
        pn.lifted_torsion,
        pn.magri_morosi,
        pn.commutation
    );
    let mut json = json!({ "object": name, "pn": pn });
    if pn.verdict == Verdict::NotPn {
        text.push_str("refused: the complete lift does not define a Poisson-Nijenhuis structure");
        json["refused"] = json!("not-pn");
        return Ok(Output { success: false, text, json });
    }
    if let Some(pt) = &at {
        let d = eigen_analysis(r, pt)?;
        let _ = writeln!(text, "eigenvalues at {pt:?}: {}", fmt_values(&d.eigenvalues));
        json["at"] = serde_json::to_value(Sample { point: pt.clone(), eigenvalues: d.eigenvalues }).unwrap();
    }
    let samples: Vec<Sample> = sample_eigen(r, opts)?
        .into_iter()
        .map(|d| Sample { point: d.point, eigenvalues: d.eigenvalues })
        .collect();
    for i in 0..r.space().n {
        let vals = samples.iter().map(|s| s.eigenvalues[i]);
        let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        let _ = writeln!(text, "λ{} ranges over [{lo:.6}, {hi:.6}] on {} samples", i + 1, samples.len());
    }
    let t = build_dn_transform(r, opts)?;
    let report = verify_dn(r, &t, opts)?;
    report_lines(&mut text, &report);
    let _ = write!(text, "coordinates: {}", transform_rendering(&t).text);
    json["samples"] = serde_json::to_value(&samples).unwrap();
    json["transform"] = json!({ "forward": render::list(t.forward()), "inverse": "newton" });
    json["report"] = serde_json::to_value(&report).unwrap();
    Ok(Output { success: report.all_pass(), text, json })
}
