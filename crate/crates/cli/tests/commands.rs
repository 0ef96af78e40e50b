use std::path::PathBuf;

use jetlift_cli::commands::{darboux, lift, print, verify};
use jetlift_cli::{CliError, LiftKind, Model, PrintKind};
use jetlift_core::check::{CheckOptions, Domain};
use jetlift_core::Error;
use serde_json::json;

fn model(name: &str) -> Model {
    Model::load(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models").join(name)).unwrap()
}

fn inline(objects: serde_json::Value, n: usize) -> Model {
    Model::from_json(&json!({ "n": n, "objects": objects }).to_string()).unwrap()
}

#[test]
fn complete_lift_of_the_flat_tensor() {
    let out = lift(&model("n1.json"), "flat", LiftKind::Complete).unwrap();
    assert_eq!(out.json["components"], json!({ "q1,q1": "q1", "p1,p1": "q1" }));
    assert_eq!(out.json["space"], "PhaseJ(1)");
}

#[test]
fn vertical_lift_of_dt_is_zero() {
    let out = lift(&model("n1.json"), "dt", LiftKind::Vertical).unwrap();
    assert_eq!(out.json["components"], json!({}));
    assert_eq!(out.json["text"], "0");
}

#[test]
fn horizontal_lift_text() {
    let out = lift(&model("n1.json"), "twisted", LiftKind::Horizontal).unwrap();
    assert_eq!(out.json["text"], "p1*q1 dq1 + p1*t dt");
}

#[test]
fn other_lifts_render_in_closed_form() {
    let m = model("n1.json");
    let text = |name, kind| lift(&m, name, kind).unwrap().json["text"].as_str().unwrap().to_string();
    assert_eq!(text("X1", LiftKind::Complete), "q1 ∂q1 - p1 ∂p1");
    assert_eq!(text("flat", LiftKind::Vertical), "p1*q1 ∂p1");
    assert_eq!(text("X1", LiftKind::Momentum), "p1*q1");
    assert_eq!(text("w1", LiftKind::Vertical), "-q1 ∂p1⊗dt");
    assert_eq!(text("h", LiftKind::Hamiltonian), "p1 ∂q1 - t ∂p1 + ∂t");
    assert_eq!(text("twisted", LiftKind::Cotangent), "q1 ∂q1⊗dq1 + t ∂q1⊗dt + t ∂p0⊗dp1 + q1 ∂p1⊗dp1");
}

#[test]
fn lift_kind_mismatch_is_an_input_error() {
    let err = lift(&model("n1.json"), "X1", LiftKind::Horizontal).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    let err = lift(&model("n1.json"), "f1", LiftKind::Hamiltonian).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn tensor_with_a_time_row_is_rejected() {
    let m = inline(json!({ "S": { "kind": "tensor11_E", "components": { "t,q1": "q1" } } }), 1);
    let err = lift(&m, "S", LiftKind::Complete).unwrap_err();
    assert!(matches!(err, CliError::Core(Error::DtNotAnnihilated)), "{err}");
    assert_eq!(err.exit_code(), 2);
    assert!(m.corpus().is_err());
}

#[test]
fn missing_object() {
    let err = lift(&model("n1.json"), "nope", LiftKind::Vertical).unwrap_err();
    assert!(matches!(err, CliError::Core(Error::MissingObject(_))));
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn malformed_models() {
    let bad = [
        json!({ "n": 1, "objects": { "a": { "kind": "oneform_E", "components": { "p1": "1" } } } }),
        json!({ "n": 1, "objects": { "a": { "kind": "vector_E", "components": { "q1": "q1 +" } } } }),
        json!({ "n": 1, "objects": { "a": { "kind": "scalar_E", "components": { "value": "p1" } } } }),
        json!({ "n": 1, "objects": { "a": { "kind": "spinor", "components": {} } } }),
        json!({ "n": 1, "objects": { "a": { "kind": "transform", "components": { "q2": "q1" } } } }),
        json!({ "n": 0, "objects": {} }),
    ];
    for m in bad {
        let err = Model::from_json(&m.to_string()).unwrap_err();
        assert_eq!(err.exit_code(), 2, "{m}: {err}");
    }
}

#[test]
fn theorem3_on_the_flat_tensor() {
    let m = inline(json!({ "R": { "kind": "tensor11_E", "components": { "q1,q1": "q1" } } }), 1);
    let out = verify(&m, "theorem3", &CheckOptions::default()).unwrap();
    assert!(out.success);
    assert_eq!(out.json["verdicts"]["R"]["verdict"], "pn-structure");
}

#[test]
fn theorem2_on_a_constant_tensor() {
    let m = inline(json!({ "C": { "kind": "tensor11_E", "components": { "q1,q1": "2", "q1,t": "-1" } } }), 1);
    let out = verify(&m, "theorem2", &CheckOptions::default()).unwrap();
    assert!(out.success);
    for r in out.json["results"].as_array().unwrap() {
        assert_eq!(r["max_residual"], 0.0, "{}", r["id"]);
    }
    assert!(out.json["results"].as_array().unwrap().iter().any(|r| r["id"] == "theorem2.lifted_vanishes[C]"));
}

#[test]
fn prop7_on_the_twisted_tensor() {
    let m = inline(json!({ "R": { "kind": "tensor11_E", "components": { "q1,q1": "q1", "q1,t": "t" } } }), 1);
    let out = verify(&m, "prop7", &CheckOptions::default()).unwrap();
    assert!(out.success);
    let mu = out.json["results"].as_array().unwrap().iter().find(|r| r["id"] == "prop7.mu").unwrap().clone();
    assert!(mu["max_residual"].as_f64().unwrap() < 1e-9);
    assert!(out.json.get("verdicts").is_none());
}

#[test]
fn unknown_suite_and_missing_objects() {
    let m = model("n1.json");
    assert_eq!(verify(&m, "prop1", &CheckOptions::default()).unwrap_err().exit_code(), 2);
    let empty = inline(json!({}), 1);
    let err = verify(&empty, "prop3", &CheckOptions::default()).unwrap_err();
    assert!(matches!(err, CliError::Core(Error::MissingObject(_))));
}

#[test]
fn failing_identities_set_the_failure_flag() {
    let opts = CheckOptions { tol: Some(1e-300), ..CheckOptions::default() };
    let out = verify(&model("n1.json"), "prop4", &opts).unwrap();
    assert!(!out.success);
    assert_eq!(out.exit_code(), 1);
    assert!(out.text.contains("FAIL"));
}

fn box_around_reference() -> CheckOptions {
    CheckOptions { domain: Domain::parse("0.8,1.2;4.5,5.5;1.8,2.2").unwrap(), ..CheckOptions::default() }
}

#[test]
fn darboux_on_the_pushed_example() {
    let out = darboux(&model("dn_example.json"), "pushed", Some("1,5,2"), &box_around_reference()).unwrap();
    assert!(out.success, "{}", out.text);
    let eig = &out.json["at"]["eigenvalues"];
    assert!((eig[0].as_f64().unwrap() - 3.0).abs() < 1e-8);
    assert!((eig[1].as_f64().unwrap() - 5.0).abs() < 1e-8);
    assert_eq!(out.json["samples"].as_array().unwrap().len(), 64);
    assert_eq!(out.json["pn"]["verdict"], "pn-structure");
}

#[test]
fn darboux_on_an_already_diagonal_tensor() {
    let m = inline(json!({ "R": { "kind": "tensor11_E", "components": { "q1,q1": "q1" } } }), 1);
    let opts = CheckOptions { domain: Domain::parse("0.5,2").unwrap(), ..CheckOptions::default() };
    let out = darboux(&m, "R", None, &opts).unwrap();
    assert!(out.success, "{}", out.text);
    for s in out.json["samples"].as_array().unwrap() {
        // the eigenvalue is the coordinate itself
        assert!((s["eigenvalues"][0].as_f64().unwrap() - s["point"][1].as_f64().unwrap()).abs() < 1e-12);
    }
}

#[test]
fn darboux_refuses_torsion() {
    let out = darboux(&model("dn_example.json"), "diag_twisted", None, &CheckOptions::default()).unwrap();
    assert!(!out.success);
    assert_eq!(out.json["refused"], "not-pn");
    assert_eq!(out.json["pn"]["verdict"], "not-pn");
}

#[test]
fn darboux_over_a_crossing_is_refused() {
    let err = darboux(&model("dn_example.json"), "pushed", None, &CheckOptions::default()).unwrap_err();
    assert_eq!(err.exit_code(), 1, "{err}");
}

#[test]
fn printing_torsion_and_haantjes() {
    let m = model("n1.json");
    let n = print(&m, "twisted", PrintKind::Torsion).unwrap();
    assert_eq!(n.json["components"], json!({ "q1,q1,t": "-t", "q1,t,q1": "t" }));
    let h = print(&m, "twisted", PrintKind::Haantjes).unwrap();
    assert_eq!(h.json["text"], "0");
    let t = print(&m, "exp", PrintKind::Object).unwrap();
    assert_eq!(t.json["components"], json!({ "q1": "exp(t)*q1" }));
    assert_eq!(print(&m, "X1", PrintKind::Torsion).unwrap_err().exit_code(), 2);
}
