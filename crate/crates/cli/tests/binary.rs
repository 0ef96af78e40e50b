use std::path::PathBuf;
use std::process::{Command, Output};

fn model(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models").join(name).display().to_string()
}

fn jetlift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jetlift")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn lift_prints_text_and_json() {
    let m = model("n1.json");
    let out = jetlift(&["lift", "--model", &m, "--object", "twisted", "--kind", "horizontal"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("p1*q1 dq1 + p1*t dt"));

    let out = jetlift(&["lift", "--model", &m, "--object", "flat", "--kind", "complete", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["components"]["p1,p1"], "q1");
    assert_eq!(v["operation"], "complete");
}

#[test]
fn exit_codes() {
    let m = model("n1.json");
    assert_eq!(code(&jetlift(&["verify", "--model", &m])), 0);
    assert_eq!(code(&jetlift(&["verify", "--model", &m, "--suite", "prop4", "--tol", "1e-300"])), 1);
    assert_eq!(code(&jetlift(&["verify", "--model", "/nonexistent.json"])), 2);
    assert_eq!(code(&jetlift(&["verify", "--model", &m, "--suite", "nope"])), 2);
    assert_eq!(code(&jetlift(&["verify", "--model", &m, "--domain", "2,1"])), 2);
    assert_eq!(code(&jetlift(&["verify", "--model", &m, "--points", "0"])), 2);
    assert_eq!(code(&jetlift(&["lift", "--model", &m, "--object", "nope", "--kind", "vertical"])), 2);
    let dn = model("dn_example.json");
    let refused = jetlift(&["darboux", "--model", &dn, "--object", "diag_twisted"]);
    assert_eq!(code(&refused), 1);
    assert!(String::from_utf8_lossy(&refused.stdout).contains("not-pn"));
    let ok = jetlift(&[
        "darboux", "--model", &dn, "--object", "pushed", "--domain", "0.8,1.2;4.5,5.5;1.8,2.2", "--at", "1,5,2",
    ]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stdout));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("3.0000000000, 5.0000000000"));
}

#[test]
fn seeded_reports_are_byte_identical() {
    let m = model("n2.json");
    let args = ["verify", "--model", &m, "--json", "--seed", "0"];
    let a = jetlift(&args).stdout;
    let b = jetlift(&args).stdout;
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let c = jetlift(&["verify", "--model", &m, "--json", "--seed", "1"]).stdout;
    assert_ne!(a, c);
}
