use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn run(args: &[&str], dir: &Path) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_formcalc")).args(args).current_dir(dir).output().unwrap();
    let v = serde_json::from_slice(&out.stdout).expect("stdout is one JSON record");
    (out.status.code().unwrap(), v)
}

fn here() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

#[test]
fn wedge_of_three() {
    let d = here();
    let (code, v) = run(&["wedge", "--form", "dx1", "--form", "(x3) dx2", "--form", "dx3", "--dim", "3"], d.path());
    assert_eq!(code, 0);
    assert_eq!(v["result"], "(x3) dx1^dx2^dx3");
}

#[test]
fn star_and_delta_fixtures() {
    let d = here();
    assert_eq!(run(&["star", "--form", "(1) dx1", "--dim", "3"], d.path()).1["result"], "(1) dx2^dx3");
    assert_eq!(run(&["delta", "--form", "(x1) dx1", "--dim", "2"], d.path()).1["result"], "(-1)");
    let (_, std) = run(&["laplacian", "--form", "(x1^2 + x2^2)", "--dim", "2"], d.path());
    let (_, paper) = run(&["laplacian", "--form", "(x1^2 + x2^2)", "--dim", "2", "--variant", "paper"], d.path());
    assert_eq!(std["result"], "(-4)");
    assert_eq!(paper["result"], "(4)");
    assert_eq!(paper["inputs"]["variant"], "paper");
}

#[test]
fn metric_from_manifold_file() {
    let d = here();
    std::fs::write(
        d.path().join("m.json"),
        r#"{"dim":2,"metric":[["1","0"],["0","4"]]}"#,
    )
    .unwrap();
    let (code, v) = run(&["star", "--form", "(1) dx1", "--manifold", "m.json"], d.path());
    assert_eq!(code, 0);
    assert_eq!(v["result"], "(2) dx2");
    assert_eq!(v["inputs"]["metric"], "file");
    let (code, v) = run(&["star", "--form", "(1) dx1", "--dim", "2", "--metric", "file"], d.path());
    assert_eq!(code, 2);
    assert_eq!(v["result"]["error"]["kind"], "usage");
}

#[test]
fn torsion_manifold_commutator() {
    let d = here();
    let zero = r#"[["0","0"],["0","0"]]"#;
    let g0 = r#"[["0","x1"],["0","0"]]"#;
    std::fs::write(
        d.path().join("m.json"),
        format!(r#"{{"dim":2,"gamma":[{g0},{zero}]}}"#),
    )
    .unwrap();
    let (code, v) = run(&["commutator", "--form", "(1) dx1", "--manifold", "m.json"], d.path());
    assert_eq!(code, 0);
    assert_eq!(v["result"]["coefficient_term"], "(0) dx1^dx2");
    assert_eq!(v["result"]["deforming"], true);
    assert_ne!(v["result"]["metric_term"], "(0) dx1^dx2");
}

#[test]
fn staged_integration_reaches_scalar() {
    let d = here();
    std::fs::write(d.path().join("b.json"), r#"{"coords":["x","y"],"A":["y","x"],"psi":"psi"}"#).unwrap();
    let (code, v) = run(&["integrate", "--balance", "b.json"], d.path());
    assert_eq!(code, 0);
    let stages = v["result"]["stages"].as_array().unwrap();
    assert_eq!(stages[0]["antiderivative"], "(x*y)");
    assert_eq!(stages.last().unwrap()["k"], 0);
}

#[test]
fn transform_reports_residual() {
    let d = here();
    std::fs::write(d.path().join("b.json"), r#"{"coords":["x","y"],"A":["y","-x"],"psi":"psi"}"#).unwrap();
    std::fs::write(d.path().join("p.json"), r#"{"params":["u","v"],"map":{"x":"u","y":"v"}}"#).unwrap();
    let (code, v) = run(&["transform", "--balance", "b.json", "--pseudo", "p.json"], d.path());
    assert_eq!(code, 1);
    assert_eq!(v["status"], "closure-failed");
    assert_eq!(v["result"]["residual"]["du^dv"], "-2");
    assert_eq!(v["result"]["original"]["unchanged"], true);
}

#[test]
fn jacobian_poisson_locus() {
    let d = here();
    let (_, j) = run(&["jacobian", "--expr", "r*cos(a)", "--expr", "r*sin(a)", "--vars", "r,a"], d.path());
    assert_eq!(j["result"]["determinant"], "r");
    let (_, p) = run(&["poisson", "--expr", "q1*p2", "--expr", "p1", "--pairs", "q1:p1,q2:p2"], d.path());
    assert_eq!(p["result"], "p2");
    let (_, l) = run(&["locus", "--expr", "x*(y - 2)^2"], d.path());
    let factors: Vec<&str> =
        l["result"]["components"].as_array().unwrap().iter().map(|c| c["factor"].as_str().unwrap()).collect();
    assert_eq!(factors.len(), 2);
    assert!(factors.contains(&"x") && factors.contains(&"y - 2"));
}

#[test]
fn bad_config_is_usage_error() {
    let d = here();
    std::fs::write(d.path().join("m.json"), r#"{"dim":2,"bogus":1}"#).unwrap();
    let (code, v) = run(&["d", "--form", "dx1", "--manifold", "m.json"], d.path());
    assert_eq!(code, 2);
    assert_eq!(v["result"]["error"]["kind"], "config");
    let (code, _) = run(&["d", "--form", "dx1", "--manifold", "missing.json"], d.path());
    assert_eq!(code, 2);
}

#[test]
fn negative_coefficient_values_accepted() {
    let d = here();
    let (code, v) = run(&["d", "--form", "-(x2) dx1", "--dim", "2"], d.path());
    assert_eq!(code, 0);
    assert_eq!(v["result"], "(1) dx1^dx2");
}
