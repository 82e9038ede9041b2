use std::fs;
use std::path::PathBuf;

use circstab_cli::{run_cli, EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK};
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("circstab").chain(args.iter().copied());
    let code = run_cli(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn profile_alpha_golden() {
    let (code, out, _) = run(&["profile-alpha", "--alpha", "golden", "--depth", "20"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    let g = v["gamma_hat"].as_f64().unwrap();
    assert!((g - 1.0).abs() < 0.05, "{g}");
    assert_eq!(v["partial_quotients"].as_array().unwrap().len(), 20);
}

#[test]
fn dk_check_reports_no_violations() {
    let (code, out, _) = run(&[
        "dk-check", "--suite", "default", "--cases", "60", "--seed", "4",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.lines().any(|l| l == "violations: 0"), "{out}");
    let (code, _, err) = run(&["dk-check", "--suite", "nonsense"]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.contains("unknown suite"));
}

#[test]
fn holder_fit_synthetic_sqrt() {
    let (code, out, _) = run(&[
        "holder-fit",
        "--input",
        &data("synthetic_sqrt.csv"),
        "--gamma",
        "1",
    ]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!((v["slope"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v["r2"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["check"]["pass"], Value::Bool(true));
    let (code, _, _) = run(&[
        "holder-fit",
        "--input",
        &data("synthetic_sqrt.csv"),
        "--kind",
        "birkhoff",
    ]);
    assert_eq!(code, EXIT_NUMERIC);
}

#[test]
fn usage_and_config_errors() {
    let (code, _, err) = run(&["stability", "--bogus"]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.contains("Usage"), "{err}");
    assert_eq!(run(&[]).0, EXIT_CONFIG);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("profile-alpha"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        r#"{"alpha":"golden","family":{"type":"RationalSnap"},"ladder":[5,5]}"#,
    )
    .unwrap();
    assert_eq!(
        run(&["stability", "--config", bad.to_str().unwrap()]).0,
        EXIT_CONFIG
    );
    fs::write(&bad, r#"{"alpha":"golden","famly":{}}"#).unwrap();
    assert_eq!(
        run(&["stability", "--config", bad.to_str().unwrap()]).0,
        EXIT_CONFIG
    );
    assert_eq!(
        run(&["stability", "--config", "/nonexistent/cfg.json"]).0,
        EXIT_CONFIG
    );
    assert_eq!(
        run(&["discrepancy", "--alpha", "golden", "--n", "0"]).0,
        EXIT_CONFIG
    );
    assert_eq!(
        run(&["profile-alpha", "--alpha", "1/3", "--depth", "20"]).0,
        EXIT_NUMERIC
    );
}

#[test]
fn stability_scan_writes_reproducible_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ar.json");
    fs::write(
        &cfg,
        r#"{"alpha":"golden","family":{"type":"AttractorRepeller"},"ladder":[5,6,7,8,9,10],"seed":1}"#,
    )
    .unwrap();
    let csv_a = dir.path().join("a.csv");
    let csv_b = dir.path().join("b.csv");
    let summary = dir.path().join("s.json");
    let c = cfg.to_str().unwrap();
    let (code, _, err) = run(&[
        "stability",
        "--config",
        c,
        "--csv",
        csv_a.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(
        run(&["stability", "--config", c, "--csv", csv_b.to_str().unwrap()]).0,
        EXIT_OK
    );
    assert_eq!(fs::read(&csv_a).unwrap(), fs::read(&csv_b).unwrap());

    let s: Value = serde_json::from_str(&fs::read_to_string(&summary).unwrap()).unwrap();
    let phys = s["fits"]
        .as_array()
        .unwrap()
        .iter()
        .find(|f| f["measure_kind"] == "physical")
        .unwrap();
    let slope = phys["fit"]["slope"].as_f64().unwrap();
    assert!((slope - 0.5).abs() < 0.05, "{slope}");

    let (code, out, _) = run(&[
        "holder-fit",
        "--input",
        csv_a.to_str().unwrap(),
        "--kind",
        "physical",
    ]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["slope"].as_f64().unwrap(), slope);
}

#[test]
fn discretize_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("d.json");
    fs::write(
        &cfg,
        r#"{"alpha":"1/3","family":{"type":"Discretization","map":{"type":"Rotation"}},"ladder":[3,6,9]}"#,
    )
    .unwrap();
    let (code, out, _) = run(&["discretize", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines[0],
        "family_id,size_param,w_distance,measure_kind,seed"
    );
    assert_eq!(lines.len(), 10);
    assert!(lines
        .iter()
        .filter(|l| l.contains("worst-cycle"))
        .all(|l| l.contains("8.3333333333333")));
}

#[test]
fn discrepancy_and_response_commands() {
    let (code, out, _) = run(&["discrepancy", "--alpha", "golden", "--n", "13"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["lower"], v["upper"]);

    let (code, out, err) = run(&["response", "--eps", "1e-2,1e-3", "--orbit-len", "200000"]);
    assert_eq!(code, EXIT_OK, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["rel_error"].as_f64().unwrap() < 0.1, "{out}");
    assert_eq!(v["fd"]["per_eps"].as_array().unwrap().len(), 2);
}
