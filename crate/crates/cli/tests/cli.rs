use std::path::Path;
use std::process::{Command, Output};

use singlab::Report;

fn singlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_singlab")).current_dir(dir).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn malformed_manifest_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.json"), "{\n  \"kind\": \"hardy\",\n  \"seed\": ,\n}\n").unwrap();
    let o = singlab(dir.path(), &["run", "m.json"]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3, column"), "{err}");

    std::fs::write(dir.path().join("typo.json"), r#"{"kind": "cone-exponents", "params": {"pp": 3}}"#).unwrap();
    assert_eq!(code(&singlab(dir.path(), &["run", "typo.json"])), 2);
    assert_eq!(code(&singlab(dir.path(), &["run", "missing.json"])), 2);
}

#[test]
fn cone_exponents_from_flags() {
    let dir = tempfile::tempdir().unwrap();
    let o = singlab(dir.path(), &["cone-exponents", "--p", "3", "--q", "3", "--potential", "jacobi", "--id", "ce"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = Report::read(&dir.path().join("singlab-reports/ce.json")).unwrap();
    assert_eq!(r.get("alpha_plus"), -2.0);
    assert_eq!(r.get("alpha_minus"), -3.0);
    let csv = std::fs::read_to_string(dir.path().join("singlab-reports/ce.csv")).unwrap();
    assert!(csv.starts_with("id,kind,name,value\n") && csv.contains("ce,cone-exponents,alpha_plus,-2.0"));
}

#[test]
fn thm12_at_large_lambda_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = singlab(dir.path(), &["thm12-scan", "--lambda", "0.1", "--id", "t"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("mu-lower"));
    let r = Report::read(&dir.path().join("singlab-reports/t.json")).unwrap();
    assert!(!r.pass && !r.passed("mu-lower"));
}

#[test]
fn solver_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&singlab(dir.path(), &["cone-exponents", "--p", "1", "--q", "1"])), 3);
}

#[test]
fn reports_are_byte_identical_and_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = r#"{
        "experiments": [
            {"id": "rays", "kind": "boundary-rays", "seed": 4, "resolutions": [48], "params": {"rays": 12}},
            {"id": "tree", "kind": "delta-estimate", "seed": 9, "resolutions": [40], "params": {"domain": "tree"}},
            {"id": "osc", "kind": "oscillation", "resolutions": [48], "params": {"levels": 4}}
        ],
        "output": "a"
    }"#;
    std::fs::write(dir.path().join("m.json"), manifest).unwrap();
    let first = Command::new(env!("CARGO_BIN_EXE_singlab"))
        .current_dir(dir.path())
        .env("SINGLAB_WORKERS", "3")
        .args(["run", "m.json"])
        .output()
        .unwrap();
    assert_eq!(code(&first), 0, "{}", String::from_utf8_lossy(&first.stderr));
    let lines: Vec<String> = String::from_utf8_lossy(&first.stdout).lines().map(|l| l.split(' ').next().unwrap().to_string()).collect();
    assert_eq!(lines, ["rays", "tree", "osc"]);
    std::fs::write(dir.path().join("m.json"), manifest.replace("\"a\"", "\"b\"")).unwrap();
    let second = Command::new(env!("CARGO_BIN_EXE_singlab"))
        .current_dir(dir.path())
        .env("SINGLAB_WORKERS", "1")
        .args(["run", "m.json"])
        .output()
        .unwrap();
    assert_eq!(code(&second), 0);
    for id in ["rays", "tree", "osc"] {
        for ext in ["csv", "json"] {
            let a = std::fs::read(dir.path().join(format!("a/{id}.{ext}"))).unwrap();
            let b = std::fs::read(dir.path().join(format!("b/{id}.{ext}"))).unwrap();
            assert_eq!(a, b, "{id}.{ext}");
        }
    }
}

#[test]
fn plot_columns() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&singlab(dir.path(), &["oscillation", "--id", "o", "--resolutions", "64"])), 0);
    let o = singlab(dir.path(), &["plot", "singlab-reports/o.json", "--kind", "osc"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let ys: Vec<f64> = text.lines().skip(1).map(|l| l.split('\t').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(text.lines().next(), Some("x\ty"));
    assert_eq!(ys.len(), 5);
    assert!(ys.iter().all(|y| *y > 0.0) && ys.windows(2).all(|w| w[1] <= w[0]));

    assert_eq!(code(&singlab(dir.path(), &["criticality", "--id", "c", "--lambda", "0.1", "--expect", "subcritical"])), 0);
    let out = dir.path().join("lambda.tsv");
    assert_eq!(code(&singlab(dir.path(), &["plot", "singlab-reports/c.json", "--kind", "lambda", "--out", out.to_str().unwrap()])), 0);
    let ys: Vec<f64> = std::fs::read_to_string(&out).unwrap().lines().skip(1).map(|l| l.split('\t').nth(1).unwrap().parse().unwrap()).collect();
    assert!(ys.len() == 6 && ys.windows(2).all(|w| w[1] < w[0]));

    let empty = singlab(dir.path(), &["plot", "singlab-reports/c.json", "--kind", "ratio"]);
    assert_eq!(String::from_utf8(empty.stdout).unwrap(), "x\ty\n");
    assert_eq!(code(&singlab(dir.path(), &["plot", "singlab-reports/c.json", "--kind", "nope"])), 2);
}

#[test]
fn unknown_kind_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&singlab(dir.path(), &["not-a-kind"])), 2);
    assert_eq!(code(&singlab(dir.path(), &["hardy", "--nodes"])), 2);
}
