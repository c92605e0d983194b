use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn opfree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opfree"))
        .args(args)
        .env("OPFREE_LOG", "quiet")
        .output()
        .expect("run opfree")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr_kind(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).expect("error JSON on stderr");
    v["error"]["kind"].as_str().unwrap().to_string()
}

const BERNOULLI: &str = r#"{"type":"discrete","points":[-1,1],"weights":[0.5,0.5]}"#;
const CORNER: &str = r#"{"dim":2,"mean":[[[0,0],[0,0]],[[0,0],[0,0]]],"kraus":[[[[0,0],[1,0]],[[0,0],[0,0]]]]}"#;

#[test]
fn jacobi_of_bernoulli() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "mu.json", BERNOULLI);
    let v = stdout_json(&opfree(&["jacobi", "--input", &input]));
    assert_eq!(v, serde_json::json!({"alphas": [0.0, 0.0], "omegas": [1.0], "exhausted": true}));
}

#[test]
fn jacobi_writes_output_file() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "mu.json", BERNOULLI);
    let output = dir.path().join("jc.json");
    let out = opfree(&["jacobi", "-i", &input, "-o", output.to_str().unwrap(), "--depth", "1"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(output).unwrap()).unwrap();
    assert_eq!(v["alphas"], serde_json::json!([0.0]));
    assert_eq!(v["exhausted"], Value::Bool(false));
}

#[test]
fn transform_points() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "t.json",
        r#"{"jacobi":{"alphas":[0,0],"omegas":[1],"exhausted":true},"points":[[0,2]]}"#,
    );
    let v = stdout_json(&opfree(&["transform", "-i", &input]));
    let z = &v[0];
    assert!(z[0].as_f64().unwrap().abs() < 1e-15);
    assert!((z[1].as_f64().unwrap() + 0.4).abs() < 1e-15);
}

#[test]
fn semicircle_density_csv() {
    let dir = TempDir::new().unwrap();
    let jc = serde_json::json!({
        "alphas": vec![0.0; 60_000],
        "omegas": vec![1.0; 59_999],
        "exhausted": false,
    });
    let input = write(&dir, "sc.json", &jc.to_string());
    let out = opfree(&[
        "density", "-i", &input, "--xmin", "-3", "--xmax", "3", "--steps", "601", "--epsilon", "1e-3", "--depth",
        "60000",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,density"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (x, d) = l.split_once(',').unwrap();
            assert!(!x.contains('e') && !d.contains('e'), "plain decimals: {l}");
            (x.parse().unwrap(), d.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 601);
    let peak = rows.iter().copied().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    assert!(peak.0.abs() < 0.05);
    assert!((peak.1 - 1.0 / std::f64::consts::PI).abs() < 5e-3);
}

#[test]
fn solve_reports_matrices() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "s.json", &format!(r#"{{"model":{CORNER},"points":[[0,1]]}}"#));
    let v = stdout_json(&opfree(&["solve", "-i", &input]));
    let g = &v[0]["g"];
    // G(i·1) = diag(−i/2, −i)
    assert!((g[0][0][1].as_f64().unwrap() + 0.5).abs() < 1e-9);
    assert!((g[1][1][1].as_f64().unwrap() + 1.0).abs() < 1e-9);
    assert!(g[0][1][0].as_f64().unwrap().abs() < 1e-9);
    assert!(v[0]["residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn atoms_of_corner_model() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "m.json", CORNER);
    let v = stdout_json(&opfree(&["atoms", "-i", &input, "--at", "0.5"]));
    let reps = v.as_array().unwrap();
    let at = |x: f64| reps.iter().find(|r| (r["location"].as_f64().unwrap() - x).abs() < 1e-8);
    for x in [-1.0, 1.0] {
        assert!((at(x).unwrap()["mass"].as_f64().unwrap() - 0.25).abs() < 1e-6);
    }
    assert!((at(0.0).unwrap()["mass"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert!(at(0.5).unwrap()["mass"].as_f64().unwrap() < 1e-6);
}

#[test]
fn nilpotency_report() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "m.json", CORNER);
    let v = stdout_json(&opfree(&["nilpotency", "-i", &input]));
    assert_eq!(v["eta_nilpotent"], 2);
    assert_eq!(v["all_nilpotent"], true);
}

#[test]
fn cover_bernoulli() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "mu.json", BERNOULLI);
    let v = stdout_json(&opfree(&["cover", "-i", &input]));
    assert_eq!(v["components"].as_array().unwrap().len(), 2);
    let w = v["mixture"]["weights"].as_array().unwrap();
    assert!((w[1].as_f64().unwrap() - 0.5).abs() < 1e-6);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", r#"{"type":"discrete","points":[1],"weights":[0.3]}"#);
    let out = opfree(&["jacobi", "-i", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_kind(&out), "input");

    let unknown = write(&dir, "u.json", r#"{"type":"discrete","points":[1],"weights":[1],"extra":1}"#);
    assert_eq!(opfree(&["jacobi", "-i", &unknown]).status.code(), Some(2));

    let input = write(&dir, "mu.json", BERNOULLI);
    assert_eq!(opfree(&["density", "-i", &input, "--steps", "1"]).status.code(), Some(2));
    assert_eq!(opfree(&["density", "-i", &input, "--epsilon", "0"]).status.code(), Some(2));
    assert_eq!(opfree(&["jacobi", "-i", &input, "--depth", "0"]).status.code(), Some(2));

    let missing = dir.path().join("missing.json");
    let out = opfree(&["jacobi", "-i", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(stderr_kind(&out), "io");

    // a point on the real axis has no transform value
    let on_axis = write(&dir, "s.json", &format!(r#"{{"model":{CORNER},"points":[[0.5,0]]}}"#));
    assert_eq!(opfree(&["solve", "-i", &on_axis]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exit_code() {
    let dir = TempDir::new().unwrap();
    // moments that stop being usable after one level without describing a point mass
    let ms = write(
        &dir,
        "ms.json",
        r#"{"type":"moments","moments":[1,0,1e-30,0,1],"support_bound":1}"#,
    );
    let out = opfree(&["jacobi", "-i", &ms, "--depth", "2"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stderr_kind(&out), "numerical");
}

#[test]
fn deterministic_output() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "m.json", CORNER);
    let a = opfree(&["density", "-i", &input, "--steps", "51"]);
    let b = opfree(&["density", "-i", &input, "--steps", "51"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_prints_a_table() {
    let out = opfree(&["verify", "--seed", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| l.contains(" PASS ") || l.contains(" FAIL ")).collect();
    assert_eq!(rows.len(), 9, "{text}");
    for id in ["A1", "A2", "A3", "A4", "A5", "A6", "A7", "T3.2"] {
        assert!(rows.iter().any(|l| l.starts_with(id)), "missing {id}");
    }
    let all_pass = rows.iter().all(|l| l.contains(" PASS "));
    assert_eq!(out.status.success(), all_pass);
}

#[test]
fn reads_stdin() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_opfree"))
        .arg("jacobi")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(BERNOULLI.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    let v = stdout_json(&out);
    assert_eq!(v["omegas"], serde_json::json!([1.0]));
}
