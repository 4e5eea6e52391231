use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const K4: &str = r#"{"vertices": ["w","x","y","z"], "edges": [
    {"id":"wx","ends":["w","x"],"length":1.0},
    {"id":"wy","ends":["w","y"],"length":1.0},
    {"id":"wz","ends":["w","z"],"length":1.0},
    {"id":"xy","ends":["x","y"],"length":1.0},
    {"id":"xz","ends":["x","z"],"length":1.0},
    {"id":"yz","ends":["y","z"],"length":1.0}]}"#;

const PATH2: &str = r#"{"vertices":["a","b"],"edges":[{"id":"e","ends":["a","b"],"length":1.0}]}"#;

fn qgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgraph")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

#[test]
fn spectrum_of_unit_interval() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "path2.json", PATH2);
    let out = qgraph(&["spectrum", &path, "--num", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["index_base"], 0);
    let lambdas: Vec<f64> = v["eigenvalues"].as_array().unwrap().iter().map(|e| e["lambda"].as_f64().unwrap()).collect();
    assert_eq!(lambdas.len(), 4);
    assert_eq!(lambdas[0], 0.0);
    for (j, l) in lambdas.iter().enumerate().skip(1) {
        let exact = (j * j) as f64 * PI * PI;
        assert!((l - exact).abs() < 1e-8 * exact);
    }
}

#[test]
fn dirichlet_flag_overrides_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "path2.json", PATH2);
    let out = qgraph(&["spectrum", &path, "--num", "1", "--dirichlet", "a"]);
    let v = stdout_json(&out);
    assert_eq!(v["index_base"], 1);
    let l = v["eigenvalues"][0]["lambda"].as_f64().unwrap();
    assert!((l - PI * PI / 4.0).abs() < 1e-8);
}

#[test]
fn parse_errors_are_json_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let neg = write(
        dir.path(),
        "neg.json",
        r#"{"vertices":["a","b"],"edges":[{"id":"e","ends":["a","b"],"length":-1}]}"#,
    );
    let out = qgraph(&["spectrum", &neg]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert!(err["message"].as_str().unwrap().contains("nonpositive length on edge 'e'"));

    let missing = write(
        dir.path(),
        "d.json",
        r#"{"vertices":["a","b"],"edges":[{"id":"e","ends":["a","b"],"length":1}],"dirichlet":["q"]}"#,
    );
    let out = qgraph(&["spectrum", &missing]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_json(&out)["message"].as_str().unwrap().contains("'q'"));

    let broken = write(dir.path(), "broken.json", "{\"vertices\": [\"a\",\n");
    let out = qgraph(&["spectrum", &broken]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "parse");
    assert!(err["message"].as_str().unwrap().contains("line"));
}

#[test]
fn usage_errors_exit_two() {
    let out = qgraph(&["spectrum"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "usage");
    let out = qgraph(&["verify", "--suite", "nope", "--trials", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = qgraph(&[
        "verify", "--suite", "k4_cases", "--trials", "4", "--seed", "42", "--out", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = stdout_json(&out);
    assert_eq!(summary["failed"], 0);
    let csv = fs::read_to_string(out_dir.join("verify-k4_cases-42.csv")).unwrap();
    assert!(csv.starts_with("suite,seed,trial,lambda_l2,bound,slack,pass"));
    assert_eq!(csv.lines().count(), 1 + 5 * 4);
    assert!(out_dir.join("verify-k4_cases-42.json").exists());
}

#[test]
fn verify_single_graph_fails_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    // the tree bound is sharp for this star; a tolerance of -1e-6 demands
    // strict slack and so must fail
    let star = write(
        dir.path(),
        "star.json",
        r#"{"vertices":["c","a","b","d"],"edges":[
            {"id":"e1","ends":["c","a"],"length":1},
            {"id":"e2","ends":["c","b"],"length":1},
            {"id":"e3","ends":["c","d"],"length":1}]}"#,
    );
    let ok = qgraph(&["verify", "--graph", &star, "--bound", "tree_sharp", "--index", "1"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout_json(&ok)["pass"], true);
    let strict = qgraph(&["verify", "--graph", &star, "--bound", "tree_sharp", "--index", "1", "--tol=-1e-6"]);
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = write(dir.path(), "k4.json", K4);
    let a = qgraph(&["spectrum", &k4, "--num", "4", "--dirichlet", "w"]);
    let b = qgraph(&["spectrum", &k4, "--num", "4", "--dirichlet", "w"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    // 17 significant digits
    assert!(text.contains("e0") || text.contains("e1"));
}

#[test]
fn optimize_small_star() {
    let dir = tempfile::tempdir().unwrap();
    let star = write(
        dir.path(),
        "star.json",
        r#"{"vertices":["c","a","b","d"],"edges":[
            {"id":"e1","ends":["c","a"],"length":1},
            {"id":"e2","ends":["c","b"],"length":1},
            {"id":"e3","ends":["c","d"],"length":1}]}"#,
    );
    let out_dir = dir.path().join("out");
    let out = qgraph(&[
        "optimize", &star, "--index", "1", "--mode", "max", "--restarts", "2", "--seed", "7", "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let objective = v["objective"].as_f64().unwrap();
    // sup over star(3) metrics is (p/2)² π² = 2.25 π²
    assert!((objective - 2.25 * PI * PI).abs() < 1e-6 * objective, "{objective}");
    assert!(v["metric"]["e1"].as_f64().is_some());
    let csv = fs::read_to_string(out_dir.join("optimize-star-7.csv")).unwrap();
    assert!(csv.starts_with("run,iteration,objective"));
}

#[test]
fn surgery_and_generate() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = write(dir.path(), "k4.json", K4);
    let out = qgraph(&["surgery", &k4, "contract", "--edge", "wx"]);
    assert!(out.status.success());
    let g = stdout_json(&out);
    assert_eq!(g["vertices"].as_array().unwrap().len(), 3);
    assert_eq!(g["edges"].as_array().unwrap().len(), 5);

    let out = qgraph(&["surgery", &k4, "split", "--vertex", "w", "--parts", "wx:tail;wy:tail,wz:tail"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["vertices"].as_array().unwrap().len(), 5);

    let out = qgraph(&["surgery", &k4, "delete-pendant", "--edge", "wx"]);
    assert_eq!(out.status.code(), Some(2));

    let out = qgraph(&["generate", "--family", "dipole", "--size", "3", "--lengths", "1,2,3"]);
    let g = stdout_json(&out);
    assert_eq!(g["edges"].as_array().unwrap().len(), 3);
    assert_eq!(g["edges"][2]["length"].as_f64(), Some(3.0));
}

#[test]
fn eigenfunction_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "path2.json", PATH2);
    let out = qgraph(&["eigenfunction", &path, "--index", "1", "--samples", "5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("basis,edge,x,value"));
    assert_eq!(lines.count(), 5);
    let out = qgraph(&["eigenfunction", &path, "--lambda", "5.0"]);
    assert_eq!(out.status.code(), Some(2));
}
