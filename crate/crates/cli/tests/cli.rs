use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn seqloc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqloc")).args(args).output().expect("spawn seqloc")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn stat_on_path() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "path.edges", "0 1\n1 2\n");
    let v = stdout_json(&seqloc(&["stat", "--input", &input]));
    for key in ["n", "m", "h1", "z1", "hg", "zg", "h_i"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["h1"].as_f64().unwrap(), 0.75);
    assert!((v["z1"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert_eq!(v["h_i"].as_array().unwrap().len(), 3);
}

#[test]
fn non_bijective_sequence_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "path.edges", "0 1\n1 2\n");
    let seq = write(dir.path(), "seq.txt", "1\n1\n3\n");
    let out = seqloc(&["stat", "--input", &input, "--sequence", &seq]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn missing_input_file_exits_3() {
    let out = seqloc(&["stat", "--input", "/nonexistent/graph.edges"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn test_er_degenerate_size_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "edge.edges", "0 1\n");
    let out = seqloc(&["test", "er", "--input", &input]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}

#[test]
fn test_er_embeds_null_descriptor() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "g.edges", "0 1\n1 2\n2 3\n3 4\n0 4\n1 3\n");
    let v = stdout_json(&seqloc(&["test", "er", "--input", &input, "--alpha", "0.1"]));
    assert!(v["null"].is_object(), "{v}");
    assert_eq!(v["alpha"].as_f64().unwrap(), 0.1);
}

#[test]
fn test_seq_exact_triangle_with_pendant() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "tp.edges", "0 1\n1 2\n0 2\n2 3\n");
    let v = stdout_json(&seqloc(&["test", "seq", "--exact", "--input", &input]));
    assert_eq!(v["mode"], "exhaustive");
    let s = &v["summary"];
    assert_eq!(s["n_sequences"].as_u64(), Some(24));
    assert_eq!(s["distinct_matrices"].as_u64(), Some(12));
    // smallest raw sum in the histogram gives the minimum z1
    let min_raw = s["histogram"][0][0].as_f64().unwrap();
    let z = (2.0 * 4.0 * 5.0 / 2.0f64).sqrt() * (min_raw / (4.0 * 5.0 / 3.0) - 1.0);
    assert!((z + 1.1180).abs() < 0.005, "{z}");
}

#[test]
fn bad_alpha_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "path.edges", "0 1\n1 2\n");
    assert_eq!(seqloc(&["stat", "--input", &input, "--alpha", "1.5"]).status.code(), Some(2));
}

#[test]
fn sample_orgm_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let p = path.to_str().unwrap();
        let out = seqloc(&["sample", "orgm", "--n", "50", "--m", "200", "--r", "20", "--eps", "0.1", "--seed", "7", "--output", p]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        (fs::read(&path).unwrap(), fs::read(dir.path().join(format!("{name}.meta.json"))).unwrap())
    };
    let (a, meta_a) = run("a.edges");
    let (b, meta_b) = run("b.edges");
    assert_eq!(a, b);
    assert_eq!(meta_a, meta_b);
    let meta: Value = serde_json::from_slice(&meta_a).unwrap();
    assert_eq!(meta["seed"].as_u64(), Some(7));
    assert_eq!(String::from_utf8(a).unwrap().lines().filter(|l| !l.trim().is_empty() && !l.starts_with('%')).count(), 200);
}

#[test]
fn infeasible_sample_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("x.edges");
    let out = seqloc(&["sample", "er", "--n", "4", "--m", "10", "--output", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!p.exists());
}

#[test]
fn json_reports_round_trip_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "g.edges", "0 1\n1 2\n2 3\n3 4\n4 5\n0 5\n1 4\n2 5\n");
    for args in [vec!["stat"], vec!["test", "er"], vec!["test", "seq"], vec!["fit"], vec!["test", "orgm", "--er-samples", "10"]] {
        let mut full = args.clone();
        full.extend(["--input", &input]);
        let out = seqloc(&full);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        let mut again = serde_json::to_string_pretty(&v).unwrap();
        again.push('\n');
        assert_eq!(text, again, "{args:?}");
    }
}

#[test]
fn order_then_test_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let sample = dir.path().join("er.edges");
    let sp = sample.to_str().unwrap();
    assert!(seqloc(&["sample", "er", "--n", "40", "--m", "80", "--seed", "3", "--output", sp]).status.success());
    let seq = dir.path().join("er.seq");
    let qp = seq.to_str().unwrap();
    assert!(seqloc(&["order", "spectral", "--input", sp, "--output", qp]).status.success());
    let first = fs::read(&seq).unwrap();
    assert!(seqloc(&["order", "spectral", "--input", sp, "--output", qp]).status.success());
    assert_eq!(first, fs::read(&seq).unwrap());
    // an optimized sequence makes even a uniform graph look local
    let v = stdout_json(&seqloc(&["test", "er", "--input", sp, "--sequence", qp]));
    assert_eq!(v["decision"], "reject", "{v}");
    assert!(v["z"].as_f64().unwrap() < -3.0);
}

#[test]
fn power_csv_layout() {
    let out = seqloc(&["power", "--grid", "r-eps", "--n", "50", "--m", "200", "--r-over-n", "0.25,0.75", "--eps", "0,0.5,1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "eps\\r_over_n,0.25,0.75");
    assert_eq!(lines.len(), 4);
    for line in &lines[1..] {
        for cell in line.split(',').skip(1) {
            let p: f64 = cell.parse().unwrap();
            assert!((0.0..=1.0).contains(&p));
        }
    }
}

#[test]
fn sweep_and_fit_csv() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "g.edges", "0 1\n1 2\n2 3\n3 4\n4 5\n0 2\n3 5\n");
    let out = seqloc(&["sweep-r", "--input", &input, "--r-min", "1", "--r-max", "4"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 5);
    let out = seqloc(&["fit", "--input", &input, "--format", "csv"]);
    assert!(out.status.success());
}

#[test]
fn fetch_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("x");
    let out = seqloc(&["fetch", "--url", "http://127.0.0.1:9/nothing", "--output", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}
