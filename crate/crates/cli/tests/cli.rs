use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvtelefi")).args(args).output().expect("binary runs")
}

fn json_stdout(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json")
}

fn csv_stdout(args: &[&str]) -> Vec<Vec<String>> {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    text.lines().map(|l| l.split(',').map(String::from).collect()).collect()
}

fn error_kind(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).expect("json error object");
    v["error"]["kind"].as_str().unwrap().to_string()
}

#[test]
fn fidelity_spot_values() {
    let v = json_stdout(&["fidelity", "--m", "0", "--n", "0", "--lam", "0.5"]);
    assert_eq!(v["fidelity"], 0.75);
    assert_eq!(v["path"], "closed");
    let v = json_stdout(&["fidelity", "--m", "1", "--n", "1", "--lam", "0.5", "--path", "engine"]);
    assert_eq!(v["fidelity"], 0.84375);
    assert_eq!(v["path"], "engine");
    let a = json_stdout(&["fidelity", "--m", "1", "--n", "0", "--lam", "0.5"]);
    let b = json_stdout(&["fidelity", "--m", "0", "--n", "1", "--lam", "0.5"]);
    assert_eq!(a["fidelity"], 0.5625);
    assert_eq!(a["fidelity"], b["fidelity"]);
}

#[test]
fn auto_path_falls_back_to_engine() {
    let v = json_stdout(&["fidelity", "--m", "6", "--n", "7", "--lam", "0.4"]);
    assert_eq!(v["path"], "engine");
    let f = v["fidelity"].as_f64().unwrap();
    assert!(f > 0.7 && f <= 1.0);
}

#[test]
fn oracle_path_and_ng() {
    let v = json_stdout(&["ng", "--m", "1", "--n", "1", "--lam", "0.5", "--path", "oracle"]);
    assert!((v["fidelity"].as_f64().unwrap() - 0.84375).abs() < 1e-9);
    assert!((v["ng"].as_f64().unwrap() - 0.5411303).abs() < 1e-6);
}

#[test]
fn zero_squeezing_is_a_flagged_limit() {
    let v = json_stdout(&["ng", "--m", "0", "--n", "1", "--lam", "0"]);
    assert_eq!(v["limit_flag"], true);
    assert_eq!(v["fidelity"], 0.25);
    let v = json_stdout(&["fidelity", "--m", "0", "--n", "0", "--lam", "0"]);
    assert_eq!(v["limit_flag"], false);
    assert_eq!(v["fidelity"], 0.5);
}

#[test]
fn errors_exit_two_with_json() {
    let out = run(&["fidelity", "--m", "1", "--n", "1", "--lam", "1.0"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "domain");
    let out = run(&["fidelity", "--m", "6", "--n", "6", "--lam", "0.5", "--path", "closed"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "unsupported_order");
    let out = run(&["fidelity", "--m", "20", "--n", "0", "--lam", "0.5"]);
    assert_eq!(error_kind(&out), "order_too_large");
    let out = run(&["sweep", "--pairs", "0,0", "--lam", "0.9:0.1:3"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "usage");
    let out = run(&["fidelity", "--m", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "usage");
    let out = run(&["fidelity", "--m", "2", "--n", "2", "--lam", "0.5", "--path", "oracle", "--angular-nodes", "8"]);
    assert_eq!(error_kind(&out), "invalid_scheme");
    let out = run(&[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_schema_and_crossing() {
    let rows = csv_stdout(&["sweep", "--pairs", "0,1", "--lam", "0.4:0.43:4"]);
    assert_eq!(rows[0].join(","), "m,n,lam,r,fidelity,ng,path,limit_flag");
    let f: Vec<f64> = rows[1..].iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(f[1] < 0.5 && f[2] > 0.5);
    assert!(rows[1..].iter().all(|r| r[5].is_empty() && r[6] == "closed" && r[7] == "false"));
    for r in &rows[1..] {
        let lam: f64 = r[2].parse().unwrap();
        let rr: f64 = r[3].parse().unwrap();
        assert!((rr - lam.atanh()).abs() < 1e-12);
    }
}

#[test]
fn sweep_with_ng_and_ordering() {
    let rows = csv_stdout(&["sweep", "--pairs", "1,1", "0,0", "--lam", "0.25:0.5:2", "--with-ng"]);
    let keys: Vec<(String, String, String)> = rows[1..].iter().map(|r| (r[0].clone(), r[1].clone(), r[2].clone())).collect();
    assert_eq!(
        keys,
        vec![
            ("1".into(), "1".into(), "0.25".into()),
            ("1".into(), "1".into(), "0.5".into()),
            ("0".into(), "0".into(), "0.25".into()),
            ("0".into(), "0".into(), "0.5".into()),
        ]
    );
    let ng: f64 = rows[2][5].parse().unwrap();
    assert!((ng - 0.5411303).abs() < 1e-6);
}

#[test]
fn output_is_independent_of_worker_count() {
    let a = run(&["figure", "1c", "--jobs", "1"]);
    let b = Command::new(env!("CARGO_BIN_EXE_cvtelefi")).args(["figure", "1c"]).env("CVTELEFI_JOBS", "3").output().unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn compare_argmax() {
    let rows = csv_stdout(&["compare", "--total", "2", "--lam", "0.5:0.5:1"]);
    assert_eq!(rows[0].last().unwrap(), "argmax");
    assert_eq!(rows[1][4], "0.421875");
    assert!((rows[2][4].parse::<f64>().unwrap() - 0.84375).abs() < 1e-12);
    assert!(rows[1..].iter().all(|r| r[8] == "1:1"));

    for (c, best) in [(2, "1:1"), (3, "1:2"), (4, "2:2"), (10, "5:5")] {
        let rows = csv_stdout(&["compare", "--total", &c.to_string(), "--lam", "0.05:0.9:18"]);
        assert!(rows[1..].iter().all(|r| r[8] == best), "C={c}");
    }
    let rows = csv_stdout(&["compare", "--total", "1", "--lam", "0.2:0.8:4"]);
    assert_eq!(rows.len(), 5);
    assert!(rows[1..].iter().all(|r| r[8] == "0:1"));
}

#[test]
fn json_format_for_tables() {
    let v = json_stdout(&["figure", "2a", "--lam", "0.5:0.5:1", "--format", "json"]);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r["ng"].is_null()));
}

#[test]
fn figure_to_file_with_gnuplot_stub() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig4d.csv");
    let p = path.to_str().unwrap();
    let out = run(&["figure", "4d", "--r", "0.1:1:10", "--out", p, "--gnuplot"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1 + 5 * 10);
    assert!(text.lines().skip(1).all(|l| !l.split(',').nth(5).unwrap().is_empty()));
    let script = std::fs::read_to_string(format!("{p}.gp")).unwrap();
    assert!(script.contains(p) && script.contains("m=1, n=1"));

    let out = run(&["figure", "3", "--gnuplot"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn figure_family_override() {
    let rows = csv_stdout(&["figure", "1b", "--family", "1,3", "--lam", "0.3:0.6:2"]);
    let pairs: Vec<(String, String)> = rows[1..].iter().map(|r| (r[0].clone(), r[1].clone())).collect();
    assert_eq!(pairs.len(), 6);
    assert_eq!(pairs[0], ("1".into(), "1".into()));
    assert_eq!(pairs[2], ("1".into(), "3".into()));
    assert_eq!(pairs[4], ("0".into(), "0".into()));
}

#[test]
fn bracket_export() {
    let v = json_stdout(&["--export-brackets"]);
    assert_eq!(v["version"], "1.0.0");
    assert_eq!(v["brackets"].as_array().unwrap().len(), 6);
    assert_eq!(v["printed_m3"]["m"], 3);
}

#[test]
fn selfcheck_catches_a_corrupted_engine() {
    let out = run(&["selfcheck", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("FAIL")));
}
