use std::fs;
use std::process::{Command, Output};

use tempfile::TempDir;

const EXPONENTIAL: &str = r#"{"family": "RieszI", "beta": 1, "n": 1, "m": 1, "a": 1.0, "kappa": [0]}"#;
const T_SPEC: &str =
    r#"{"family": "TRieszII", "beta": 2, "n": 3, "m": 2, "nu": 6.0, "kappa": [0.4, -0.2], "tau": [0.1, 0.3]}"#;

fn triesz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_triesz")).args(args).output().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn eval_reports_log_density() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "spec.json", EXPONENTIAL);
    let point = write(
        &dir,
        "x.json",
        r#"{"beta": 1, "rows": 1, "cols": 1, "entries": [[2.0]]}"#,
    );
    let out = triesz(&["eval", "--spec", &spec, "--point", &point]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["family"], "RieszI");
    assert!((v["log_density"].as_f64().unwrap() + 2.0).abs() < 1e-12);
    assert!((v["density"].as_f64().unwrap() - (-2f64).exp()).abs() < 1e-14);

    let out = triesz(&["eval", "--spec", &spec, "--point", &point, "--log"]);
    assert!(stdout_json(&out).get("density").is_none());
}

#[test]
fn sampling_is_reproducible_and_headed() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "spec.json", T_SPEC);
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = triesz(&[
            "sample",
            "--spec",
            &spec,
            "--n",
            "50",
            "--seed",
            seed,
            "--stream",
            "3",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read_to_string(out).unwrap()
    };
    let a = run("a.csv", "11");
    assert_eq!(a, run("b.csv", "11"));
    assert_ne!(a, run("c.csv", "12"));
    let lines: Vec<&str> = a.lines().collect();
    assert!(lines[0].starts_with("# spec_sha256=") && lines[0].ends_with("seed=11 stream=3"));
    assert_eq!(lines.len(), 51);
    // 3 x 2 complex draws.
    assert_eq!(lines[1].split(',').count(), 12);

    let j = run("a.jsonl", "11");
    let header: serde_json::Value = serde_json::from_str(j.lines().next().unwrap()).unwrap();
    assert_eq!(header["seed"], 11);
    assert_eq!(j.lines().count(), 51);
}

#[test]
fn sample_rejects_unknown_extension() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "spec.json", EXPONENTIAL);
    let out = dir.path().join("x.txt");
    let o = triesz(&["sample", "--spec", &spec, "--n", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_spec_lists_violations() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        &dir,
        "spec.json",
        r#"{"family": "TRieszI", "beta": 1, "n": 2, "m": 2, "nu": 1, "kappa": [0, 0], "tau": [0, 0]}"#,
    );
    let point = write(
        &dir,
        "x.json",
        r#"{"beta": 1, "rows": 2, "cols": 2, "entries": [[1], [0], [0], [1]]}"#,
    );
    let o = triesz(&["eval", "--spec", &spec, "--point", &point]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("0.5 ≤ 0.5"));
}

#[test]
fn normalization_check_passes_and_emits_a_report() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "spec.json", EXPONENTIAL);
    let o = triesz(&["check", "normalization", "--spec", &spec]);
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["reports"][0]["pass"], true);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("PASS"));
}

#[test]
fn jacobian_and_identity_checks() {
    let o = triesz(&[
        "check",
        "jacobian",
        "--transform",
        "prop3",
        "--beta",
        "4",
        "--dims",
        "2,2",
        "--points",
        "3",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = triesz(&["check", "identities", "--trials", "5", "--seed", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout_json(&o)["reports"].as_array().unwrap().len() > 1);
}

#[test]
fn gof_check_runs_at_m_one() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "spec.json", EXPONENTIAL);
    let o = triesz(&[
        "check",
        "gof",
        "--spec",
        &spec,
        "--n",
        "20000",
        "--statistic",
        "ks",
        "--seed",
        "5",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn bad_arguments_exit_nonzero() {
    assert!(!triesz(&[
        "check",
        "jacobian",
        "--transform",
        "prop1",
        "--beta",
        "3",
        "--dims",
        "2,2"
    ])
    .status
    .success());
    assert!(
        !triesz(&["eval", "--spec", "/nonexistent.json", "--point", "/nonexistent.json"])
            .status
            .success()
    );
}
