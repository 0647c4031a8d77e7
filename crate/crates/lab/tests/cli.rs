use std::fs;
use std::process::{Command, Output};

use lempert_core::records::EstimateRecord;
use lempert_lab::ResultRow;
use tempfile::TempDir;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lempert-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn poles_file(dir: &TempDir, text: &str) -> String {
    let path = dir.path().join("poles.json");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const HALF: &str = r#"[{"point": [{"re": 0.5, "im": 0.0}], "weight": 1.0}]"#;

#[test]
fn estimate_single_disc_pole() {
    let dir = TempDir::new().unwrap();
    let poles = poles_file(&dir, HALF);
    let out = lab(&[
        "estimate",
        "--domain",
        "disc",
        "--poles",
        &poles,
        "--z",
        "0",
        "--restarts",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let record: EstimateRecord = serde_json::from_slice(&out.stdout).unwrap();
    assert!(record.certified);
    assert!(
        record.value >= 0.5 - 1e-12 && record.value <= 0.5 * 1.01,
        "{}",
        record.value
    );
    assert!(record.runtime_ms.is_none());
}

#[test]
fn estimate_without_certificate_exits_3() {
    let dir = TempDir::new().unwrap();
    let poles = poles_file(&dir, HALF);
    let out = lab(&[
        "estimate",
        "--domain",
        "disc",
        "--poles",
        &poles,
        "--z",
        "0",
        "--restarts",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let record: EstimateRecord = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((record.value, record.certified), (1.0, false));
}

#[test]
fn pole_at_the_evaluation_point_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let poles = poles_file(&dir, HALF);
    let out = lab(&["estimate", "--domain", "disc", "--poles", &poles, "--z", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("coincides with the evaluation point"));
}

#[test]
fn empty_poles_are_a_usage_error() {
    let dir = TempDir::new().unwrap();
    for text in ["", "[]"] {
        let poles = poles_file(&dir, text);
        let out = lab(&["estimate", "--domain", "disc", "--poles", &poles, "--z", "0"]);
        assert_eq!(out.status.code(), Some(2));
        assert!(stderr(&out).contains("non-empty"), "{}", stderr(&out));
    }
}

#[test]
fn malformed_poles_report_line_and_column() {
    let dir = TempDir::new().unwrap();
    let poles = poles_file(&dir, "[\n  {\"point\": [{\"re\": 0.5}], \"weight\": 1}\n]");
    let out = lab(&["estimate", "--domain", "disc", "--poles", &poles, "--z", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains(&format!("{poles}:2:")), "{}", stderr(&out));
}

#[test]
fn bad_flags_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    let poles = poles_file(&dir, HALF);
    assert_eq!(lab(&["run", "no-such-experiment"]).status.code(), Some(2));
    assert_eq!(
        lab(&["estimate", "--domain", "annulus", "--poles", &poles, "--z", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        lab(&["estimate", "--domain", "disc", "--poles", &poles, "--z", "x"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(lab(&["bogus"]).status.code(), Some(2));
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let paths = ["a/rows.jsonl", "b/rows.jsonl"].map(|p| dir.path().join(p));
    for path in &paths {
        let out = lab(&["run", "covering-counterexample", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    }
    let [a, b] = paths.map(|p| fs::read(p).unwrap());
    assert_eq!(a, b);
    let rows: Vec<ResultRow> = String::from_utf8(a)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.seed == 42 && r.runtime_ms.is_none()));
}

#[test]
fn config_file_replaces_the_committed_one() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("covering.toml");
    fs::write(
        &config,
        "experiment_id = \"covering-counterexample\"\nseed = 5\n[domain]\nkind = \"punctured_disc\"\n\
         [poles]\na1 = 0.5\na2 = -0.5\nz = 0.25\noracle_branches = 50\n[optimizer]\nrestarts = 4\n",
    )
    .unwrap();
    let out = lab(&[
        "run",
        "covering-counterexample",
        "--config",
        config.to_str().unwrap(),
        "--out",
        "-",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let first: ResultRow =
        serde_json::from_str(String::from_utf8_lossy(&out.stdout).lines().next().unwrap()).unwrap();
    assert_eq!(first.seed, 5);

    let mismatched = lab(&["run", "disc-oracle", "--config", config.to_str().unwrap()]);
    assert_eq!(mismatched.status.code(), Some(2));
}

#[test]
fn failed_assertions_exit_4() {
    // Without restarts nothing is certified, so every row fails.
    let out = lab(&["run", "covering-counterexample", "--restarts", "0", "--out", "-"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("FAIL covering-counterexample/pair"));
}
