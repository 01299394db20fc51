use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use diffmod::harness::{deg0_scorpion, scorpion, scorpion_flag};
use diffmod::io::ModuleFile;
use diffmod::{FieldSpec, Rational};
use serde_json::Value;
use tempfile::TempDir;

fn diffmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diffmod")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn fixture_files() -> (TempDir, PathBuf, PathBuf, PathBuf) {
    let dir = TempDir::new().unwrap();
    let d0 = ModuleFile::from_module(&deg0_scorpion::<Rational>(FieldSpec::Rationals)).to_json();
    let f = ModuleFile::from_module(&scorpion::<Rational>(FieldSpec::Rationals)).to_json();
    let flag = serde_json::to_string(&scorpion_flag()).unwrap();
    let a = write(dir.path(), "deg0.json", &d0);
    let b = write(dir.path(), "scorpion.json", &f);
    let c = write(dir.path(), "flag.json", &flag);
    (dir, a, b, c)
}

const NOT_A_DIFFERENTIAL: &str = r#"{
  "d": 1,
  "field": "QQ",
  "diff_degree": [0],
  "generators": [{"shift": [0]}, {"shift": [0]}],
  "entries": [{"row": 1, "col": 2, "coeff": 1}, {"row": 2, "col": 1, "coeff": 1}]
}"#;

#[test]
fn validate_accepts_fixtures() {
    let (_dir, d0, _, _) = fixture_files();
    let out = diffmod(&["--json", "validate", d0.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["valid"], Value::Bool(true));
}

#[test]
fn validate_rejects_a_square_that_is_not_zero() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "bad.json", NOT_A_DIFFERENTIAL);
    assert_eq!(code(&diffmod(&["validate", p.to_str().unwrap()])), 1);
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "junk.json", "{ not json");
    assert_eq!(code(&diffmod(&["homology", p.to_str().unwrap()])), 2);
    assert_eq!(code(&diffmod(&["homology", dir.path().join("missing.json").to_str().unwrap()])), 2);
    assert_eq!(code(&diffmod(&["--field", "Fp:4", "fixtures"])), 2);
    assert_eq!(code(&diffmod(&["no-such-command"])), 2);
}

#[test]
fn betti_by_graded_tor_and_by_flag() {
    let (_dir, d0, f, flag) = fixture_files();
    let graded = json(&diffmod(&["--json", "betti", d0.to_str().unwrap()]));
    assert_eq!(graded["betti"], 4);
    assert_eq!(graded["bound_satisfied"], Value::Bool(true));
    let out = diffmod(&["--json", "betti", f.to_str().unwrap(), "--flag", flag.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let flagged = json(&out);
    assert_eq!(flagged["betti"], 2);
    assert_eq!(flagged["method"], "flag-reduction");
    assert_eq!(flagged["bound_satisfied"], Value::Bool(false));
}

#[test]
fn betti_without_witness_for_positive_degree_fails() {
    let (_dir, _, f, _) = fixture_files();
    assert_eq!(code(&diffmod(&["betti", f.to_str().unwrap()])), 1);
}

#[test]
fn minimize_output_is_a_module_file() {
    let (_dir, _, f, _) = fixture_files();
    let out = diffmod(&["--json", "minimize", f.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"generators\""));
}

#[test]
fn homology_and_tor_inequality() {
    let (_dir, d0, _, _) = fixture_files();
    let h = json(&diffmod(&["--json", "homology", d0.to_str().unwrap()]));
    assert!(h.to_string().contains("length"));
    for dir in ["1", "2"] {
        let out = diffmod(&["--json", "tor-ineq", d0.to_str().unwrap(), "--dir", dir]);
        assert_eq!(code(&out), 0, "direction {dir}");
        assert_eq!(json(&out)["holds"], Value::Bool(true));
    }
    assert_ne!(code(&diffmod(&["tor-ineq", d0.to_str().unwrap(), "--dir", "3"])), 0);
}

#[test]
fn fixture_check_passes_over_both_fields() {
    assert_eq!(code(&diffmod(&["fixtures", "--check"])), 0);
    assert_eq!(code(&diffmod(&["--field", "Fp:7", "fixtures", "--check"])), 0);
}

#[test]
fn small_experiment_has_no_counterexamples() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("dumps");
    let out = diffmod(&["--json", "experiment", "--count", "20", "--dim", "2", "--seed", "3", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["counterexample_files"].as_array().map(Vec::len), Some(0));
    assert!(report["reports"].as_array().unwrap().iter().all(|r| r["satisfied"] == Value::Bool(true)));
}
