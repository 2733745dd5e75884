use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = r#"
experiment = "stability"
delta = 0.5

[system]
name = "semilinear-bilinear"

[profile]
name = "sech"
amplitude = 1.0

[grid]
x_min = -20.0
x_max = 20.0
nx = 201
t_end = 1.0

[data]
shape = "gaussian"
width = 2.0
epsilon = 1e-3
"#;

fn travwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_travwave")).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("cfg.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn run_writes_outputs_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out_dir = dir.path().join("out");
    let out = travwave(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let printed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(printed["status"], "pass");
    for name in ["summary.json", "timing.json", "run.csv", "run_energy.svg"] {
        assert!(out_dir.join(name).exists(), "{name}");
    }
    let written: serde_json::Value = serde_json::from_slice(&fs::read(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(written, printed);
}

#[test]
fn quiet_prints_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out_dir = dir.path().join("out");
    let out = travwave(&["run", "--quiet", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
}

#[test]
fn check_flags_a_structure_violation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("semilinear-bilinear", "violating-F"));
    let out_dir = dir.path().join("check");
    let out = travwave(&["check", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(out_dir.join("check.json").exists());

    let cfg = write_config(dir.path(), SMALL);
    assert_eq!(code(&travwave(&["check", "--quiet", "--config", &cfg])), 0);
}

#[test]
fn input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("typo = 1\n{SMALL}"));
    let out = travwave(&["run", "--config", &cfg]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("typo"));

    assert_eq!(code(&travwave(&["run", "--config", "/nonexistent/cfg.toml"])), 1);
    assert_eq!(code(&travwave(&["run"])), 1);
    assert_eq!(code(&travwave(&["frobnicate"])), 1);

    let cfg = write_config(dir.path(), SMALL);
    assert_eq!(code(&travwave(&["convergence", "--config", &cfg])), 1);
    assert_eq!(code(&travwave(&["--help"])), 0);
}

#[test]
fn boundary_contamination_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    // A wide right-moving pulse reaches the edge well before t_end.
    let text = SMALL
        .replace("t_end = 1.0", "t_end = 15.0")
        .replace("width = 2.0", "width = 2.0\nmotion = \"right\"");
    let cfg = write_config(dir.path(), &text);
    let out_dir = dir.path().join("out");
    let out = travwave(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stdout));
    let printed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(printed["termination"], "boundary-contamination");
}

#[test]
fn sweep_subcommand_writes_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "{}\n[sweep]\nepsilon = [1e-3, 2e-3]\n",
        SMALL.replace("\"stability\"", "\"sweep\"")
    );
    let cfg = write_config(dir.path(), &text);
    let out_dir = dir.path().join("out");
    let out = travwave(&["sweep", "--quiet", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let table = fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
    assert!(table.starts_with("run,epsilon,amplitude,status,"));
    assert!(out_dir.join("run-001/summary.json").exists());
}
