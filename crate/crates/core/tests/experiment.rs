//! Config handling, output files and the command-line front end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use adagrad_bias::experiment::{
    check_experiment, figure_data, run_experiment, sweep, ExperimentConfig, SweepAxis,
};
use adagrad_bias::{Error, Optimizer};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn load(name: &str, out: &Path, iters: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::load(&configs().join(name)).unwrap();
    cfg.outputs = out.to_path_buf();
    cfg.hyperparams.max_iters = iters;
    cfg
}

#[test]
fn bundled_configs_parse() {
    let mut count = 0;
    for entry in fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ExperimentConfig::load(&path).unwrap();
        let (data, hp) = cfg.resolve().unwrap();
        assert_eq!(hp.w0.len(), data.dim(), "{}", path.display());
        assert!(cfg.runs.contains(&Optimizer::AdaGrad));
        count += 1;
    }
    assert!(count >= 5);
}

#[test]
fn run_outputs_are_byte_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = run_experiment(&load("obtuse_pair.json", a.path(), 5_000)).unwrap();
    run_experiment(&load("obtuse_pair.json", b.path(), 5_000)).unwrap();
    let mut names: Vec<String> = first
        .files
        .iter()
        .map(|f| f.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    names.sort();
    for expected in ["checks.json", "corner.json", "dataset.csv", "direction_report.json", "trajectory_adagrad.csv", "trajectory_gd.csv"] {
        assert!(names.iter().any(|n| n == expected), "missing {expected} in {names:?}");
    }
    for n in &names {
        assert_eq!(fs::read(a.path().join(n)).unwrap(), fs::read(b.path().join(n)).unwrap(), "{n} differs");
    }
}

#[test]
fn generated_dataset_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_experiment(&load("random_logistic.json", a.path(), 2_000)).unwrap();
    run_experiment(&load("random_logistic.json", b.path(), 2_000)).unwrap();
    let read = |d: &Path| fs::read(d.join("dataset.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn check_writes_only_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = check_experiment(&load("mirrored_theta60.json", dir.path(), 100_000)).unwrap();
    assert!(out.all_checks_hold(), "{:?}", out.checks);
    let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, vec![std::ffi::OsString::from("checks.json")]);
}

#[test]
fn figure_files() {
    let dir = tempfile::tempdir().unwrap();
    let fig = figure_data(&load("acute_pair.json", dir.path(), 10_000)).unwrap();
    assert_eq!(fig.h_inf.len(), 2);
    for f in ["region.csv", "ellipse.csv", "arrows.csv", "tangency.csv"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
}

#[test]
fn figure_requires_planar_data() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = load("random_logistic.json", dir.path(), 100);
    assert!(figure_data(&cfg).is_err());
}

#[test]
fn empty_runs_rejected() {
    let text = fs::read_to_string(configs().join("obtuse_pair.json")).unwrap();
    let text = text.replace(r#""runs": ["adagrad", "gd"]"#, r#""runs": []"#);
    assert!(matches!(ExperimentConfig::from_json(&text), Err(Error::Config(_))));
}

#[test]
fn empty_sweep_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = load("obtuse_pair.json", dir.path(), 100);
    assert!(matches!(sweep(&cfg, SweepAxis::Eta, &[]), Err(Error::Config(_))));
}

#[test]
fn sweep_writes_one_report_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = load("obtuse_pair.json", dir.path(), 2_000);
    let entries = sweep(&cfg, SweepAxis::Epsilon, &[1e-8, 1e-4, 1e-1]).unwrap();
    assert_eq!(entries.len(), 3);
    for k in 0..3 {
        assert!(dir.path().join(format!("sweep_epsilon_{k}.json")).is_file());
    }
    let summary = fs::read_to_string(dir.path().join("sweep_epsilon_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 4);
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_adagrad-bias")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let obtuse = configs().join("obtuse_pair.json");
    let obtuse = obtuse.to_str().unwrap();

    let (code, stdout, _) = cli(&["check", obtuse, "--out", out, "--max-iters", "100000"]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.lines().all(|l| l.starts_with("PASS")));

    let (code, stdout, _) = cli(&["check", obtuse, "--out", out, "--max-iters", "1000"]);
    assert_eq!(code, 1);
    assert!(stdout.contains("FAIL"));

    let (code, _, stderr) = cli(&["run", "missing.json", "--out", out]);
    assert_eq!(code, 2);
    assert!(stderr.contains("missing.json"));

    let (code, stdout, _) = cli(&["sweep", obtuse, "--axis", "w0", "--values", "0,0.5", "--out", out, "--max-iters", "1000"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().count(), 2);

    let (code, _, _) = cli(&["sweep", obtuse, "--axis", "momentum", "--values", "1", "--out", out]);
    assert_eq!(code, 2);

    let (code, stdout, _) = cli(&["figure-data", obtuse, "--out", out, "--max-iters", "1000"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("tangency"));
}

#[test]
fn cli_step_size_gate() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(configs().join("obtuse_pair.json")).unwrap();
    let cfg = dir.path().join("big_step.json");
    fs::write(&cfg, text.replace(r#""eta": 0.1"#, r#""eta": 50.0"#)).unwrap();
    let cfg = cfg.to_str().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    let (code, _, stderr) = cli(&["check", cfg, "--out", out, "--max-iters", "100"]);
    assert_eq!(code, 2, "{stderr}");
    let (code, _, _) = cli(&["check", cfg, "--out", out, "--max-iters", "100", "--override-assumptions"]);
    assert_ne!(code, 2);
}
