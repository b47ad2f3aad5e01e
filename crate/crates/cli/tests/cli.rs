use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use varqdyn_cli::config::{self, Overrides};
use varqdyn_cli::run;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_varqdyn"));
    c.env_remove("VARQDYN_OUT_DIR");
    c
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run_config(dir: &Path, cfg: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg(cfg).arg("--out-dir").arg(dir.join("out")).args(extra).output().unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn report(dir: &Path, stem: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("out").join(format!("{stem}.report.json"))).unwrap()).unwrap()
}

const FREE_COMPARE: &str = r#"
model = "free"
method = "compare"
[initial]
a = [0.5, 0.0]
b = [0.3, 0.2]
[time]
dt = 1e-3
t_end = 1.0
stride = 50
"#;

#[test]
fn free_compare_columns_and_fidelity() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "free.toml", FREE_COMPARE);
    let out = run_config(dir.path(), &cfg, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("out/free.csv"));
    assert_eq!(header, ["t", "a_R", "a_I", "b_R", "b_I", "c_R", "c_I", "fidelity"]);
    assert_eq!(rows.len(), 21);
    assert_eq!(rows.last().unwrap()[0], 1.0);
    assert!(rows.last().unwrap()[7] >= 1.0 - 1e-6);
    let rep = report(dir.path(), "free");
    assert!(rep["diagnostics"]["frozen_final_fidelity"].as_f64().unwrap() < 0.99);
}

#[test]
fn gkls_equatorial_start_stays_on_disc() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "disc.toml",
        "model = \"gkls\"\n[initial]\nbloch = [0.3, -0.4, 0.0]\n[params]\nrate = 0.8\n[time]\ndt = 0.05\nt_end = 10.0\n",
    );
    let out = run_config(dir.path(), &cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = read_csv(&dir.path().join("out/disc.csv"));
    let z = header.iter().position(|h| h == "z").unwrap();
    assert_eq!(rows.len(), 201);
    assert!(rows.iter().all(|r| r[z] == 0.0));
}

#[test]
fn missing_omega_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "h.toml", "model = \"harmonic\"\n[initial]\na = [0.5, 0.0]\nb = [0.0, 0.0]\n");
    let out = run_config(dir.path(), &cfg, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("omega"));
    assert!(!dir.path().join("out/h.csv").exists());
}

#[test]
fn unknown_field_and_bad_values_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let typo = write_config(dir.path(), "t.toml", &FREE_COMPARE.replace("stride", "strid"));
    let out = run_config(dir.path(), &typo, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("strid"));
    let neg = write_config(dir.path(), "n.toml", FREE_COMPARE);
    let out = run_config(dir.path(), &neg, &["--dt", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dt"));
}

#[test]
fn numerical_failure_exits_one_with_module_text() {
    let dir = tempfile::tempdir().unwrap();
    // too wide for the default box: the initial state touches the boundary
    let cfg = write_config(dir.path(), "wide.toml", &FREE_COMPARE.replace("a = [0.5, 0.0]", "a = [0.001, 0.0]"));
    let out = run_config(dir.path(), &cfg, &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("boundary"), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn overrides_and_defaults_are_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "free.toml", FREE_COMPARE);
    let out = run_config(dir.path(), &cfg, &["--dt", "2e-3", "--t-end", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(dir.path(), "free");
    assert_eq!(rep["scenario"]["time"]["dt"].as_f64(), Some(2e-3));
    assert_eq!(rep["scenario"]["time"]["t_end"].as_f64(), Some(0.5));
    let defaults: Vec<&str> = rep["defaults_applied"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert!(defaults.iter().any(|d| d.starts_with("grid.n_points")));
    assert!(defaults.iter().any(|d| d.starts_with("initial.c")));
    let meta: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/free.meta.json")).unwrap()).unwrap();
    assert!(meta["created_unix"].as_u64().is_some());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "free.toml", FREE_COMPARE);
    let mut seen = Vec::new();
    for _ in 0..2 {
        assert_eq!(run_config(dir.path(), &cfg, &[]).status.code(), Some(0));
        seen.push((fs::read(dir.path().join("out/free.csv")).unwrap(), fs::read(dir.path().join("out/free.report.json")).unwrap()));
    }
    assert_eq!(seen[0], seen[1]);
}

#[test]
fn csv_values_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "free.toml", FREE_COMPARE);
    assert_eq!(run_config(dir.path(), &cfg, &[]).status.code(), Some(0));
    let (_, rows) = read_csv(&dir.path().join("out/free.csv"));
    let s = config::load(&cfg, Overrides::default()).unwrap();
    assert_eq!(run(&s).unwrap().rows, rows);
}

#[test]
fn out_dir_defaults_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "free.toml", FREE_COMPARE);
    let env_out = dir.path().join("from-env");
    let out = bin().arg("run").arg(&cfg).env("VARQDYN_OUT_DIR", &env_out).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(env_out.join("free.csv").exists());
}

#[test]
fn list_has_one_entry_per_criterion() {
    let out = bin().arg("list").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 13);
    for (k, line) in lines.iter().enumerate() {
        assert!(line.trim_start().starts_with(&(k + 1).to_string()));
        assert!(line.contains('(') && line.ends_with(')'), "{line}");
    }
}

#[test]
fn bundled_scenarios_run() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut count = 0;
    for entry in fs::read_dir(&root).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "toml") {
            let s = config::load(&p, Overrides::default()).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            let out = run(&s).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            assert!(!out.rows.is_empty());
            count += 1;
        }
    }
    assert!(count >= 10);
}
