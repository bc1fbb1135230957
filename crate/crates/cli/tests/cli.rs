use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mkdv_cli::io::write_snapshot;
use mkdv_core::solitons::{soliton_field, SolitonParams};
use mkdv_core::spectral::GridSpec;
use serde_json::Value;

fn mkdv(dir: &Path, args: &[&str], config: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mkdv"));
    cmd.args(args).arg("--out").arg(dir.join("out"));
    if let Some(text) = config {
        let path = dir.join("run.cfg");
        fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Data rows of a commented CSV file.
fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn solve_soliton() {
    let dir = tempfile::tempdir().unwrap();
    let o = mkdv(dir.path(), &["solve"], Some("L = 64\nM = 1024\ndt = 1e-3\nT = 0.2\nrecord_every = 20\n"));
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("final relative L2 error vs exact soliton"));
    let out = dir.path().join("out");
    for f in ["invariants.csv", "trajectory.csv", "initial.snap", "final.snap", "summary.json"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let header = fs::read_to_string(out.join("invariants.csv")).unwrap();
    assert!(header.contains("# config_hash=") && header.contains("# grid L="));
    assert!(json(&out.join("summary.json"))["final_error"].as_f64().unwrap() < 1e-6);
}

#[test]
fn solve_zero_data_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let o = mkdv(dir.path(), &["solve"], Some("init = zero\nL = 64\nM = 256\ndt = 1e-3\nT = 0.1\nrecord_every = 10\n"));
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = rows(&dir.path().join("out/trajectory.csv"));
    assert!(rows.len() > 2);
    for r in rows {
        assert_eq!(r[1].parse::<f64>().unwrap(), 0.0);
        assert_eq!(r[2].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn missing_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_mkdv"))
        .args(["solve", "--config"])
        .arg(dir.path().join("absent.cfg"))
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_values_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let o = mkdv(dir.path(), &["solve"], Some("dt = soon\n"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`dt`"), "{}", stderr(&o));
    let o = mkdv(dir.path(), &["illposed"], Some("s = 0.125\nsteps = 3\n"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`steps`"), "{}", stderr(&o));
}

#[test]
fn illposed_default_plan_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = mkdv(dir.path(), &["illposed"], None);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let out = dir.path().join("out");
    assert_eq!(rows(&out.join("records.csv")).len(), 7);
    let verdict = json(&out.join("verdict.json"));
    assert_eq!(verdict["verdict"]["pass"], Value::Bool(true));
    assert!(verdict["plan"]["thresholds"].is_object());
}

#[test]
fn illposed_without_separation_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = mkdv(dir.path(), &["illposed"], Some("separation = 0\nN_max = 128\n"));
    assert_eq!(o.status.code(), Some(1), "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn illposed_negative_regime_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = mkdv(dir.path(), &["illposed"], Some("s = -0.125\ntheta = 0.55\n"));
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("verdict PASS"));
}

#[test]
fn resonance_probe_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = mkdv(dir.path(), &["probe", "--seed", "3"], Some("probes = resonance\nresonance_count = 100000\n"));
    assert!(o.status.success(), "{}", stderr(&o));
    let report = json(&dir.path().join("out/probes.json"));
    let r = &report["reports"][0];
    assert_eq!(r["corpus_size"], 100000);
    assert!(r["max_ratio"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn empty_probe_list() {
    let dir = tempfile::tempdir().unwrap();
    let o = mkdv(dir.path(), &["probe"], Some("probes =\n"));
    assert_eq!(o.status.code(), Some(0));
    let report = json(&dir.path().join("out/probes.json"));
    assert_eq!(report["reports"].as_array().unwrap().len(), 0);
}

#[test]
fn norms_of_sech() {
    let dir = tempfile::tempdir().unwrap();
    let grid = GridSpec::new(2.0 * std::f64::consts::PI * 16.0, 2048).unwrap();
    let f = soliton_field(&SolitonParams::new(0.0, 1.0).unwrap(), 0.0, &grid).unwrap();
    let snap = dir.path().join("sech.snap");
    write_snapshot(&snap, &f).unwrap();
    let config = format!("input = {}\ns = 0\np = 2\n", snap.display());
    let o = mkdv(dir.path(), &["norms"], Some(&config));
    assert!(o.status.success(), "{}", stderr(&o));
    let norms = json(&dir.path().join("out/norms.json"));
    let sobolev = norms["sobolev"].as_f64().unwrap();
    assert!((sobolev - 2f64.sqrt()).abs() < 1e-10, "{sobolev}");
    let modulation = norms["modulation"].as_f64().unwrap();
    assert!(modulation > 0.25 * sobolev && modulation < 4.0 * sobolev);
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "init = random\nL = 50.26548245743669\nM = 256\ndt = 1e-3\nT = 0.05\nrecord_every = 10\n";
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    fs::create_dir_all(&a).unwrap();
    fs::create_dir_all(&b).unwrap();
    mkdv(&a, &["solve", "--seed", "9"], Some(cfg));
    mkdv(&b, &["solve", "--seed", "9", "--jobs", "2"], Some(cfg));
    for f in ["invariants.csv", "trajectory.csv", "final.snap"] {
        assert_eq!(fs::read(a.join("out").join(f)).unwrap(), fs::read(b.join("out").join(f)).unwrap(), "{f}");
    }
}
