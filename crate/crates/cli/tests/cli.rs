use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_euler-blowup"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("scenario.json");
    fs::write(&p, body).unwrap();
    p
}

fn csv_column(path: &Path, name: &str) -> Vec<String> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let idx = rdr.headers().unwrap().iter().position(|h| h == name).expect("column");
    rdr.records().map(|r| r.unwrap()[idx].to_string()).collect()
}

#[test]
fn constants_for_the_reference_weight() {
    let tmp = TempDir::new().unwrap();
    let o = run(&["constants"], &scenarios().join("ci1_exact.json"), tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let c = &json(&tmp.path().join("constants.json"))["constants"];
    assert_eq!(c["B"], 2.0);
    assert_eq!(c["C"], 2.0);
    assert_eq!(c["delta"], 2.0);
    assert_eq!(c["A2"], 4.0);
    assert!((c["K"].as_f64().unwrap() - 1.0).abs() < 1e-14);
    assert!((c["A1"].as_f64().unwrap() - 1.3569312194733779).abs() < 1e-12);
    assert!((c["energy"].as_f64().unwrap() - 40.05530633326986).abs() < 1e-10);
    assert!((c["G_plusplus"].as_f64().unwrap() - 4.905923119036242).abs() < 1e-10);
    assert!(String::from_utf8_lossy(&o.stdout).contains("A1"));
}

#[test]
fn invalid_gamma_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"case": "I", "gas": {"n": 1, "gamma": 1.0}, "weight": {"R": 1.0, "k": 2.0},
            "data": {"type": "exact", "a0": -7.0}}"#,
    );
    let o = run(&["constants"], &cfg, &tmp.path().join("out"));
    assert_eq!(code(&o), 64);
}

#[test]
fn unknown_key_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"case": "I", "gas": {"n": 1, "gamma": 3.0}, "weight": {"R": 1.0, "k": 2.0},
            "data": {"type": "exact", "a0": -7.0}, "tolerance": 1e-3}"#,
    );
    assert_eq!(code(&run(&["analyze"], &cfg, &tmp.path().join("out"))), 64);
}

#[test]
fn missing_files_are_io_errors() {
    let tmp = TempDir::new().unwrap();
    let o = run(&["constants"], &tmp.path().join("absent.json"), tmp.path());
    assert_eq!(code(&o), 74);
    let cfg = write_config(
        tmp.path(),
        r#"{"case": "I", "gas": {"n": 1, "gamma": 3.0}, "weight": {"R": 1.0, "k": 2.0},
            "data": {"type": "file", "path": "nowhere.csv"}}"#,
    );
    assert_eq!(code(&run(&["constants"], &cfg, tmp.path())), 74);
}

#[test]
fn bad_arguments_exit_64() {
    let o = Command::new(env!("CARGO_BIN_EXE_euler-blowup")).arg("analyze").output().unwrap();
    assert_eq!(code(&o), 64);
}

#[test]
fn exact_case_one_is_smooth_consistent() {
    let tmp = TempDir::new().unwrap();
    let o = run(&["analyze"], &scenarios().join("ci1_exact.json"), tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let header = fs::read_to_string(tmp.path().join("bounds.csv")).unwrap();
    assert!(header.starts_with("case,t,lower,upper,observed_sup,observed_inf,violation\n"));
    assert!(csv_column(&tmp.path().join("bounds.csv"), "violation").iter().all(|v| v == "false"));
    let report = json(&tmp.path().join("report.json"));
    assert_eq!(report["tool"], "euler-blowup");
    assert_eq!(report["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(report["config"]["data"]["a0"], -7.0);
    assert_eq!(report["exit_code"], 0);
}

#[test]
fn converging_case_two_is_certified() {
    let tmp = TempDir::new().unwrap();
    let o = run(&["analyze"], &scenarios().join("cii1_converging.json"), tmp.path());
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    let r = &json(&tmp.path().join("report.json"))["case_ii"];
    let s = &r["singularity"];
    assert_eq!(s["applies"], true);
    assert_eq!(s["n_value"].as_f64().unwrap(), 2.0 * r["energy_excess"].as_f64().unwrap());
    assert!((s["t2"].as_f64().unwrap() - 0.25 / 3f64.sqrt()).abs() < 1e-14);
    assert!(s["t1"].as_f64().unwrap() < s["t2"].as_f64().unwrap());
    assert_eq!(r["moment_bounds"]["lower_violations"], 0);
    assert_eq!(r["moment_bounds"]["supported_upper_violations"], 0);
}

#[test]
fn background_only_keeps_zero_excess() {
    let tmp = TempDir::new().unwrap();
    let o = run(&["analyze"], &scenarios().join("cii_background.json"), tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let q = csv_column(&tmp.path().join("moments.csv"), "Q");
    assert!(!q.is_empty());
    for v in q {
        assert!(v.parse::<f64>().unwrap().abs() <= 1e-10, "Q = {v}");
    }
}

#[test]
fn figure_curves() {
    let tmp = TempDir::new().unwrap();
    let o = run(&["figures"], &scenarios().join("ci1_exact.json"), tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut ids: Vec<String> = csv_column(&tmp.path().join("fig1_phase.csv"), "curve_id");
    ids.dedup();
    assert_eq!(ids, ["1", "2", "3", "4"]);
    let path = tmp.path().join("fig2_dynamics.csv");
    let ids = csv_column(&path, "curve_id");
    let g = csv_column(&path, "G");
    let q = csv_column(&path, "G_prime");
    let env: Vec<(f64, f64)> = ids
        .iter()
        .zip(g.iter().zip(&q))
        .filter(|(id, _)| *id == "3")
        .map(|(_, (g, q))| (g.parse().unwrap(), q.parse().unwrap()))
        .collect();
    let g_plus = json(&tmp.path().join("figures.json"))["G_plus"].as_f64().unwrap();
    assert!(env.contains(&(0.0, 0.0)));
    assert!(env.contains(&(g_plus, 0.0)));
}

#[test]
fn empty_phantom_search_writes_header_only() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"case": "I", "gas": {"n": 1, "gamma": 3.0}, "weight": {"R": 1.0, "k": 2.0},
            "data": {"type": "exact", "a0": -7.0}, "search": {"budget": 0, "exact_sweep": 0}}"#,
    );
    let o = run(&["phantom"], &cfg, &tmp.path().join("out"));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let log = fs::read_to_string(tmp.path().join("out/phantom_log.csv")).unwrap();
    assert_eq!(log.lines().count(), 1);
}

#[test]
fn seed_flag_overrides_config() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"case": "I", "gas": {"n": 1, "gamma": 3.0}, "weight": {"R": 1.0, "k": 2.0},
            "data": {"type": "exact", "a0": -7.0}, "search": {"budget": 25, "exact_sweep": 0}}"#,
    );
    assert_eq!(code(&run(&["phantom"], &cfg, &tmp.path().join("a"))), 64);
    let mut args = vec!["phantom", "--seed", "5"];
    assert_eq!(code(&run(&args, &cfg, &tmp.path().join("a"))), 0);
    args[2] = "6";
    assert_eq!(code(&run(&args, &cfg, &tmp.path().join("b"))), 0);
    let a = json(&tmp.path().join("a/phantom.json"));
    assert_eq!(a["seed"], 5);
    assert_eq!(a["evaluated"].as_u64().unwrap() + a["skipped"].as_u64().unwrap(), 25);
    let la = fs::read(tmp.path().join("a/phantom_log.csv")).unwrap();
    let lb = fs::read(tmp.path().join("b/phantom_log.csv")).unwrap();
    assert_ne!(la, lb);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    for (cmd, cfg) in [("analyze", "ci1_exact.json"), ("figures", "ci1_exact.json"), ("analyze", "cii_background.json")] {
        let cfg = scenarios().join(cfg);
        assert!(matches!(code(&run(&[cmd], &cfg, &out)), 0 | 2));
        let first: Vec<(PathBuf, Vec<u8>)> = files(&out);
        assert!(matches!(code(&run(&[cmd], &cfg, &out)), 0 | 2));
        assert_eq!(first, files(&out), "{cmd}");
        fs::remove_dir_all(&out).unwrap();
    }
}

fn files(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            let bytes = fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();
    v.sort();
    v
}
