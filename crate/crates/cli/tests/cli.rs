use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn neel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_neel")).args(args).output().unwrap()
}

fn neel_with_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_neel")).env("NEEL_THREADS", threads).args(args).output().unwrap()
}

fn json_file(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout_json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn eval_w_single_wall() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = neel(&["eval-w", "--model", "unconfined", "--alpha", "1.5707963267948966", "--walls", "0:+1", "--out", out]);
    let v = stdout_json(&o);
    let w = v["W"].as_f64().unwrap();
    assert!((w - 0.577_215_664_901_532_9 * std::f64::consts::FRAC_PI_2).abs() < 1e-12, "{w}");
    assert_eq!(json_file(&dir.path().join("eval-w.json"))["W"], v["W"]);
    let table = std::fs::read_to_string(dir.path().join("walls.csv")).unwrap();
    assert!(table.starts_with("index,position,sign,self_term,gradient\n"));
    let m = json_file(&dir.path().join("run-manifest.json"));
    assert_eq!(m["config"]["command"], "eval-w");
}

#[test]
fn minimize_w_pair_is_symmetric() {
    let dir = tempfile::tempdir().unwrap();
    let o = neel(&[
        "minimize-w", "--model", "confined", "--alpha", "1.5708", "--n", "2", "--d", "+,-", "--out",
        dir.path().to_str().unwrap(),
    ]);
    let v = stdout_json(&o);
    assert_eq!(v["status"], "converged");
    let a: Vec<f64> = v["argmin"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((a[0] + a[1]).abs() < 1e-4, "{a:?}");
}

#[test]
fn leading_minus_sign_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let o = neel(&[
        "eval-w", "--model", "confined", "--alpha", "1.0", "--positions", "-0.5,0.5", "--d", "-,+", "--format",
        "json", "--out", dir.path().to_str().unwrap(),
    ]);
    let v = stdout_json(&o);
    assert_eq!(v["signs"], serde_json::json!([-1, 1]));
    assert!(dir.path().join("walls.json").exists());
}

#[test]
fn verify_specfun_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = neel(&["verify", "--suite", "specfun", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("PASS criterion  1"));
    assert!(text.contains("I0: measured -5.772157e-1"));
    let rows = std::fs::read_to_string(dir.path().join("verify.csv")).unwrap();
    assert!(rows.starts_with("criterion,suite,check,measured,expected,tolerance,kind,pass,informational\n"));
}

#[test]
fn invalid_input_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = neel(&["eval-w", "--model", "confined", "--alpha", "4.0", "--walls", "0:+1", "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    let o = neel(&["eval-w", "--model", "confined", "--alpha", "1.0", "--walls", "1.5:+1", "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    let o = neel(&["verify", "--suite", "nonsense", "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"model": "confined", "alpah": 1.0}"#).unwrap();
    let o = neel(&["eval-w", "--config", cfg.to_str().unwrap(), "--out", out]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"model": "confined", "alpha": 1.0, "positions": [-0.2, 0.3], "signs": [1, -1]}"#).unwrap();
    let out = dir.path().join("o");
    let o = neel(&["eval-w", "--config", cfg.to_str().unwrap(), "--alpha", "2.0", "--out", out.to_str().unwrap()]);
    let v = stdout_json(&o);
    assert_eq!(v["alpha"], 2.0);
    assert_eq!(v["positions"], serde_json::json!([-0.2, 0.3]));
    let m = json_file(&out.join("run-manifest.json"));
    assert_eq!(m["config"]["alpha"], 2.0);
    assert_eq!(m["config"]["model"], "confined");
}

#[test]
fn scan_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let o = neel(&[
        "scan", "--model", "confined", "--alpha", "0.2", "--n", "3", "--d", "-", "--path", "subblock", "--points",
        "6", "--svg", "--out", dir.path().to_str().unwrap(),
    ]);
    let v = stdout_json(&o);
    let w: Vec<f64> = v.as_array().unwrap().iter().map(|p| p["w"].as_f64().unwrap()).collect();
    assert!(w.windows(2).all(|p| p[1] < p[0]));
    let svg = std::fs::read_to_string(dir.path().join("scan.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
    assert!(std::fs::read_to_string(dir.path().join("scan.csv")).unwrap().starts_with("eta,w\n"));
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = neel_with_threads(
            &[
                "simulate", "--model", "confined", "--alpha", "1.5707963267948966", "--walls", "0:+1", "--epsilon",
                "0.05", "--nodes", "512", "--trace-every", "10", "--out", out.to_str().unwrap(),
            ],
            "2",
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let (a, b) = (run("a"), run("b"));
    for f in ["profile.csv", "trace.csv", "simulate.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let profile = std::fs::read_to_string(a.join("profile.csv")).unwrap();
    assert!(profile.starts_with("x,phi,m1,m2\n"));
    assert_eq!(profile.lines().count(), 513);
    let s = json_file(&a.join("simulate.json"));
    assert_eq!(s["status"], "converged");
    let m = json_file(&a.join("run-manifest.json"));
    assert_eq!(m["threads"], 2);
}

#[test]
fn fit_reports_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let o = neel(&[
        "fit", "--model", "confined", "--alpha", "1.5707963267948966", "--walls", "0:+1", "--nodes", "1024",
        "--epsilons", "0.05,0.02,0.005,0.002,0.0005", "--compare-positions", "0.4", "--out",
        dir.path().to_str().unwrap(),
    ]);
    let v = stdout_json(&o);
    let a = v["first"]["A"].as_f64().unwrap();
    assert!(a > 0.5 && a < 3.0, "{a}");
    assert!(v["paired"]["delta_w"].as_f64().unwrap() < 0.0);
    let rows = std::fs::read_to_string(dir.path().join("fit-points.csv")).unwrap();
    assert_eq!(rows.lines().count(), 11);
}

#[test]
fn fit_rejects_narrow_range() {
    let dir = tempfile::tempdir().unwrap();
    let o = neel(&[
        "fit", "--model", "confined", "--alpha", "1.0", "--walls", "0:+1", "--nodes", "256", "--epsilons",
        "0.01,0.02,0.03,0.04", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("decades"));
}
