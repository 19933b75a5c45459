use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rotor-interferometer"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn sidecar(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn error_of(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(text.lines().last().expect("error line")).expect("json error")
}

fn entries(dir: &Path) -> usize {
    fs::read_dir(dir).unwrap().count()
}

#[test]
fn echo_returns_to_zero_momentum() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("echo.cfg"), "# reference echo\nN = 50\nphi_d = 0.5\neps_s = 0\n")
        .unwrap();
    let out = run(dir.path(), &["echo", "--config", "echo.cfg", "--out", "echo.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = sidecar(dir.path(), "echo.json");
    assert_eq!(doc["format_version"], 1);
    assert!((doc["metrics"]["I"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    let tt = doc["derived"]["talbot_time_s"].as_f64().unwrap();
    assert!((tt - 64.73e-6).abs() < 0.05e-6);
    let csv = fs::read_to_string(dir.path().join("echo.csv")).unwrap();
    assert!(csv.starts_with("n,eps_s,p0_hbar_kappa,a_m_per_s2,output\r\n"));
}

#[test]
fn sidecar_reproduces_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 3] = [
        &["scan-eps", "--set", "n=12", "--set", "phi_d=0.7", "--points", "40"],
        &["scan-accel", "--set", "N=10", "--set", "gamma=10", "--set", "tau_p_us=0.8"],
        &[
            "finite-scan",
            "--set",
            "n=6",
            "--set",
            "gamma=10",
            "--set",
            "tau_p_us=2",
            "--range=-2e-8,3e-8",
            "--points",
            "33",
        ],
    ];
    for (i, args) in runs.iter().enumerate() {
        let first = format!("a{i}.csv");
        let second = format!("b{i}.csv");
        let mut a = args.to_vec();
        a.extend(["--out", &first]);
        let out = run(dir.path(), &a);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let json = format!("a{i}.json");
        let out = run(dir.path(), &[args[0], "--config", &json, "--out", &second, "--parallel", "1"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let x = fs::read(dir.path().join(&first)).unwrap();
        let y = fs::read(dir.path().join(&second)).unwrap();
        assert_eq!(x, y, "{} did not round-trip", args[0]);
    }
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.cfg"), "n = 8\nphi_d = 0.5\npoints = 100\n").unwrap();
    let out = run(dir.path(), &["scan-p0", "--config", "s.cfg", "--points", "36", "--out", "s.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert_eq!(csv.lines().count(), 37);
    assert_eq!(sidecar(dir.path(), "s.json")["config"]["points"], 36);
}

#[test]
fn validation_failures_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.cfg"), "n = 8\nphi_d = 0.5\nbogus = 1\n").unwrap();
    let before = entries(dir.path());
    let cases: [&[&str]; 5] = [
        &["echo", "--config", "bad.cfg", "--out", "x.csv"],
        &["echo", "--set", "n=0", "--set", "phi_d=1", "--out", "x.csv"],
        &["echo", "--set", "n=4", "--out", "x.csv"],
        &["scan-eps", "--set", "n=4", "--set", "phi_d=1", "--range=1e-9,-1e-9", "--out", "x.csv"],
        &["echo", "--set", "n=4", "--set", "phi_d=1", "--out", "x.json"],
    ];
    for args in cases {
        let out = run(dir.path(), args);
        assert_eq!(out.status.code(), Some(3), "{args:?}");
        let err = error_of(&out);
        assert_eq!(err["error"]["category"], "validation");
        assert_eq!(entries(dir.path()), before, "{args:?} left files behind");
    }
}

#[test]
fn error_categories_have_their_own_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["no-such-kind"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["error"]["category"], "usage");

    let out = run(dir.path(), &["echo", "--config", "missing.cfg"]);
    assert_eq!(out.status.code(), Some(7));

    let out = run(
        dir.path(),
        &["echo", "--set", "n=4", "--set", "phi_d=1", "--out", "no/such/dir/x.csv"],
    );
    assert_eq!(out.status.code(), Some(7));
    assert_eq!(error_of(&out)["error"]["category"], "io");

    // a flat line shape has no peak to measure
    let out = run(dir.path(), &["fit-scaling", "--set", "phi_d=0", "--set", "n_list=4,8", "--out", "f.csv"]);
    assert!(matches!(out.status.code(), Some(3) | Some(6)), "{:?}", out.status);
    assert!(!dir.path().join("f.csv").exists());
}

#[test]
fn momentum_history_has_one_row_per_kick() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["momentum-history", "--set", "n=50", "--set", "phi_d=0.5", "--set", "eps_s=3e-9", "--out", "h.csv"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = sidecar(dir.path(), "h.json");
    let (lo, hi) = (doc["metrics"]["q_min"].as_i64().unwrap(), doc["metrics"]["q_max"].as_i64().unwrap());
    let csv = fs::read_to_string(dir.path().join("h.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 1 + 100);
    assert_eq!(lines[0].split(',').count(), 2 + (hi - lo + 1) as usize);
    let final_pops: f64 = lines[100].split(',').skip(2).map(|s| s.parse::<f64>().unwrap()).sum();
    assert!((final_pops - 1.0).abs() < 1e-9);
}

#[test]
fn peak_shift_and_tau_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["peak-shift", "--set", "n=8", "--set", "gamma=10", "--set", "tau_p_us=2", "--out", "p.csv"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = sidecar(dir.path(), "p.json");
    assert!(doc["metrics"]["max_relative_difference"].as_f64().unwrap() < 0.05);

    let out = run(
        dir.path(),
        &["tau-min-sweep", "--set", "gamma=10", "--set", "n_list=8,16", "--out", "t.csv"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("t.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|s| s.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        // collapsed width and duration land near 33 µs and 22 µs
        assert!((r[3] / 33e-6 - 1.0).abs() < 0.2, "{r:?}");
        assert!((r[4] / 22e-6 - 1.0).abs() < 0.2, "{r:?}");
    }
}
