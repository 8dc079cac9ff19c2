use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use grushin::grid::{Axis, GridFunction};
use num_complex::Complex64;
use serde_json::Value;

fn grushin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grushin")).args(args).env("GRUSHIN_THREADS", "1").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn gaussian_grid(path: &Path) -> GridFunction {
    let axes = vec![Axis::new(-6.0, 6.0, 65).unwrap(), Axis::centered(32, 0.5).unwrap()];
    let f = GridFunction::from_fn(axes, |p| Complex64::new((-(p[0] * p[0]) / 2.0 - p[1] * p[1] / 2.0).exp(), 0.0));
    f.write_to(fs::File::create(path).unwrap()).unwrap();
    f
}

#[test]
fn hermite_suite_passes_and_reports_gram() {
    let o = grushin(&["verify", "hermite"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    let gram = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "gram_nd_analysis").unwrap();
    assert!(gram["measured"].as_f64().unwrap() < 1e-10);
    assert!(v["version"].as_str().unwrap().starts_with("grushin "));
    assert_eq!(v["config"]["suite"], "hermite");
}

#[test]
fn unknown_suite_is_a_config_error() {
    let o = grushin(&["verify", "nope"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown suite"));
}

#[test]
fn undersampled_representation_fails_with_measurement() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let o = grushin(&["verify", "representation", "--samples", "10", "--report", report.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let first = &v["checks"][0];
    assert_eq!(first["pass"], false);
    assert!(first["measured"].as_f64().unwrap() > 0.05);
}

#[test]
fn minimal_sweep_is_the_l2_anchor_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = grushin(&["sweep", "--dims", "1", "--exponents", "2", "--trials", "1", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = fs::read_to_string(&a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,p,epsilon,estimate,stderr,seed,trial_id,grid_hash");
    assert_eq!(lines.len(), 2);
    let est: f64 = lines[1].split(',').nth(3).unwrap().parse().unwrap();
    assert!((est - 2f64.sqrt()).abs() < 1e-3);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let side: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("a.csv.json")).unwrap()).unwrap();
    assert_eq!(side["config"]["trials"], "1");
    assert!(side["version"].is_string());
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# sweep\ndims = 1\nexponents = 4\ntrials = 5\nseed = 3\n").unwrap();
    let out = dir.path().join("s.csv");
    let o = grushin(&["--config", cfg.to_str().unwrap(), "sweep", "--trials", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let side: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("s.csv.json")).unwrap()).unwrap();
    assert_eq!(side["config"]["trials"], "1");
    assert_eq!(side["config"]["seed"], "3");
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("1,4.0,"));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "colour = blue\n").unwrap();
    assert_eq!(code(&grushin(&["--config", bad.to_str().unwrap(), "verify", "hermite"])), 2);
    assert_eq!(
        code(&grushin(&[
            "sweep",
            "--dims",
            "1",
            "--exponents",
            "2",
            "--trials",
            "1",
            "--out",
            "/nonexistent/dir/x.csv"
        ])),
        2
    );
    assert_eq!(code(&grushin(&["sweep", "--dims", "9", "--out", dir.path().join("x.csv").to_str().unwrap()])), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_grushin"))
        .args(["kernel", "--eval", "p", "--at", "0,0,0"])
        .env("GRUSHIN_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn apply_round_trips_grid_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.grd");
    let f = gaussian_grid(&input);
    let out = dir.path().join("v.grd");
    let o =
        grushin(&["apply", "--transform", "vector", "--in", input.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let g = GridFunction::read_from(fs::File::open(&out).unwrap()).unwrap();
    assert!(g.same_grid(&f));
    let ratio = grushin::sweep::sweep_lp_norm(&g, 2.0) / grushin::sweep::sweep_lp_norm(&f, 2.0);
    assert!((ratio - 2f64.sqrt()).abs() < 1e-3, "{ratio}");

    let r = dir.path().join("r.grd");
    let o = grushin(&[
        "apply",
        "--transform",
        "riesz",
        "--j",
        "1",
        "--epsilon",
        "0.5",
        "--in",
        input.to_str().unwrap(),
        "--out",
        r.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let side: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.grd.json")).unwrap()).unwrap();
    assert_eq!(side["config"]["epsilon"], "0.5");

    let o = grushin(&[
        "apply",
        "--transform",
        "riesz",
        "--j",
        "2",
        "--in",
        input.to_str().unwrap(),
        "--out",
        r.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    let o = grushin(&[
        "apply",
        "--transform",
        "riesz",
        "--in",
        dir.path().join("missing").to_str().unwrap(),
        "--out",
        r.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn apply_monte_carlo_writes_stderr_grid() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.grd");
    let axes = vec![Axis::new(-4.0, 4.0, 9).unwrap(), Axis::centered(8, 0.5).unwrap()];
    let f = GridFunction::from_fn(axes, |p| Complex64::new((-(p[0] * p[0]) - p[1] * p[1]).exp(), 0.0));
    f.write_to(fs::File::create(&input).unwrap()).unwrap();
    let out = dir.path().join("mc.grd");
    let o = grushin(&[
        "apply",
        "--transform",
        "riesz-mc",
        "--epsilon",
        "0.5",
        "--samples",
        "500",
        "--seed",
        "4",
        "--in",
        input.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let se = GridFunction::read_from(fs::File::open(dir.path().join("mc.grd.stderr")).unwrap()).unwrap();
    assert!(se.same_grid(&f));
    let o =
        grushin(&["apply", "--transform", "riesz-mc", "--in", input.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn kernel_evaluations() {
    let o = grushin(&["kernel", "--eval", "q", "--at", "2,0,0"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    // e^{-1}/(4π)
    assert!((v["result"]["q"].as_f64().unwrap() - 0.029_274_915_762_159_584).abs() < 1e-15);
    let o = grushin(&["kernel", "--eval", "grad", "--at", "0.3,-0.2,0.5"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["components"].as_array().unwrap().len(), 1);
    assert_eq!(code(&grushin(&["kernel", "--eval", "p", "--at", "1,2"])), 2);
    assert_eq!(code(&grushin(&["kernel", "--eval", "grad", "--s", "2", "--at", "0,0,1"])), 2);
}
