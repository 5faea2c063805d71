use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conic-det")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("conic-det-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn khuri_torus_with_one_smooth_point() {
    let out = run(&["khuri", "--genus", "1", "--angles", "1"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["c_log_eps"], "0");
    assert_eq!(v["c_loglog"], "0");
    assert_eq!(v["divergence"], "bounded");
}

#[test]
fn khuri_genus_two() {
    let v = stdout_json(&run(&["khuri", "--genus", "2", "--angles", "3"]));
    assert_eq!(v["c_log_eps"], "-4/9");
    assert_eq!(v["divergence"], "to_plus_infinity");
}

#[test]
fn khuri_exact_fractions_and_constants() {
    let out = run(&[
        "khuri", "--genus", "1", "--angles", "1/2,3/2", "--volume", "1", "--logdet-m", "0.25", "--logdet-cones", "0.5,1.0",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["divergence"], "to_minus_infinity");
    assert_eq!(v["c_log_eps"], "1/9");
    assert!(v["c_const_symbolic"].as_object().unwrap().is_empty());
    let expected = 0.25 - 1.5 + 2.0 * std::f64::consts::LN_2;
    assert!((v["c_const_known"].as_f64().unwrap() - expected).abs() < 1e-14);
}

#[test]
fn missing_flag_is_a_usage_error() {
    let out = run(&["cone-det", "--length", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--alpha"));
    assert_eq!(run(&["cone-det", "--alpha", "x"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["cone-det", "--alpha", "-1"]).status.code(), Some(2));
}

#[test]
fn sweep_out_of_regime_needs_force() {
    assert_eq!(run(&["sweep", "--alpha", "2", "--eps-list", "0.5,0.1"]).status.code(), Some(4));
    assert_eq!(run(&["jump-det", "--alpha", "1", "--eps", "0.6"]).status.code(), Some(4));
    let out = run(&["sweep", "--alpha", "2", "--eps-list", "0.5,0.1", "--force"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 3);
}

#[test]
fn sweep_csv_shape_and_order() {
    let out = run(&["sweep", "--alpha", "1", "--eps-list", "0.025,0.25,0.1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "eps,logdet_r_numeric,logdet_r_asymptotic,residual,comeback_bound,paper_bound,runtime_seconds");
    let eps: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(eps, ["0.25", "0.1", "0.025"]);
    assert!(lines[1..].iter().all(|l| l.ends_with(",0")));
}

#[test]
fn output_is_identical_across_thread_counts() {
    let mut files = Vec::new();
    for threads in ["1", "3"] {
        let path = scratch(&format!("cone-{threads}.json"));
        let out = run(&[
            "cone-det", "--alpha", "2", "--cutoff", "5000", "--threads", threads, "--out", path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
        files.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let a = run(&["sweep", "--alpha", "3", "--eps-list", "0.1,0.05,0.01,0.001", "--threads", "1"]);
    let b = run(&["sweep", "--alpha", "3", "--eps-list", "0.1,0.05,0.01,0.001", "--threads", "4"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_fills_missing_flags_and_flags_win() {
    let cfg = scratch("jump.cfg");
    std::fs::write(&cfg, "# model run\nalpha = 2\neps = 0.1\nformat = csv\n").unwrap();
    let from_cfg = run(&["jump-det", "--config", cfg.to_str().unwrap()]);
    assert!(from_cfg.status.success());
    let text = String::from_utf8(from_cfg.stdout).unwrap();
    assert!(text.starts_with("logdet_eps_r,"));
    let overridden = run(&["jump-det", "--config", cfg.to_str().unwrap(), "--eps", "0.05", "--format", "json"]);
    let v = stdout_json(&overridden);
    let direct = stdout_json(&run(&["jump-det", "--alpha", "2", "--eps", "0.05"]));
    assert_eq!(v, direct);

    let bad = scratch("bad.cfg");
    std::fs::write(&bad, "alpha = 2\nangles = 1\n").unwrap();
    assert_eq!(run(&["jump-det", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn cone_scaling_between_lengths() {
    let at = |len: &str| {
        stdout_json(&run(&["cone-det", "--alpha", "2", "--length", len, "--oracle", "gy"]))["logdet"]
            .as_f64()
            .unwrap()
    };
    let diff = at("0.5") - at("1");
    assert!((diff + 2.0 * (5.0 / 24.0) * 0.5f64.ln()).abs() < 1e-4);
}

#[test]
fn verify_bfk_passes_at_default_cutoff() {
    let out = run(&["verify-bfk", "--alpha", "1", "--eps", "0.1", "--tol", "1e-3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert!(v["identity_residual"].as_f64().unwrap().abs() < 1e-3);
}

#[test]
fn verify_bfk_reports_inconclusive() {
    let out = run(&["verify-bfk", "--alpha", "2", "--eps", "0.1", "--tol", "1e-4", "--cutoff", "10000"]);
    assert_eq!(out.status.code(), Some(3));
}
