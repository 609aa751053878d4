use std::path::PathBuf;
use std::process::{Command, Output};

fn beam_nf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_beam-nf")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write_config(dir: &tempfile::TempDir, text: &str) -> String {
    let p = dir.path().join("run.ini");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn csv_column(text: &str, col: usize) -> Vec<f64> {
    text.lines().skip(1).map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect()
}

#[test]
fn freq_lists_squares_at_zero_force() {
    let o = beam_nf(&["freq", "--m", "0", "--j-max", "3", "--format", "csv"]);
    assert!(o.status.success());
    assert_eq!(csv_column(&stdout(&o), 1), vec![1.0, 4.0, 9.0]);
}

#[test]
fn freq_examples_with_force() {
    let o = beam_nf(&["freq", "--m", "1", "--j-max", "1", "--format", "csv"]);
    assert_eq!(csv_column(&stdout(&o), 1), vec![2f64.sqrt()]);
    let o = beam_nf(&["freq", "--m", "-0.5", "--j-max", "2", "--format", "csv"]);
    assert_eq!(csv_column(&stdout(&o), 1)[1], 14f64.sqrt());
}

#[test]
fn fourth_order_certification_passes() {
    let o = beam_nf(&["resonances", "--order", "4", "--m", "0", "--i-max", "2000", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["bound"], 2.0);
}

#[test]
fn sixth_order_certification() {
    let o = beam_nf(&["resonances", "--order", "6", "--m", "0", "--i-max", "100"]);
    assert_eq!(o.status.code(), Some(2));
    let o = beam_nf(&["resonances", "--order", "6", "--m", "1", "--i-max", "300", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["min_abs_delta"].as_f64().unwrap() >= 0.875);
}

#[test]
fn bnf_reports_small_residuals_and_threshold() {
    let o = beam_nf(&["bnf", "--m", "1", "--n", "12", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["normal_form"]["residual4"].as_f64().unwrap() <= 1e-12);
    assert!((v["constants"]["eps0"].as_f64().unwrap() - 0.1345).abs() < 1e-4);
    let o = beam_nf(&["bnf", "--m", "0", "--order", "6"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn linear_simulation_keeps_every_action() {
    let o = beam_nf(&[
        "simulate", "--linear", "true", "--n", "6", "--t-end", "2", "--stride", "100", "--format", "csv", "--actions", "6",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    for col in 5..11 {
        let a = csv_column(&text, col);
        assert!(a.iter().all(|x| (x - a[0]).abs() <= 1e-15), "column {col}");
    }
}

#[test]
fn verify_reports_and_refuses_sixth_order_at_zero_force() {
    let o = beam_nf(&["verify", "--m", "0", "--eps", "0.1", "--n", "8", "--budget", "5000", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
    let o = beam_nf(&["verify", "--estimate", "6", "--m", "0", "--budget", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn default_table_has_ten_rows() {
    let cfg = configs().join("fig1.ini");
    let o = beam_nf(&["--config", cfg.to_str().unwrap(), "fig1", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 11);
    // Al 7075, L = 2, m = 0
    let t = csv_column(&text, 7);
    assert!((t[3] - 59.0).abs() / 59.0 < 0.05);
}

#[test]
fn single_custom_table_row() {
    let cfg = configs().join("custom_beam.ini");
    let o = beam_nf(&["--config", cfg.to_str().unwrap(), "fig1", "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    // ν = π² sqrt(E I / (ρ A)) / L² with I/A = h²/12
    let h: f64 = 0.03;
    let nu = std::f64::consts::PI.powi(2) * (200e9 * h * h / 12.0 / 7850.0).sqrt() / 9.0;
    let got = csv_column(&text, 6)[0];
    assert!((got - nu).abs() <= 1e-12 * nu);
}

#[test]
fn empty_or_bad_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write_config(&dir, "");
    assert_eq!(beam_nf(&["--config", &empty, "fig1"]).status.code(), Some(64));
    let bad = write_config(&dir, "[freq]\nm = 0\ncolour = blue\n");
    assert_eq!(beam_nf(&["--config", &bad, "freq"]).status.code(), Some(64));
    let section = write_config(&dir, "[nonsense]\nm = 0\n");
    assert_eq!(beam_nf(&["--config", &section, "freq"]).status.code(), Some(64));
    assert_eq!(beam_nf(&["freq", "--bogus"]).status.code(), Some(64));
    assert_eq!(beam_nf(&["resonances", "--order", "5"]).status.code(), Some(64));
}

#[test]
fn flags_override_config_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "format = csv\n[freq]\nm = 1\nj_max = 2\n");
    let o = beam_nf(&["--config", &cfg, "freq"]);
    assert_eq!(csv_column(&stdout(&o), 1), vec![2f64.sqrt(), 20f64.sqrt()]);
    let o = beam_nf(&["--config", &cfg, "freq", "--m", "0"]);
    assert_eq!(csv_column(&stdout(&o), 1), vec![1.0, 4.0]);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = beam_nf(&[
            "simulate", "--profile", "random", "--seed", "7", "--n", "6", "--t-end", "0.5", "--format", "csv", "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let j1 = beam_nf(&["bnf", "--m", "0.5", "--n", "8", "--format", "json"]);
    let j2 = beam_nf(&["bnf", "--m", "0.5", "--n", "8", "--format", "json"]);
    assert_eq!(j1.stdout, j2.stdout);
}
