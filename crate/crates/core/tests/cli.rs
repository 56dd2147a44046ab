use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qlimits(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlimits"))
        .args(args)
        .env_remove("QLIMITS_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.header"));
    std::fs::read_to_string(p).unwrap()
}

fn header(csv: &str) -> String {
    format!("{}\n", csv.lines().next().unwrap())
}

fn column(csv: &str, i: usize) -> Vec<f64> {
    csv.lines().skip(1).map(|l| l.split(',').nth(i).unwrap().parse().unwrap()).collect()
}

#[test]
fn kernel_closed_form_matches_oracle() {
    let csv = stdout(&qlimits(&[
        "kernel", "--mode", "one-way", "--x-min", "0.01", "--x-max", "100", "--points", "50", "--log",
    ]));
    assert_eq!(header(&csv), golden("kernel"));
    let diffs = column(&csv, 3);
    assert_eq!(diffs.len(), 50);
    assert!(diffs.iter().all(|&d| d <= 1e-10));
    let xs = column(&csv, 0);
    assert!((xs[0] - 0.01).abs() < 1e-15 && (xs[49] - 100.0).abs() < 1e-10);
}

#[test]
fn crossover_is_inverse_root_three_pi() {
    let v: Value = serde_json::from_str(&stdout(&qlimits(&["crossover", "--phi", "1", "--b", "1"]))).unwrap();
    let ratio = v["m_star_over_planck"].as_f64().unwrap();
    assert!((ratio - 1.0 / (3.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
    assert!((ratio - 0.3257).abs() < 1e-4);
    assert_eq!(v["units"], "SI");
    assert!((v["m_star_kg"].as_f64().unwrap() / 7.09e-9 - 1.0).abs() < 1e-2);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = qlimits(&["kernel", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert_eq!(qlimits(&["transmogrify"]).status.code(), Some(2));
    assert_eq!(qlimits(&["simulate", "--omega-min", "0.001", "--n", "1024"]).status.code(), Some(2));
}

#[test]
fn numerical_failure_reports_json() {
    let out = qlimits(&["kernel", "--x-min", "300", "--x-max", "400", "--points", "2", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(diag["error"], "numerical");
    assert!(diag["estimate"].as_f64().is_some());
}

#[test]
fn csv_headers_match_golden_files() {
    let td = stdout(&qlimits(&["timedomain", "--points", "5"]));
    assert_eq!(header(&td), golden("timedomain"));
    let fp = stdout(&qlimits(&["first-principles", "--omega", "1", "--format", "csv"]));
    assert_eq!(header(&fp), golden("first_principles"));
    let bu = stdout(&qlimits(&["budget", "--points", "3"]));
    assert_eq!(header(&bu), golden("budget"));
    let si = stdout(&qlimits(&["simulate", "--n", "256", "--omega-min", "1"]));
    assert_eq!(header(&si), golden("simulate"));
    let ps = stdout(&qlimits(&["psd", "--n", "1024", "--segment", "256", "--omega-min", "0.1"]));
    assert_eq!(header(&ps), golden("psd"));
}

#[test]
fn budget_rows_name_the_dominant_source() {
    let csv = stdout(&qlimits(&["budget", "--mass", "1e-9", "--omega-min", "1", "--omega-max", "1e4", "--points", "4", "--log"]));
    assert_eq!(csv.lines().count(), 5);
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let vals: Vec<f64> = f[1..4].iter().map(|s| s.parse().unwrap()).collect();
        let max = vals.iter().cloned().fold(0.0, f64::max);
        let idx = vals.iter().position(|&v| v == max).unwrap();
        assert_eq!(f[4], ["SQL", "VQL", "GQL"][idx]);
    }
}

#[test]
fn json_outputs_carry_units() {
    let fp: Value = serde_json::from_str(&stdout(&qlimits(&[
        "first-principles", "--mode", "two-way", "--omega", "2", "--format", "json",
    ])))
    .unwrap();
    assert_eq!(fp["units"], "natural");
    assert!(fp["rel_err"].as_f64().unwrap() < 1e-6);
    let k: Value = serde_json::from_str(&stdout(&qlimits(&["kernel", "--points", "3", "--format", "json"]))).unwrap();
    assert_eq!(k["units"], "natural");
    let c: Value = serde_json::from_str(&stdout(&qlimits(&["crossover", "--units", "natural"]))).unwrap();
    assert_eq!(c["units"], "natural");
}

#[test]
fn simulate_files_and_psd_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("q.csv");
    let bin = dir.path().join("q.bin");
    let common = ["simulate", "--n", "16384", "--dt", "0.1", "--seed", "7", "--omega-min", "0.05"];
    let a = qlimits(&[&common[..], &["-o", csv.to_str().unwrap()]].concat());
    assert!(a.status.success());
    let b = qlimits(&[&common[..], &["--format", "bin", "-o", bin.to_str().unwrap()]].concat());
    assert!(b.status.success());

    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("q.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 7);
    assert_eq!(meta["n_samples"], 16384);
    assert_eq!(meta["units"], "natural");

    let text = std::fs::read_to_string(&csv).unwrap();
    let qs = column(&text, 1);
    let raw = std::fs::read(&bin).unwrap();
    assert_eq!(raw.len(), 16384 * 8);
    for (q, chunk) in qs.iter().zip(raw.chunks_exact(8)) {
        assert_eq!(*q, f64::from_le_bytes(chunk.try_into().unwrap()));
    }

    let psd_args = ["psd", "--n", "16384", "--dt", "0.1", "--omega-min", "0.05", "--segment", "1024"];
    let from_file = stdout(&qlimits(&[&psd_args[..], &["--input", bin.to_str().unwrap()]].concat()));
    let fresh = stdout(&qlimits(&[&psd_args[..], &["--seed", "7"]].concat()));
    assert_eq!(from_file, fresh);

    let (est, lo, hi) = (column(&fresh, 1), column(&fresh, 3), column(&fresh, 4));
    let checked: Vec<usize> = (0..est.len()).filter(|&i| hi[i] > 0.0).collect();
    let inside = checked.iter().filter(|&&i| est[i] >= lo[i] && est[i] <= hi[i]).count();
    assert!(inside as f64 >= 0.8 * checked.len() as f64);
}

#[test]
fn config_file_and_flags_override_constants() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("k.json");
    std::fs::write(&cfg, r#"{"G": 6.0e-11}"#).unwrap();
    let base: Value = serde_json::from_str(&stdout(&qlimits(&["crossover"]))).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qlimits"))
        .args(["crossover"])
        .env("QLIMITS_CONFIG", &cfg)
        .output()
        .unwrap();
    let via_env: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let m0 = base["m_star_kg"].as_f64().unwrap();
    let m1 = via_env["m_star_kg"].as_f64().unwrap();
    assert!((m1 / m0 - (6.6743e-11f64 / 6.0e-11).sqrt()).abs() < 1e-12);
    let flag: Value = serde_json::from_str(&stdout(&qlimits(&["crossover", "--G", "6.0e-11"]))).unwrap();
    assert_eq!(flag["m_star_kg"], via_env["m_star_kg"]);

    std::fs::write(&cfg, r#"{"hbarr": 1}"#).unwrap();
    let bad = qlimits(&["crossover", "--config", cfg.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn svg_output() {
    let svg = stdout(&qlimits(&["kernel", "--points", "20", "--log", "--format", "svg"]));
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
}
