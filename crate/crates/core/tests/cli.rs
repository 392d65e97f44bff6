mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use binmrf::cli::run;
use binmrf::models::build_ising;
use binmrf::LatticeSpec;
use common::brute_log_partition;
use tempfile::TempDir;

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn run_to_file(dir: &Path, args: &[&str], out_name: &str) -> (i32, String) {
    let out = dir.join(out_name);
    let mut full = vec!["binmrf"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", out.to_str().unwrap()]);
    let code = run(full);
    let text = fs::read_to_string(&out).unwrap_or_default();
    (code, text)
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn norm_for_independence_is_analytic() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "ind.json",
        r#"{"family": "independence", "rows": 3, "cols": 3, "params": [0.8]}"#,
    );
    let (code, text) = run_to_file(
        dir.path(),
        &["norm", "--config", cfg.to_str().unwrap(), "--nu", "1,3"],
        "out.csv",
    );
    assert_eq!(code, 0);
    assert!(text.starts_with("nu,ln_c_approx,ln_c_lower,ln_c_upper,gap\n"));
    let expected = 9.0 * (1.0 + 0.8f64.exp()).ln();
    for row in csv_rows(&text) {
        for v in &row[1..4] {
            let v: f64 = v.parse().unwrap();
            assert!((v - expected).abs() < 1e-10);
        }
    }
}

#[test]
fn norm_sweep_brackets_the_constant() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "ising.json",
        r#"{"family": "ising", "rows": 4, "cols": 4, "params": [0.8], "nu": [1, 2, 3, 4, 5, 6, 7, 8]}"#,
    );
    let (code, text) = run_to_file(
        dir.path(),
        &["norm", "--config", cfg.to_str().unwrap(), "--jobs", "3"],
        "out.csv",
    );
    assert_eq!(code, 0);
    let exact = brute_log_partition(&build_ising(LatticeSpec::new(4, 4).unwrap(), 0.8).energy);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 8);
    for (k, row) in rows.iter().enumerate() {
        assert_eq!(row[0], (k + 1).to_string());
        let lower: f64 = row[2].parse().unwrap();
        let upper: f64 = row[3].parse().unwrap();
        let gap: f64 = row[4].parse().unwrap();
        assert!(gap >= 0.0);
        assert!(lower <= exact + 1e-12 && exact <= upper + 1e-12);
    }
}

#[test]
fn commands_are_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "ising.json",
        r#"{"family": "ising", "rows": 3, "cols": 3, "params": [0.4], "nu": [2], "seed": 5,
            "count": 300, "sweeps": 200, "burn_in": 20, "thin": 2,
            "observed": "010110011", "theta_grid": [0.0, 0.2, 0.4, 0.6, 0.8, 1.0],
            "observations": [0.1, 0.9, 0.2, 1.2, -0.3, 0.8, 0.5, 0.4, 1.1], "reference": "exhaustive"}"#,
    );
    let c = cfg.to_str().unwrap();
    let runs: [&[&str]; 8] = [
        &["norm", "--config", c],
        &["norm", "--config", c, "--format", "json"],
        &["sample", "--config", c, "--format", "binary"],
        &["gibbs", "--config", c],
        &["map", "--config", c],
        &["mle", "--config", c, "--format", "json"],
        &["reject", "--config", c],
        &["mh-rate", "--config", c, "--nu", "1,2"],
    ];
    for args in runs {
        let a = dir.path().join("a.out");
        let b = dir.path().join("b.out");
        for (p, jobs) in [(&a, "1"), (&b, "4")] {
            let mut full = vec!["binmrf"];
            full.extend_from_slice(args);
            full.extend_from_slice(&["--jobs", jobs, "--out", p.to_str().unwrap()]);
            assert_eq!(run(full), 0, "{args:?}");
        }
        let (x, y) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
        assert!(!x.is_empty());
        assert_eq!(x, y, "{args:?}");
    }
}

#[test]
fn map_with_flat_prior_thresholds() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "map.json",
        r#"{"family": "ising", "rows": 2, "cols": 3, "params": [0.0], "mode": "exact",
            "observations": [0.2, 0.9, -1.0, 0.51, 0.49, 2.0],
            "likelihood": {"mu0": 0.0, "mu1": 1.0, "sigma": 1.0}}"#,
    );
    let (code, text) = run_to_file(dir.path(), &["map", "--config", cfg.to_str().unwrap()], "map.csv");
    assert_eq!(code, 0);
    assert!(text.starts_with("state,log_value\n010101,"));
}

#[test]
fn mle_brackets_grid_mle() {
    let dir = TempDir::new().unwrap();
    let observed = "1101100111001110";
    let grid: Vec<f64> = (0..11).map(|k| 0.1 * k as f64).collect();
    let body = format!(
        r#"{{"family": "ising", "rows": 4, "cols": 4, "params": [0.5], "nu": [16],
            "observed": "{observed}", "theta_grid": {grid:?}}}"#
    );
    let cfg = write_config(dir.path(), "mle.json", &body);
    let (code, text) = run_to_file(dir.path(), &["mle", "--config", cfg.to_str().unwrap()], "mle.csv");
    assert_eq!(code, 0);
    let row = &csv_rows(&text)[0];
    let (lo, hi): (f64, f64) = (row[2].parse().unwrap(), row[3].parse().unwrap());
    let x: Vec<u8> = observed.bytes().map(|b| b - b'0').collect();
    let mut best = (f64::NEG_INFINITY, 0.0);
    for &t in &grid {
        let m = build_ising(LatticeSpec::new(4, 4).unwrap(), t);
        let ll = m.energy_at(&x).unwrap() - brute_log_partition(&m.energy);
        if ll > best.0 {
            best = (ll, t);
        }
    }
    assert!(lo <= best.1 && best.1 <= hi, "{lo} {} {hi}", best.1);
}

#[test]
fn sample_output_formats() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.json",
        r#"{"family": "rotinv2x2", "rows": 3, "cols": 3, "params": [0.1, -0.2, 0.3, 0.0, 0.5]}"#,
    );
    let c = cfg.to_str().unwrap();
    let (code, text) = run_to_file(
        dir.path(),
        &["sample", "--config", c, "--nu", "2", "--count", "4", "--seed", "9"],
        "s.csv",
    );
    assert_eq!(code, 0);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "state,log_density");
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[1].split(',').next().unwrap().len(), 9);
    let (code, json) = run_to_file(
        dir.path(),
        &["sample", "--config", c, "--nu", "2", "--count", "4", "--seed", "9", "--format", "json"],
        "s.json.out",
    );
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["states"].as_array().unwrap().len(), 4);
}

#[test]
fn exit_codes_from_the_binary() {
    let dir = TempDir::new().unwrap();
    let bin = env!("CARGO_BIN_EXE_binmrf");
    let bad = write_config(dir.path(), "bad.json", r#"{"family": "ising", "rows": 2}"#);
    let status = Command::new(bin)
        .args(["norm", "--config", bad.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));

    let wrong_params = write_config(
        dir.path(),
        "params.json",
        r#"{"family": "autologistic", "rows": 2, "cols": 2, "params": [1.0]}"#,
    );
    let status = Command::new(bin)
        .args(["norm", "--config", wrong_params.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));

    let big = write_config(
        dir.path(),
        "big.json",
        r#"{"family": "ising", "rows": 27, "cols": 27, "params": [0.3]}"#,
    );
    let status = Command::new(bin)
        .args(["norm", "--config", big.to_str().unwrap(), "--mode", "exact"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&status.stderr).contains("exceeds the table cap 25"));

    let ok = write_config(
        dir.path(),
        "ok.json",
        r#"{"family": "ising", "rows": 2, "cols": 2, "params": [0.3]}"#,
    );
    let out = Command::new(bin)
        .args(["norm", "--config", ok.to_str().unwrap(), "--mode", "exact"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("nu,"));
}
