use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn run(dir: &Path, config: &Value, args: &[&str], env: &[(&str, &str)]) -> Output {
    let path = dir.join("config.json");
    std::fs::write(&path, config.to_string()).unwrap();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_harq-outage"));
    cmd.args(args).arg("--config").arg(&path).env_remove("HARQ_TERM_CAP");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn ok_stdout(out: Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Header plus data rows of a CSV, comment lines dropped.
fn rows(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let body = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    (header, body)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn num(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s:?}"))
}

#[test]
fn outage_point_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({"K": 1, "rho": 0.0, "rate": 1.0, "p_total_db": 0.0});
    let csv = ok_stdout(run(dir.path(), &cfg, &["outage"], &[]));
    assert!(csv.contains("# outage_true lies in [outage_series, outage_series + bound]"));
    let (header, body) = rows(&csv);
    assert_eq!(header.join(","), harq_outage::cli::SWEEP_HEADER);
    assert_eq!(body.len(), 1);
    let v = num(&body[0][col(&header, "outage_series")]);
    assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
    assert_eq!(body[0][col(&header, "mc_p_hat")], "");
}

#[test]
fn json_output_parses() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({"K": 2, "rho": 0.5, "rate": 2.0, "db_grid": [0.0, 10.0]});
    let text = ok_stdout(run(dir.path(), &cfg, &["sweep", "--format", "json"], &[]));
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
}

#[test]
fn invalid_rho_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({"K": 2, "rho": 1.0, "rate": 2.0, "p_total_db": 10.0});
    let out = run(dir.path(), &cfg, &["outage"], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("0 ≤ ρ < 1"));
}

#[test]
fn malformed_or_missing_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_harq-outage"))
        .args(["outage", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = Command::new(env!("CARGO_BIN_EXE_harq-outage")).arg("outage").output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let cfg = json!({"K": 2, "rho": 0.5, "rate": 2.0, "p_total_db": 10.0, "typo": 1});
    assert_eq!(run(dir.path(), &cfg, &["outage"], &[]).status.code(), Some(2));
}

#[test]
fn term_cap_is_a_resource_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({"K": 4, "rho": 0.9, "rate": 2.0, "p_total_db": 0.0});
    let out = run(dir.path(), &cfg, &["outage"], &[("HARQ_TERM_CAP", "1000")]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sweep_decays_with_diversity_four() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({"K": 4, "rho": 0.5, "rate": 2.0, "db_grid": [20.0, 25.0, 30.0]});
    let (header, body) = rows(&ok_stdout(run(dir.path(), &cfg, &["sweep"], &[])));
    let v: Vec<f64> = body.iter().map(|r| num(&r[col(&header, "outage_series")])).collect();
    assert!(v[0] > v[1] && v[1] > v[2]);
    let decades = (v[0] / v[2]).log10();
    assert!((3.5..=4.5).contains(&decades), "{decades}");
}

#[test]
fn sweep_with_monte_carlo_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({
        "K": 2, "rho": 0.5, "rate": 2.0, "db_grid": [0.0, 5.0, 10.0],
        "mc": {"samples": 1_000_000, "seed": 7, "streams": 4}
    });
    let (header, body) = rows(&ok_stdout(run(dir.path(), &cfg, &["sweep"], &[])));
    for r in &body {
        let series = num(&r[col(&header, "outage_series")]);
        let p = num(&r[col(&header, "mc_p_hat")]);
        let se = num(&r[col(&header, "mc_stderr")]);
        assert!((p - series).abs() <= 4.0 * se, "{r:?}");
    }
}

#[test]
fn seed_flag_changes_mc_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({"K": 2, "rho": 0.5, "rate": 2.0, "p_total_db": 0.0, "mc": {"samples": 100_000}});
    let a = ok_stdout(run(dir.path(), &cfg, &["mc", "--seed", "1"], &[]));
    let b = ok_stdout(run(dir.path(), &cfg, &["mc", "--seed", "2"], &[]));
    let a2 = ok_stdout(run(dir.path(), &cfg, &["mc", "--seed", "1"], &[]));
    assert_ne!(a, b);
    assert_eq!(a, a2);
    let (header, _) = rows(&a);
    assert_eq!(header.join(","), "p_total_db,mc_p_hat,mc_stderr,samples,failures,rare_event");
}

#[test]
fn truncation_study_properties() {
    let dir = tempfile::tempdir().unwrap();
    let orders: Vec<u64> = (0..=10).collect();
    let study = |rho: f64, db: f64| {
        let cfg = json!({"K": 4, "rho": rho, "rate": 2.0, "p_total_db": db, "n_list": orders});
        let (header, body) = rows(&ok_stdout(run(dir.path(), &cfg, &["truncation-study"], &[])));
        body.iter()
            .map(|r| {
                (
                    num(&r[col(&header, "value")]),
                    num(&r[col(&header, "bound")]),
                    num(&r[col(&header, "error_vs_reference")]),
                )
            })
            .collect::<Vec<_>>()
    };

    let independent = study(0.0, 10.0);
    assert!(independent.iter().all(|&(_, b, e)| b == 0.0 && e == 0.0));

    let moderate = study(0.5, 10.0);
    assert!(moderate[2].2 <= 0.01 * moderate[2].0);

    let strong = study(0.9, 0.0);
    assert!(strong.windows(2).all(|w| w[1].0 >= w[0].0 && w[1].1 < w[0].1));
    assert!(strong.iter().all(|&(_, b, e)| e <= b + 1e-14));
}

#[test]
fn ell_study_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({"K": 4, "rho": 0.0, "rate": 2.0, "k_list": [1, 4]});
    let (header, body) = rows(&ok_stdout(run(dir.path(), &cfg, &["ell-study"], &[])));
    assert_eq!(header.join(","), "rho,K,ell");
    assert_eq!(body.len(), 40);
    let (k1, k4): (Vec<_>, Vec<_>) = body.iter().partition(|r| r[1] == "1");
    assert!(k1.iter().all(|r| num(&r[2]) == 1.0));
    let ell4: Vec<f64> = k4.iter().map(|r| num(&r[2])).collect();
    assert_eq!(ell4[0], 1.0);
    assert!(ell4.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn diversity_windows() {
    let dir = tempfile::tempdir().unwrap();
    let slope = |k: usize, rho: f64, grid: Vec<f64>| {
        let cfg = json!({"K": k, "rho": rho, "rate": 2.0, "db_grid": grid});
        let (header, body) = rows(&ok_stdout(run(dir.path(), &cfg, &["diversity"], &[])));
        assert_eq!(body.len(), 1);
        assert_eq!(num(&body[0][col(&header, "target_diversity")]), k as f64);
        num(&body[0][col(&header, "slope")])
    };
    let four = slope(4, 0.5, vec![20.0, 22.5, 25.0, 27.5, 30.0]);
    assert!((3.8..=4.2).contains(&four), "{four}");
    let two = slope(2, 0.9, vec![30.0, 32.5, 35.0, 37.5, 40.0]);
    assert!((1.8..=2.2).contains(&two), "{two}");

    let cfg = json!({"K": 2, "rho": 0.5, "rate": 2.0, "db_grid": [20.0, 30.0]});
    assert_eq!(run(dir.path(), &cfg, &["diversity"], &[]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("result.csv");
    let cfg = json!({"K": 2, "rho": 0.3, "rate": 1.0, "db_grid": [0.0, 5.0]});
    let out = run(dir.path(), &cfg, &["sweep", "--out", target.to_str().unwrap()], &[]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let (_, body) = rows(&std::fs::read_to_string(&target).unwrap());
    assert_eq!(body.len(), 2);
}
