use std::process::{Command, Output};

use serde_json::Value;

fn smolbgk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smolbgk"))
        .args(args)
        .env("LC_ALL", "de_DE.UTF-8")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("single JSON document")
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

#[test]
fn coeffs_json_reproduces_tabulated_values() {
    let v = json(&smolbgk(&["coeffs", "--format", "json"]));
    assert!((num(&v, "K_TT") - 1.3068).abs() < 1e-3);
    assert!((num(&v, "K_TU") + 0.4443).abs() < 1e-3);
    assert!((num(&v, "K_nT").abs() - 3.3207).abs() < 1e-3);
    assert!((num(&v, "K_nU") + 0.8958).abs() < 1e-3);
    assert!((num(&v, "product") - 2.0 / 3.0).abs() < 1e-6);
}

#[test]
fn coeffs_csv_is_one_header_and_one_row() {
    let out = smolbgk(&["coeffs", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("convention,V1,V2,V3"));
    assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
}

#[test]
fn looser_quadrature_tolerance_keeps_values() {
    let tight = json(&smolbgk(&["coeffs"]));
    let loose = json(&smolbgk(&["coeffs", "--quad-tol", "1e-6"]));
    for key in ["V1", "V3", "K_TT", "K_TU", "K_nT", "K_nU"] {
        assert!((num(&tight, key) - num(&loose, key)).abs() < 1e-5, "{key}");
    }
}

#[test]
fn jumps_for_each_driver() {
    let v = json(&smolbgk(&["jumps", "--g-t", "1", "--u", "0"]));
    assert!((num(&v, "eps_T") - 1.3068).abs() < 1e-3);
    let v = json(&smolbgk(&["jumps", "--g-t", "0", "--u", "0.5"]));
    assert!((num(&v, "eps_T") + 0.4443).abs() < 1e-3);
    let v = json(&smolbgk(&["jumps"]));
    assert_eq!((num(&v, "eps_T"), num(&v, "eps_n")), (0.0, 0.0));
    let v = json(&smolbgk(&["jumps", "--g-t", "1", "--convention", "boundary-value"]));
    assert!((num(&v, "eps_T") - 1.5278108).abs() < 1e-6);
    assert!(num(&v, "pole_residual_plus") < 1e-10 && num(&v, "pole_residual_minus") < 1e-10);
}

#[test]
fn malformed_flags_exit_with_usage() {
    let out = smolbgk(&["jumps", "--g-t", "abc"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    let out = smolbgk(&["jumps", "--g-t", "inf"]);
    assert_eq!(out.status.code(), Some(1));
    let out = smolbgk(&["profile", "--points", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn profile_csv_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.csv");
    let out = smolbgk(&[
        "profile", "--g-t", "1", "--u", "0", "--x-max", "20", "--points", "64", "--format", "csv", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,delta_n,u,delta_T,m0,m1"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 64);
    assert!(rows.iter().all(|r| r[2] == 0.0));
    for r in &rows {
        for c in r {
            let digits = format!("{c:e}").split('e').next().unwrap().replace(['.', '-'], "").len();
            assert!(digits <= 12);
        }
    }
    let eps_t = num(&json(&smolbgk(&["jumps", "--g-t", "1"])), "eps_T");
    let last = rows.last().unwrap();
    assert_eq!(last[0], 20.0);
    assert!((last[3] - (eps_t + last[0])).abs() < 1e-4);
}

#[test]
fn zero_profile_is_zero() {
    let v = json(&smolbgk(&["profile", "--points", "8"]));
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 8);
    for r in rows {
        for key in ["delta_n", "u", "delta_T"] {
            assert_eq!(num(r, key), 0.0);
        }
    }
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("p.csv");
    let out = smolbgk(&["profile", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn distribution_vanishes_for_incoming_velocities_at_the_wall() {
    let v = json(&smolbgk(&[
        "distribution", "--g-t", "1", "--x", "0", "--points", "9", "--convention", "boundary-value",
    ]));
    for r in v.as_array().unwrap() {
        if num(r, "mu") > 0.05 {
            assert!(num(r, "h").abs() < 1e-6, "{r}");
        }
    }
}

#[test]
fn verify_passes_and_documents_conventions() {
    let v = json(&smolbgk(&["verify"]));
    assert_eq!(v["pass"], Value::Bool(true));
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() >= 15);
    for c in checks {
        for key in ["name", "computed", "expected", "residual", "tolerance", "pass"] {
            assert!(c.get(key).is_some(), "{key} missing in {c}");
        }
        assert_eq!(c["pass"].as_bool(), Some(num(c, "residual") <= num(c, "tolerance")));
    }
    let names: Vec<&str> = v["conventions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"factorization constant"));
    assert!(names.contains(&"K_nT sign"));
    assert!(names.contains(&"A(eta) sign"));
}

#[test]
fn verify_with_unrealistic_tolerance_fails() {
    let out = smolbgk(&["verify", "--tol", "1e-15"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], Value::Bool(false));
}

#[test]
fn oracle_zero_drivers() {
    let v = json(&smolbgk(&["oracle"]));
    assert_eq!(num(&v, "oracle_eps_T"), 0.0);
    assert_eq!(num(&v, "oracle_eps_n"), 0.0);
    assert_eq!(num(&v, "iterations"), 1.0);
}

#[test]
fn oracle_matches_boundary_value_jumps() {
    let v = json(&smolbgk(&["oracle", "--g-t", "1", "--u", "0", "--convention", "boundary-value"]));
    assert!(num(&v["selected"], "deviation_T") <= 0.02);
    assert!(num(&v["selected"], "deviation_n") <= 0.02);
    assert!(num(&v, "velocity_deviation") < 1e-3);
}

#[test]
fn oracle_non_convergence_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"oracle": {"max_iter": 5}}"#).unwrap();
    let out = smolbgk(&[
        "oracle", "--g-t", "1", "--n-mu", "16", "--n-x", "200", "--x-max", "20", "--config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"quad": {"abs_tol": 1e-3, "rel_tol": 1e-3}}"#).unwrap();
    let out = smolbgk(&["coeffs", "--config", cfg.to_str().unwrap(), "--quad-tol", "1e-10"]);
    let a = json(&out);
    let b = json(&smolbgk(&["coeffs"]));
    assert_eq!(a, b);
    std::fs::write(&cfg, r#"{"quad": {"bogus": 1}}"#).unwrap();
    let out = smolbgk(&["coeffs", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let a = smolbgk(&["profile", "--g-t", "1", "--u", "0.3", "--points", "16", "--format", "csv"]);
    let b = Command::new(env!("CARGO_BIN_EXE_smolbgk"))
        .args(["profile", "--g-t", "1", "--u", "0.3", "--points", "16", "--format", "csv"])
        .env("SMOLBGK_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
    assert!(!String::from_utf8(a.stdout).unwrap().contains(';'));
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_smolbgk"))
        .arg("coeffs")
        .env("SMOLBGK_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
