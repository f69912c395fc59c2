//! End-to-end tests of the CLI against library-level oracles.

use std::path::Path;
use std::process::{Command, Output};

use isopipe::classify::ch_prime;
use isopipe::riemann::solve_rp;
use isopipe::state::{GasParams, State};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_isopipe"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command {:?} failed\nstdout: {}\nstderr: {}",
        args,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).expect("csv exists");
    assert!(text.ends_with('\n'));
    assert!(!text.contains('\r'), "line endings must be \\n");
    text.lines()
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn g1() -> GasParams {
    GasParams::new(1.0).unwrap()
}

#[test]
fn riemann_constant_data_gives_flat_profile_and_empty_fan() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("flat.csv");
    run_ok(&[
        "riemann",
        "--left",
        "1,0",
        "--right",
        "1,0",
        "--a",
        "1",
        "--t",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    let rows = read_csv(&out);
    assert_eq!(rows[0], ["t", "x", "rho", "q", "v", "p", "mu", "nu"]);
    assert_eq!(rows.len(), 1 + 1001);
    for row in &rows[1..] {
        assert_eq!(row[2].parse::<f64>().unwrap(), 1.0);
        assert_eq!(row[3].parse::<f64>().unwrap(), 0.0);
    }
    let fan: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("flat.json")).unwrap())
            .unwrap();
    assert_eq!(fan["waves"].as_array().unwrap().len(), 0);
    assert_eq!(fan["mode"], serde_json::Value::Null);
}

#[test]
fn riemann_closed_valve_writes_two_half_profiles_and_one_jump() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("closed.csv");
    run_ok(&[
        "riemann",
        "--left",
        "1,0",
        "--right",
        "2,0",
        "--a",
        "1",
        "--valve",
        r#"{"type":"electronic","M":1.5}"#,
        "--t",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    let rows = read_csv(&out);
    for row in &rows[1..] {
        let x: f64 = row[1].parse().unwrap();
        let rho: f64 = row[2].parse().unwrap();
        assert_eq!(rho, if x < 0.0 { 1.0 } else { 2.0 });
        assert_eq!(row[3].parse::<f64>().unwrap(), 0.0);
    }
    let fan: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("closed.json")).unwrap())
            .unwrap();
    let waves = fan["waves"].as_array().unwrap();
    assert_eq!(waves.len(), 1);
    assert_eq!(waves[0]["kind"], "under_compressive");
    assert_eq!(fan["mode"], "active");
    assert_eq!(fan["q_m"], 0.0);
}

#[test]
fn riemann_free_flow_matches_library_solver() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("free.csv");
    run_ok(&[
        "riemann",
        "--left",
        "1,0",
        "--right",
        "2,0",
        "--a",
        "1",
        "--t",
        "1",
        "--samples",
        "501",
        "--out",
        out.to_str().unwrap(),
    ]);
    let g = g1();
    let fan = solve_rp(
        State::new(1.0, 0.0).unwrap(),
        State::new(2.0, 0.0).unwrap(),
        g,
    );
    let rows = read_csv(&out);
    assert_eq!(rows.len(), 1 + 501);
    for row in &rows[1..] {
        let x: f64 = row[1].parse().unwrap();
        let u = fan.sample(x, g);
        assert_eq!(row[2].parse::<f64>().unwrap(), u.rho());
        assert_eq!(row[3].parse::<f64>().unwrap(), u.q());
    }
    let side: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("free.json")).unwrap())
            .unwrap();
    let kinds: Vec<&str> = side["waves"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w["kind"].as_str().unwrap())
        .collect();
    assert_eq!(kinds, ["shock", "rarefaction"]);
}

#[test]
fn riemann_csv_output_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        run_ok(&[
            "riemann",
            "--left",
            "0.8,0.3",
            "--right",
            "2.5,-0.4",
            "--a",
            "1.3",
            "--t",
            "0.7",
            "--out",
            out.to_str().unwrap(),
        ]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn classify_reports_the_expected_regimes() {
    let out = run_ok(&["classify", "--left", "1,0", "--right", "2,0", "--a", "1", "--M", "0.5"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["open_active"], "Open");
    assert_eq!(v["o_sub"], "O_O^2");
    assert_eq!(v["coherent"], true);

    let out = run_ok(&["classify", "--left", "1,0", "--right", "2,0", "--a", "1", "--M", "0.999"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["o_sub"], "O_A^2");
    assert_eq!(v["coherent"], false);

    let out = run_ok(&["classify", "--left", "1,0", "--right", "1,0", "--a", "1", "--M", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["open_active"], "Active");
    assert_eq!(v["influence"], "A_N");
    assert_eq!(v["consistent"], true);
}

#[test]
fn sweep_rows_are_row_major_and_agree_with_ch_prime() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.csv");
    run_ok(&[
        "sweep",
        "--slice",
        "left",
        "--state",
        "1,1",
        "--mu",
        "-2:2:101",
        "--nu",
        "-2:2:101",
        "--M",
        "1",
        "--a",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    let rows = read_csv(&out);
    assert_eq!(rows[0], ["mu", "nu", "regime", "coherent", "consistent"]);
    assert_eq!(rows.len(), 1 + 101 * 101);
    // row-major with mu as the outer axis
    assert_eq!(rows[1][0].parse::<f64>().unwrap(), -2.0);
    assert_eq!(rows[1][1].parse::<f64>().unwrap(), -2.0);
    assert_eq!(rows[2][0].parse::<f64>().unwrap(), -2.0);
    assert!((rows[2][1].parse::<f64>().unwrap() - (-1.96)).abs() < 1e-12);

    let g = g1();
    let fixed = State::new(1.0, 1.0).unwrap();
    let mut ch_prime_rows = 0;
    for row in &rows[1..] {
        let mu: f64 = row[0].parse().unwrap();
        let nu: f64 = row[1].parse().unwrap();
        let moving = State::from_mu_nu(mu, nu, g).unwrap();
        if ch_prime(fixed, moving, 1.0, g) {
            ch_prime_rows += 1;
            assert_eq!(row[3], "true", "ch_prime point ({mu}, {nu}) must be coherent");
        }
    }
    assert!(ch_prime_rows > 100, "the window contains a ch_prime region");
}

#[test]
fn sweep_diagonal_point_reports_influential_active() {
    // fixed left datum with q != 0 and a small self gap: the grid point
    // equal to it forms an influential active pair
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("diag.csv");
    run_ok(&[
        "sweep",
        "--slice",
        "left",
        "--state",
        "1,0.1",
        "--mu",
        "0:0:1",
        "--nu",
        "-2:2:201",
        "--M",
        "1",
        "--a",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    let rows = read_csv(&out);
    assert_eq!(rows.len(), 1 + 201);
    let diag = rows
        .iter()
        .skip(1)
        .find(|r| (r[1].parse::<f64>().unwrap() - 0.1).abs() < 1e-12)
        .expect("grid contains nu = 0.1");
    assert_eq!(diag[2], "A_I");
    assert_eq!(diag[4], "false");
}

#[test]
fn sweep_rejects_zero_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("none.csv");
    let status = bin()
        .args([
            "sweep", "--slice", "left", "--state", "1,1", "--mu", "-1:1:0", "--nu", "-1:1:5",
            "--M", "1", "--a", "1", "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_with_code_two() {
    // density at the vacuum floor
    let status = bin()
        .args(["classify", "--left", "0,1", "--right", "1,0", "--a", "1", "--M", "1"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    // malformed valve JSON
    let status = bin()
        .args([
            "riemann", "--left", "1,0", "--right", "1,0", "--a", "1", "--valve",
            r#"{"type":"unknown"}"#,
        ])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
}

#[test]
fn pressure_drop_without_admissible_flux_exits_with_code_three() {
    // strong forward gradient with a tiny loss coefficient: no root in the
    // admissible window
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let status = bin()
        .args([
            "riemann",
            "--left",
            "4,0",
            "--right",
            "0.05,0",
            "--a",
            "1",
            "--valve",
            r#"{"type":"pressure_drop","k":1e-6}"#,
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(
        status.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&status.stderr)
    );
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn simulate_constant_reflective_reports_tiny_mass_drift() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("snap.csv");
    let cfg = format!(
        r#"{{
  "a": 1.0, "cfl": 0.9, "t_end": 0.5, "boundary": "reflective",
  "valve": {{"type": "electronic", "M": 1.0}},
  "cells": [ {{"x_lo": -1.0, "x_hi": 1.0, "rho": 1.0, "q": 0.0}} ],
  "n_cells": 50, "output_every": 0.25,
  "out": "{}"
}}"#,
        out.display()
    );
    let path = write_config(dir.path(), &cfg);
    let output = run_ok(&["simulate", "--config", path.to_str().unwrap()]);
    let stdout = String::from_utf8(output.stdout).unwrap();
    let drift_line = stdout
        .lines()
        .find(|l| l.starts_with("mass residual relative:"))
        .expect("mass report printed");
    let drift: f64 = drift_line
        .rsplit(' ')
        .next()
        .unwrap()
        .parse()
        .expect("parsable drift");
    assert!(drift.abs() <= 1e-12);
    assert!(out.exists());
    assert!(dir.path().join("snap.events.csv").exists());
}

#[test]
fn simulate_closed_valve_is_static_and_always_active() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("closed.csv");
    let cfg = format!(
        r#"{{
  "a": 1.0, "cfl": 0.9, "t_end": 1.0, "boundary": "outflow",
  "valve": {{"type": "electronic", "M": 1.5}},
  "cells": [
    {{"x_lo": -1.0, "x_hi": 0.0, "rho": 1.0, "q": 0.0}},
    {{"x_lo": 0.0, "x_hi": 1.0, "rho": 2.0, "q": 0.0}}
  ],
  "n_cells": 40, "output_every": 0.1,
  "out": "{}"
}}"#,
        out.display()
    );
    let path = write_config(dir.path(), &cfg);
    run_ok(&["simulate", "--config", path.to_str().unwrap()]);
    let events = read_csv(&dir.path().join("closed.events.csv"));
    assert!(events.len() > 10);
    for row in &events[1..] {
        assert_eq!(row[1], "active");
        assert_eq!(row[2].parse::<f64>().unwrap(), 0.0);
        assert_eq!(row[3].parse::<f64>().unwrap(), 1.0);
    }
    // every snapshot block repeats the initial profile
    let rows = read_csv(&out);
    for row in &rows[1..] {
        let x: f64 = row[1].parse().unwrap();
        let rho: f64 = row[2].parse().unwrap();
        assert_eq!(rho, if x < 0.0 { 1.0 } else { 2.0 });
        assert_eq!(row[3].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn simulate_chattering_band_flips_the_decision() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("chatter.csv");
    let cfg = format!(
        r#"{{
  "a": 1.0, "cfl": 0.9, "t_end": 0.4, "boundary": "outflow",
  "valve": {{"type": "electronic", "M": 0.999}},
  "cells": [
    {{"x_lo": -1.0, "x_hi": 0.0, "rho": 1.0, "q": 0.0}},
    {{"x_lo": 0.0, "x_hi": 1.0, "rho": 2.0, "q": 0.0}}
  ],
  "n_cells": 40, "output_every": 0.1,
  "out": "{}"
}}"#,
        out.display()
    );
    let path = write_config(dir.path(), &cfg);
    run_ok(&["simulate", "--config", path.to_str().unwrap()]);
    let events = read_csv(&dir.path().join("chatter.events.csv"));
    let modes: Vec<&str> = events[1..].iter().map(|r| r[1].as_str()).collect();
    let flips = modes.windows(2).filter(|w| w[0] != w[1]).count();
    assert!(flips >= 1, "expected at least one decision flip, got {modes:?}");
}

#[test]
fn simulate_rejects_bad_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let bad_cfl = r#"{
  "a": 1.0, "cfl": 1.5, "t_end": 0.1, "boundary": "outflow",
  "valve": {"type": "electronic", "M": 1.0},
  "cells": [ {"x_lo": -1.0, "x_hi": 1.0, "rho": 1.0, "q": 0.0} ],
  "n_cells": 10, "output_every": 0.1, "out": "x.csv"
}"#;
    let path = write_config(dir.path(), bad_cfl);
    let output = bin()
        .args(["simulate", "--config", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("cfl"), "error must name the key: {stderr}");

    let unknown_key = r#"{
  "a": 1.0, "cfl": 0.9, "t_end": 0.1, "boundary": "outflow",
  "valve": {"type": "electronic", "M": 1.0},
  "cells": [ {"x_lo": -1.0, "x_hi": 1.0, "rho": 1.0, "q": 0.0} ],
  "n_cells": 10, "output_every": 0.1, "out": "x.csv", "extra": 1
}"#;
    let path = write_config(dir.path(), unknown_key);
    let output = bin()
        .args(["simulate", "--config", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("extra"));
}
