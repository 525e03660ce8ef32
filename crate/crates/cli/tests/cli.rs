// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use nvamp_cli::exit;

fn nvamp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nvamp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read_to_string(p).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn trotter_matches_golden() {
    let o = nvamp(&["trotter", "--t", "5"]);
    assert_eq!(o.status.code(), Some(exit::OK));
    assert_eq!(stdout(&o), golden("trotter_t5.csv"));
}

#[test]
fn amplify_matches_golden() {
    let o = nvamp(&["amplify", "--fs-steps", "11", "--ratios", "0.9,1.005,1.05"]);
    assert_eq!(o.status.code(), Some(exit::OK));
    assert_eq!(stdout(&o), golden("amplify_small.csv"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["spectrum", "--fs-steps", "6"];
    assert_eq!(stdout(&nvamp(&args)), stdout(&nvamp(&args)));
}

#[test]
fn trotter_starts_at_identity() {
    let rows = data_rows(&stdout(&nvamp(&["trotter"])));
    let first = &rows[0];
    let one = "1.00000000000e0";
    let zero = "0.00000000000e0";
    assert_eq!(first[2], "ok");
    // Us and Usp entries: re/im of 11, 12, 21, 22
    for block in [&first[3..11], &first[11..19]] {
        let want = [one, zero, zero, zero, zero, zero, one, zero];
        assert_eq!(block, want);
    }
    assert_eq!(first[19], zero);
}

#[test]
fn spectrum_half_flux_row() {
    let rows = data_rows(&stdout(&nvamp(&["spectrum", "--fs-steps", "2"])));
    let r = &rows[0];
    assert_eq!(r[0], "5.00000000000e-1");
    assert_eq!(r[3..6], r[6..9]);
    for a in &r[9..11] {
        assert!(a.parse::<f64>().unwrap().abs() < 1e-9);
    }
}

#[test]
fn headers_name_units_and_convention() {
    for (cmd, conv) in [
        ("spectrum", "direct"),
        ("trotter", "direct"),
        ("amplify", "direct"),
    ] {
        let out = stdout(&nvamp(&[cmd, "--fs-steps", "2", "--t", "1"]));
        let mut lines = out.lines();
        assert!(lines.next().unwrap().contains(conv));
        assert!(lines.next().unwrap().contains('['));
    }
    let out = stdout(&nvamp(&["amplify", "--fs-steps", "2", "--two-pi"]));
    assert!(out.lines().next().unwrap().contains("two-pi"));
    assert!(out.lines().nth(1).unwrap().contains("eta2[two-pi]"));
}

#[test]
fn amplify_flags_unstable_cells() {
    let rows = data_rows(&stdout(&nvamp(&[
        "amplify",
        "--ratios",
        "0.9",
        "--fs-steps",
        "3",
    ])));
    assert_eq!(rows[0][2], "ok");
    assert_eq!(rows[0][5], "1.00000000000e0");
    assert_eq!(rows[2][2], "unstable");
    assert!(rows[2][3..7].iter().all(String::is_empty));
}

#[test]
fn coupling_report() {
    let o = nvamp(&["coupling"]);
    assert_eq!(o.status.code(), Some(exit::OK));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let hz = v["g_hz"].as_f64().unwrap();
    assert!(hz > 10e3 / 3.0 && hz < 30e3);
    assert!(v["chain_mismatch"].as_f64().unwrap() < 1e-10);
    assert!(v["assumptions"][0]
        .as_str()
        .unwrap()
        .contains("edge length"));
}

#[test]
fn coupling_midpoint_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("mid.toml");
    std::fs::write(&cfg, "geometry.l = 1e-5\ngeometry.z_nv = 5e-6\n").unwrap();
    let o = nvamp(&["coupling", "--config", cfg.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let b0 = v["b0_tesla_per_amp"].as_f64().unwrap();
    let want = 1.256_637_062_12e-6 / (4.0 * std::f64::consts::PI) * 6.0 * 2f64.sqrt() / 1e-5;
    assert!((b0 / want - 1.0).abs() < 1e-12);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad_key = dir.path().join("bad.toml");
    std::fs::write(&bad_key, "circuit.e_q = 1.0\n").unwrap();
    assert_eq!(
        nvamp(&["spectrum", "--config", bad_key.to_str().unwrap()])
            .status
            .code(),
        Some(exit::CONFIG)
    );

    let on_edge = dir.path().join("edge.toml");
    std::fs::write(&on_edge, "geometry.z_nv = 0.0\n").unwrap();
    assert_eq!(
        nvamp(&["coupling", "--config", on_edge.to_str().unwrap()])
            .status
            .code(),
        Some(exit::CONFIG)
    );

    assert_eq!(
        nvamp(&["spectrum", "--config", "/nonexistent.toml"])
            .status
            .code(),
        Some(exit::CONFIG)
    );
    assert_eq!(
        nvamp(&["trotter", "--M", "0"]).status.code(),
        Some(exit::CONFIG)
    );
}

#[test]
fn unstable_trotter_point_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("unstable.toml");
    std::fs::write(&cfg, "circuit.e_l = 50.0\ntrotter.f_s = 1.0\n").unwrap();
    assert_eq!(
        nvamp(&["trotter", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(exit::STABILITY)
    );
}

#[test]
fn unconverged_spectrum_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, "truncation.dim = 4\ntruncation.max_dim = 8\n").unwrap();
    let o = nvamp(&[
        "spectrum",
        "--config",
        cfg.to_str().unwrap(),
        "--fs-min",
        "0.9",
        "--fs-max",
        "0.9",
        "--fs-steps",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(exit::OK));
    assert_eq!(data_rows(&stdout(&o))[0][1], "unconverged");
}

#[test]
fn selftest_default_passes() {
    let o = nvamp(&["selftest"]);
    assert_eq!(o.status.code(), Some(exit::OK));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 7);
}

#[test]
fn selftest_small_dim_fails_convergence() {
    let o = nvamp(&["selftest", "--dim", "4"]);
    assert_eq!(o.status.code(), Some(exit::INVARIANT));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let conv = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "truncation_convergence")
        .unwrap();
    assert_eq!(conv["passed"], false);
}

#[test]
fn selftest_zero_tolerance_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("zero.toml");
    std::fs::write(&cfg, "tolerances.unitarity = 0.0\n").unwrap();
    let o = nvamp(&["selftest", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(exit::INVARIANT));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let o = nvamp(&["coupling", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(exit::OK));
    assert!(o.stdout.is_empty());
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        stdout(&nvamp(&["coupling"]))
    );
}
