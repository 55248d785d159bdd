use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_econokit"));
    c.env_remove("ECONOKIT_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn demo_dir() -> (TempDir, PathBuf) {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    let out = run(&["demo-data", "--out", s(&data), "--seed", "7"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    (tmp, data)
}

#[test]
fn missing_file_is_named_and_exits_two() {
    let (_tmp, data) = demo_dir();
    fs::remove_file(data.join("fx.csv")).unwrap();
    let out = run(&["run", "--round", "a", "--data", s(&data)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("fx.csv"), "{err}");
    assert!(!err.contains("cases.csv"));
}

#[test]
fn usage_errors_exit_two() {
    let (_tmp, data) = demo_dir();
    for args in [
        vec!["run", "--round", "z", "--data", s(&data)],
        vec!["run", "--precision", "0", "--data", s(&data)],
        vec![
            "irf",
            "--round",
            "a",
            "--impulse",
            "oil",
            "--response",
            "gex",
            "--data",
            s(&data),
        ],
        vec!["adf", "--series", "gex", "--window", "2020-04-01", "--data", s(&data)],
        vec![
            "adf",
            "--series",
            "gex",
            "--window",
            "2020-04-10:2020-04-01",
            "--data",
            s(&data),
        ],
        vec!["frobnicate"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn window_past_data_end_exits_two() {
    let (_tmp, data) = demo_dir();
    let out = run(&[
        "adf",
        "--series",
        "gsensex",
        "--window",
        "2020-06-01:2020-08-30",
        "--data",
        s(&data),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_writes_one_file_per_round() {
    let (tmp, data) = demo_dir();
    let out_dir = tmp.path().join("reports");
    let out = run(&[
        "run",
        "--round",
        "all",
        "--data",
        s(&data),
        "--out",
        s(&out_dir),
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut names: Vec<String> = fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    let expected: Vec<String> = "abcdefgh".chars().map(|c| format!("round_{c}.json")).collect();
    assert_eq!(names, expected);

    let text = fs::read_to_string(out_dir.join("round_a.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["round"], "a");
    assert_eq!(v["schema_version"], 1);
    assert!(v["errors"].as_array().unwrap().is_empty());
    assert_eq!(v["impulse_responses"].as_array().unwrap().len(), 9);
}

#[test]
fn json_round_trips_to_the_same_report() {
    let (_tmp, data) = demo_dir();
    let out = run(&["run", "--round", "f", "--data", s(&data), "--format", "json"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let report: econokit_core::RoundReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.lm_tests.len(), 12);
    assert_eq!(report.lag_order.len(), 9);
    let again = serde_json::to_string_pretty(&report).unwrap() + "\n";
    assert_eq!(again, text);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (tmp, data) = demo_dir();
    for format in ["json", "table", "csv"] {
        let a = tmp.path().join(format!("a_{format}"));
        let b = tmp.path().join(format!("b_{format}"));
        for dir in [&a, &b] {
            let out = run(&["run", "--data", s(&data), "--out", s(dir), "--format", format]);
            assert!(out.status.success());
        }
        for entry in fs::read_dir(&a).unwrap() {
            let name = entry.unwrap().file_name();
            assert_eq!(
                fs::read(a.join(&name)).unwrap(),
                fs::read(b.join(&name)).unwrap(),
                "{name:?}"
            );
        }
    }
}

fn irf_rows(data: &Path, threshold: &str) -> (Vec<f64>, Option<f64>) {
    let out = run(&[
        "irf",
        "--round",
        "h",
        "--impulse",
        "GEX",
        "--response",
        "growthc",
        "--data",
        s(data),
        "--threshold",
        threshold,
        "--precision",
        "10",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("horizon,response"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 12);
    let values = rows[..11]
        .iter()
        .map(|l| l.split_once(',').unwrap().1.parse().unwrap())
        .collect();
    let (key, rh) = rows[11].split_once(',').unwrap();
    assert_eq!(key, "return_horizon");
    (values, rh.parse().ok())
}

#[test]
fn irf_csv_shape_and_threshold_monotonicity() {
    let (_tmp, data) = demo_dir();
    let (values, _) = irf_rows(&data, "0.05");
    assert_eq!(values[0], 0.0, "GEX is last in the ordering");
    let mut prev = f64::INFINITY;
    for t in ["0.02", "0.05", "0.1", "0.2", "0.4"] {
        let (v, rh) = irf_rows(&data, t);
        assert_eq!(v, values);
        let rh = rh.unwrap_or(f64::INFINITY);
        assert!(rh <= prev, "threshold {t}: {rh} > {prev}");
        prev = rh;
    }
}

#[test]
fn overrides_change_the_var() {
    let (_tmp, data) = demo_dir();
    let out = run(&[
        "run",
        "--round",
        "g",
        "--data",
        s(&data),
        "--format",
        "json",
        "--var-lags",
        "2",
        "--ordering",
        "gex,gsensex,growthc",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["var"]["fit"]["lags"], 2);
    assert_eq!(v["ordering"][0], "GEX");
}

#[test]
fn config_file_is_merged_over_defaults() {
    let (tmp, data) = demo_dir();
    let cfg = tmp.path().join("study.toml");
    fs::write(&cfg, "[defaults]\nhorizons = 4\n\n[rounds.b]\nvar_lags = 2\n").unwrap();
    let out = bin()
        .args(["run", "--round", "b", "--data", s(&data), "--format", "json"])
        .env("ECONOKIT_CONFIG", &cfg)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["var"]["fit"]["lags"], 2);
    assert_eq!(v["impulse_responses"][0]["values"].as_array().unwrap().len(), 5);

    fs::write(&cfg, "[defaults]\nhorizon = 4\n").unwrap();
    let out = run(&["run", "--round", "b", "--data", s(&data), "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn adf_table_reports_the_test() {
    let (_tmp, data) = demo_dir();
    let out = run(&["adf", "--series", "growthc", "--round", "a", "--data", s(&data)]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Null Hypothesis: GROWTHC has a unit root"));
    assert!(text.contains("maxlag=4"));
    let out = run(&[
        "adf",
        "--series",
        "growthc",
        "--round",
        "a",
        "--difference",
        "--lag",
        "1",
        "--data",
        s(&data),
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["tested"], "D(GROWTHC)");
    assert_eq!(v["lag"], 1);
}
