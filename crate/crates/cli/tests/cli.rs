//! End-to-end tests of the `hydroq` binary: exit codes, file layout,
//! determinism, and the linear-forecast oracle.

use std::path::Path;
use std::process::{Command, Output};

fn hydroq(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hydroq"))
        .args(args)
        .current_dir(dir)
        .env_remove("HYDROQ_OUT")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn write_config(dir: &Path, body: &str) {
    std::fs::write(dir.join("config.json"), body).unwrap();
}

const SMALL_CONFIG: &str = r#"{
  "version": 1,
  "seed": 9,
  "synth": { "days": 900 },
  "models": [
    { "name": "majority", "kind": "majority" },
    { "name": "always_flood", "kind": "always_positive" },
    { "name": "tree", "kind": "tree", "max_depth": 5, "min_leaf": 2 },
    { "name": "qboost", "kind": "qboost", "pool": 8, "lambda_factor": 0.01, "max_rows": 250 }
  ]
}"#;

#[test]
fn synth_then_benchmark_writes_reports_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), SMALL_CONFIG);

    let synth = hydroq(dir.path(), &["--config", "config.json", "--out", "out", "synth"]);
    assert!(synth.status.success(), "{}", String::from_utf8_lossy(&synth.stderr));
    assert!(dir.path().join("out/synth/level.csv").exists());
    assert!(dir.path().join("out/synth/precipitation.csv").exists());

    let bench = hydroq(dir.path(), &["--config", "config.json", "--out", "out", "benchmark"]);
    assert!(bench.status.success(), "{}", String::from_utf8_lossy(&bench.stderr));
    for file in ["metrics.csv", "table_classical.txt", "table_quantum.txt", "majority.kv.txt"] {
        assert!(dir.path().join("out/benchmark").join(file).exists(), "missing {file}");
    }
    let csv = std::fs::read_to_string(dir.path().join("out/benchmark/metrics.csv")).unwrap();
    assert!(csv.starts_with("model,task,seed,status,"));
    assert!(csv.lines().next().unwrap().ends_with(",training_time_s"));
    assert_eq!(csv.lines().count(), 5, "header plus one row per model");
    let text = stdout(&bench);
    assert!(text.contains("classical models"));
    assert!(text.contains("quantum-simulated models"));
}

#[test]
fn eda_reports_calibrated_class_shares() {
    let dir = tempfile::tempdir().unwrap();
    // Six full years keeps the whole-series flood share near its target.
    write_config(
        dir.path(),
        r#"{ "version": 1, "seed": 3, "synth": { "days": 2192 } }"#,
    );
    let eda = hydroq(dir.path(), &["--config", "config.json", "--out", "out", "eda"]);
    assert!(eda.status.success(), "{}", String::from_utf8_lossy(&eda.stderr));

    let csv = std::fs::read_to_string(dir.path().join("out/eda/report.csv")).unwrap();
    let flood_pct: f64 = csv
        .lines()
        .find_map(|l| l.strip_prefix("flood_pct,"))
        .expect("flood_pct row")
        .parse()
        .unwrap();
    let non_flood_pct: f64 = csv
        .lines()
        .find_map(|l| l.strip_prefix("non_flood_pct,"))
        .expect("non_flood_pct row")
        .parse()
        .unwrap();
    assert!((flood_pct - 5.78).abs() < 0.5, "flood share {flood_pct}%");
    assert!((flood_pct + non_flood_pct - 100.0).abs() < 0.01);

    for stem in ["level_hist", "level_series", "monthly_levels"] {
        assert!(dir.path().join(format!("out/eda/{stem}.svg")).exists());
        assert!(dir.path().join(format!("out/eda/{stem}.csv")).exists());
    }
}

#[test]
fn forecast_matches_noiseless_ar2_recurrence() {
    let dir = tempfile::tempdir().unwrap();
    // y_t = 5 + 0.6 y_{t-1} + 0.3 y_{t-2}, stable and noiseless.
    let (c, a1, a2) = (5.0, 0.6, 0.3);
    let mut series = vec![50.0, 52.0];
    for t in 2..400 {
        let y = c + a1 * series[t - 1] + a2 * series[t - 2];
        series.push(y);
    }
    let mut csv = String::from("timestamp,value\n");
    let start = chrono::NaiveDate::from_ymd_opt(2010, 1, 1).unwrap();
    for (i, y) in series.iter().enumerate() {
        csv.push_str(&format!("{}T00:00:00,{y}\n", start + chrono::Duration::days(i as i64)));
    }
    std::fs::write(dir.path().join("level.csv"), csv).unwrap();
    write_config(
        dir.path(),
        r#"{ "version": 1, "seed": 1, "data": { "level_path": "level.csv" } }"#,
    );

    let out = hydroq(
        dir.path(),
        &[
            "--config", "config.json", "--out", "out", "forecast",
            "--model", "ar", "--lags", "2", "--horizon", "6",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let forecast = std::fs::read_to_string(dir.path().join("out/forecast/forecast.csv")).unwrap();
    let predicted: Vec<f64> = forecast
        .lines()
        .skip(1)
        .map(|l| l.split_once(',').unwrap().1.parse().unwrap())
        .collect();
    assert_eq!(predicted.len(), 6);
    let mut window = [series[398], series[399]];
    for (step, &p) in predicted.iter().enumerate() {
        let expected = c + a1 * window[1] + a2 * window[0];
        assert!(
            (p - expected).abs() < 1e-6,
            "step {}: {p} vs {expected}",
            step + 1
        );
        window = [window[1], expected];
    }
}

#[test]
fn variational_forecaster_runs_and_records_costs() {
    let dir = tempfile::tempdir().unwrap();
    write_config(
        dir.path(),
        r#"{
  "version": 1, "seed": 5,
  "synth": { "days": 140 },
  "forecast": { "depth": 1, "reps": 1, "learning_rate": 0.2, "iters": 7 }
}"#,
    );
    let out = hydroq(
        dir.path(),
        &[
            "--config", "config.json", "--out", "out", "forecast",
            "--model", "qar", "--lags", "3", "--horizon", "4",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let forecast = std::fs::read_to_string(dir.path().join("out/forecast/forecast.csv")).unwrap();
    assert_eq!(forecast.lines().count(), 5, "header plus one row per step");
    let costs = std::fs::read_to_string(dir.path().join("out/forecast/cost_history.csv")).unwrap();
    assert_eq!(costs.lines().count(), 8, "header plus one row per iteration");
    for value in forecast.lines().skip(1).map(|l| l.split_once(',').unwrap().1) {
        let v: f64 = value.parse().unwrap();
        assert!(v.is_finite());
    }
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), SMALL_CONFIG);

    // Unknown flag: usage error.
    let bad_flag = hydroq(dir.path(), &["--definitely-not-a-flag", "synth"]);
    assert_eq!(bad_flag.status.code(), Some(2));

    // Unknown subcommand: usage error.
    let bad_cmd = hydroq(dir.path(), &["transmogrify"]);
    assert_eq!(bad_cmd.status.code(), Some(2));

    // Missing config file: runtime error.
    let missing = hydroq(dir.path(), &["--config", "nope.json", "synth"]);
    assert_eq!(missing.status.code(), Some(1));

    // Config pointing at a nonexistent data file: rejected at load.
    write_config(
        dir.path(),
        r#"{ "version": 1, "seed": 1, "data": { "level_path": "ghost.csv" } }"#,
    );
    let ghost = hydroq(dir.path(), &["--config", "config.json", "eda"]);
    assert_eq!(ghost.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&ghost.stderr).contains("ghost.csv"));

    // Unsupported config version: rejected at load.
    write_config(dir.path(), r#"{ "version": 99, "seed": 1 }"#);
    let version = hydroq(dir.path(), &["--config", "config.json", "synth"]);
    assert_eq!(version.status.code(), Some(1));

    // Unknown model name: runtime error.
    write_config(dir.path(), SMALL_CONFIG);
    let unknown = hydroq(
        dir.path(),
        &["--config", "config.json", "--out", "out", "train", "--model", "zeppelin"],
    );
    assert_eq!(unknown.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("zeppelin"));

    // Help: success, and it documents the strict threshold.
    let help = hydroq(dir.path(), &["--help"]);
    assert_eq!(help.status.code(), Some(0));
    let text = stdout(&help);
    assert!(text.contains("strictly greater"));
    assert!(text.contains("flood class"));
}

#[test]
fn commands_write_only_inside_the_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), SMALL_CONFIG);
    for args in [
        vec!["--config", "config.json", "--out", "out", "synth"],
        vec!["--config", "config.json", "--out", "out", "eda"],
        vec!["--config", "config.json", "--out", "out", "train", "--model", "tree"],
        vec!["--config", "config.json", "--out", "out", "benchmark"],
    ] {
        let out = hydroq(dir.path(), &args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let mut entries: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    entries.sort();
    assert_eq!(entries, vec!["config.json", "out"]);
}

#[test]
fn out_dir_falls_back_to_environment_variable() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), SMALL_CONFIG);
    let out = Command::new(env!("CARGO_BIN_EXE_hydroq"))
        .args(["--config", "config.json", "synth"])
        .current_dir(dir.path())
        .env("HYDROQ_OUT", "env-out")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("env-out/synth/level.csv").exists());
}

#[test]
fn train_then_evaluate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), SMALL_CONFIG);
    let train = hydroq(
        dir.path(),
        &["--config", "config.json", "--out", "out", "train", "--model", "tree"],
    );
    assert!(train.status.success(), "{}", String::from_utf8_lossy(&train.stderr));
    assert!(dir.path().join("out/models/tree.model.txt").exists());

    let eval = hydroq(
        dir.path(),
        &["--config", "config.json", "--out", "out", "evaluate", "--model", "tree"],
    );
    assert!(eval.status.success(), "{}", String::from_utf8_lossy(&eval.stderr));
    let kv = std::fs::read_to_string(dir.path().join("out/evaluate/tree.kv.txt")).unwrap();
    assert!(kv.contains("model=tree"));
    assert!(kv.contains("task=classification"));
    assert!(kv.lines().last().unwrap().starts_with("training_time_s="));
}

#[test]
fn identical_invocations_reproduce_every_report_byte() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), SMALL_CONFIG);
    for out in ["a", "b"] {
        for cmd in ["synth", "eda", "benchmark"] {
            let run = hydroq(dir.path(), &["--config", "config.json", "--out", out, cmd]);
            assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
        }
    }
    for file in [
        "synth/level.csv",
        "synth/precipitation.csv",
        "eda/report.csv",
        "eda/report.txt",
        "eda/level_hist.svg",
        "eda/monthly_levels.csv",
    ] {
        let a = std::fs::read(dir.path().join("a").join(file)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between runs");
    }
    // The benchmark CSV matches once the trailing wall-clock column goes.
    let strip = |path: std::path::PathBuf| -> String {
        std::fs::read_to_string(path)
            .unwrap()
            .lines()
            .map(|l| l.rsplit_once(',').map_or_else(|| l.to_string(), |(head, _)| head.to_string()))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(
        strip(dir.path().join("a/benchmark/metrics.csv")),
        strip(dir.path().join("b/benchmark/metrics.csv"))
    );
}
