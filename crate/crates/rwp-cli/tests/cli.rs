//! End-to-end tests of the `rwp` binary: subcommand output schemas,
//! determinism across thread counts, and the documented exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn rwp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rwp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = rwp(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(name)
}

#[test]
fn trace_emits_csv_with_header() {
    let text = stdout(&[
        "trace", "--lambda", "1", "--periods", "25", "--seed", "3",
    ]);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "period,x0,y0,x1,y1,velocity,pause");
    assert_eq!(lines.count(), 25);
}

#[test]
fn trace_respects_reflecting_window() {
    let text = stdout(&[
        "trace", "--lambda", "0.25", "--periods", "200", "--seed", "4", "--window", "2x2",
    ]);
    for line in text.lines().skip(1) {
        let cols: Vec<f64> = line
            .split(',')
            .skip(1)
            .take(4)
            .map(|v| v.parse().unwrap())
            .collect();
        for c in cols {
            assert!((0.0..=2.0).contains(&c), "coordinate {c} escaped");
        }
    }
}

#[test]
fn hex_reports_have_schema_and_analytic() {
    let text = stdout(&[
        "hex", "--lambda", "1", "--d", "1", "--reps", "2000", "--seed", "5",
    ]);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "metric,mean,var,reps,ci95,seed,analytic");
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "handovers_per_period");
    let analytic: f64 = first[6].parse().unwrap();
    assert!((analytic - 0.367552596947861).abs() < 1e-12);
}

#[test]
fn pvt_json_report_schema() {
    let text = stdout(&[
        "pvt", "--mu", "4", "--lambda", "1", "--reps", "1000", "--seed", "6", "--format", "json",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let report = &doc.as_array().unwrap()[0];
    for key in ["metric", "mean", "var", "reps", "ci95", "seed", "analytic"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    let analytic = report["analytic"].as_f64().unwrap();
    assert!((analytic - 2.0 / std::f64::consts::PI * 2.0).abs() < 1e-12);
}

#[test]
fn pvt_sojourn_emits_distribution_table() {
    let text = stdout(&[
        "pvt", "--mu", "4", "--lambda", "1", "--reps", "400", "--seed", "7", "--sojourn",
        "--grid", "10",
    ]);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,pdf,cdf,empirical_cdf");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 10);
    let first: Vec<f64> = rows[0].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert_eq!(first[1], 0.0);
}

#[test]
fn hex_sojourn_brackets() {
    let text = stdout(&[
        "hex", "--lambda", "1", "--d", "1", "--seed", "8", "--sojourn",
    ]);
    let mut value = None;
    let mut lower = None;
    let mut upper = None;
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let mean: f64 = cols[1].parse().unwrap();
        match cols[0] {
            "hex_sojourn_time" => value = Some(mean),
            "hex_sojourn_lower" => lower = Some(mean),
            "hex_sojourn_upper" => upper = Some(mean),
            other => panic!("unexpected metric {other}"),
        }
    }
    let (v, l, u) = (value.unwrap(), lower.unwrap(), upper.unwrap());
    assert!(l <= v && v <= u, "sojourn {v} outside [{l}, {u}]");
}

#[test]
fn stats_emits_both_tables() {
    let text = stdout(&[
        "stats", "--periods", "4000", "--seed", "9", "--pause", "power:1:0.1:10",
    ]);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "table,x,proposed,classical,levy");
    let (mut lengths, mut rates) = (0, 0);
    for line in lines {
        match line.split(',').next().unwrap() {
            "length_ccdf" => lengths += 1,
            "switch_rate_ccdf" => rates += 1,
            other => panic!("unexpected table {other}"),
        }
    }
    assert_eq!(lengths, 60);
    assert_eq!(rates, 60);
}

#[test]
fn deploy_runs_on_synthetic_file() {
    let path = temp_path("rwp_cli_deploy.csv");
    let mut text = String::new();
    let mut state = 12345u64;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..200 {
        text.push_str(&format!("{},{}\n", 105.0 * next(), 90.0 * next()));
    }
    std::fs::write(&path, text).unwrap();

    let out = stdout(&[
        "deploy",
        path.to_str().unwrap(),
        "--lambda",
        "2000",
        "--reps",
        "500",
        "--seed",
        "10",
    ]);
    assert!(out.contains("handovers_per_period"));
    assert!(out.contains("deployment_mu,200"));
    assert!(out.contains("deployment_hex_side"));
}

#[test]
fn sweep_reports_slope() {
    let text = stdout(&[
        "sweep", "--mu", "1,4,16", "--reps", "1500", "--seed", "11",
    ]);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "metric,mu,mean,var,reps,ci95,seed,analytic"
    );
    let slope_row = lines.clone().last().unwrap();
    assert!(slope_row.starts_with("loglog_slope,,"));
    let slope: f64 = slope_row.split(',').nth(2).unwrap().parse().unwrap();
    assert!((slope - 0.5).abs() < 0.1, "slope = {slope}");
    assert_eq!(lines.count(), 4);
}

#[test]
fn identical_scenarios_are_byte_identical_across_threads() {
    let a = temp_path("rwp_cli_det_a.csv");
    let b = temp_path("rwp_cli_det_b.csv");
    for (path, threads) in [(&a, "1"), (&b, "4")] {
        let out = rwp(&[
            "pvt", "--mu", "9", "--lambda", "1", "--reps", "800", "--seed", "12",
            "--threads", threads, "--out", path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn invalid_arguments_exit_2() {
    // Unparseable velocity law.
    let out = rwp(&["hex", "--velocity", "warp:9"]);
    assert_eq!(out.status.code(), Some(2));
    // Invalid parameter value.
    let out = rwp(&["hex", "--lambda", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    // Unknown flag (clap's own exit code).
    let out = rwp(&["hex", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn input_file_errors_exit_3() {
    let out = rwp(&["deploy", "/nonexistent/sites.csv", "--lambda", "100"]);
    assert_eq!(out.status.code(), Some(3));

    let path = temp_path("rwp_cli_bad.csv");
    std::fs::write(&path, "1,2\nbroken line\n").unwrap();
    let out = rwp(&["deploy", path.to_str().unwrap(), "--lambda", "100"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "stderr: {err}");
}

