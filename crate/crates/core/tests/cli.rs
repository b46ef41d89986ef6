//! End-to-end checks of the `longctl` binary: exit codes, output files, and
//! the summary/trace round-trip audit.

use std::path::Path;
use std::process::{Command, Output};

use longctl::harness::{read_trace_csv, SSE_WINDOW_FRACTION, SUMMARY_HEADER};
use longctl::metrics::{rise_time, rmse, steady_state_error};

fn longctl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_longctl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn bench_config_path() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/bench.toml").to_string()
}

#[test]
fn run_with_defaults_exits_zero() {
    let out = longctl(&["run"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with(SUMMARY_HEADER));
    assert_eq!(stdout.lines().count(), 2);
}

#[test]
fn invalid_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[vehicle]\nmass_kg = -1.0\n").unwrap();
    let out = longctl(&["--config", bad.to_str().unwrap(), "run"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("vehicle.mass_kg"));

    let out = longctl(&["run", "--scenario", "warp"]);
    assert_eq!(out.status.code(), Some(2));

    let out = longctl(&["--dt", "0", "run"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_file_exits_one() {
    let out = longctl(&["--config", "/nonexistent/config.toml", "run"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn compare_writes_matrix_deterministically() {
    let cfg = bench_config_path();
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let out = longctl(&["--config", &cfg, "compare", "--out", dir.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }

    let summary_a = std::fs::read(dir_a.path().join("summary.csv")).unwrap();
    let summary_b = std::fs::read(dir_b.path().join("summary.csv")).unwrap();
    assert_eq!(summary_a, summary_b);

    let traces: Vec<_> = std::fs::read_dir(dir_a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != "summary.csv")
        .collect();
    assert_eq!(traces.len(), 12);
    for name in &traces {
        let a = std::fs::read(dir_a.path().join(name)).unwrap();
        let b = std::fs::read(dir_b.path().join(name)).unwrap();
        assert_eq!(a, b, "trace {name} differs between identical runs");
    }

    audit_summary(dir_a.path());
}

/// Every summary row must be recomputable from its trace file alone.
fn audit_summary(dir: &Path) {
    let summary = std::fs::read_to_string(dir.join("summary.csv")).unwrap();
    let mut lines = summary.lines();
    assert_eq!(lines.next(), Some(SUMMARY_HEADER));
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 6, "bad summary row: {line}");
        let (scenario, terrain, controller) = (fields[0], fields[1], fields[2]);
        let trace = read_trace_csv(&dir.join(format!("{scenario}_{terrain}_{controller}.csv")))
            .expect("trace parses");

        // every reference profile ends at its commanded target
        let target = trace.rows.last().expect("non-empty trace").ref_velocity_mps;
        let expect_rise = rise_time(&trace, target);
        match (fields[3], expect_rise) {
            ("undefined", None) => {}
            (text, Some(t)) => {
                let parsed: f64 = text.parse().expect("rise time numeric");
                assert!((parsed - t).abs() < 1e-6, "{line}: rise {parsed} vs {t}");
            }
            (text, None) => panic!("{line}: summary has rise {text}, trace has none"),
        }
        let parsed_rmse: f64 = fields[4].parse().unwrap();
        let parsed_sse: f64 = fields[5].parse().unwrap();
        let expect_rmse = rmse(&trace);
        let expect_sse = steady_state_error(&trace, SSE_WINDOW_FRACTION);
        assert!(
            (parsed_rmse - expect_rmse).abs() <= 1e-6 * expect_rmse.max(1.0),
            "{line}: rmse {parsed_rmse} vs {expect_rmse}"
        );
        assert!(
            (parsed_sse - expect_sse).abs() <= 1e-6 * expect_sse.max(1.0),
            "{line}: sse {parsed_sse} vs {expect_sse}"
        );
    }
}
