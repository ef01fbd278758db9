//! End-to-end runs of the `loopmorse` binary: exit codes, report content,
//! byte determinism, and the exported table files.

use std::process::{Command, Output};

use serde_json::Value;

fn loopmorse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loopmorse"))
        .args(args)
        .output()
        .expect("binary should run")
}

fn loopmorse_with_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loopmorse"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary should run")
}

fn parse_report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout should be one JSON document")
}

fn checks_by_name(report: &Value) -> Vec<(String, String, f64)> {
    report["checks"]
        .as_array()
        .expect("checks array")
        .iter()
        .map(|row| {
            (
                row["name"].as_str().unwrap().to_string(),
                row["status"].as_str().unwrap().to_string(),
                row["residual"].as_f64().unwrap(),
            )
        })
        .collect()
}

#[test]
fn analyze_point_reports_a_perfect_series() {
    let out = loopmorse(&["analyze", "--group", "su2", "--space", "point", "--n", "16", "--degree", "4"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = parse_report(&out);
    assert_eq!(report["command"], "analyze");
    assert_eq!(report["series"]["ordinary_display"], "1 + t^2 + t^4");
    assert_eq!(report["perfection"]["verdict"], "perfect");
    assert_eq!(report["perfection"]["compared_cap"], 4);

    let comps = report["components"].as_array().unwrap();
    let windings: Vec<i64> = comps.iter().map(|c| c["winding"].as_i64().unwrap()).collect();
    let indices: Vec<i64> = comps.iter().map(|c| c["index"].as_i64().unwrap()).collect();
    assert_eq!(windings, vec![0, 1]);
    assert_eq!(indices, vec![0, 2]);
    assert!(report["passed"].as_bool().unwrap());
}

#[test]
fn analyze_double_lists_the_commuting_pair_values() {
    let out = loopmorse(&["analyze", "--group", "su2", "--space", "double", "--genus", "1", "--n", "16"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = parse_report(&out);
    let comps = report["components"].as_array().unwrap();
    assert_eq!(comps.len(), 2);
    let values: Vec<f64> = comps.iter().map(|c| c["value"].as_f64().unwrap()).collect();
    let full_winding = 8.0 * std::f64::consts::PI * std::f64::consts::PI;
    assert!(values[0].abs() < 1e-9);
    assert!((values[1] - full_winding).abs() < 1e-9 * full_winding);
    assert_eq!(comps[1]["torus_fixed"], true);
    // No cohomology tables ship for the double, so the series is absent and
    // its perfection row cannot fail the run.
    assert!(report["series"].is_null());
    assert_eq!(report["perfection"]["verdict"], "unavailable");
    assert!(report["passed"].as_bool().unwrap());
}

#[test]
fn bad_configurations_exit_with_code_three() {
    assert_eq!(loopmorse(&["analyze", "--n", "0"]).status.code(), Some(3));
    assert_eq!(loopmorse(&["analyze", "--space", "conjugacy", "--n", "8"]).status.code(), Some(3));
    assert_eq!(loopmorse(&["analyze", "--metric-scale", "-1", "--n", "8"]).status.code(), Some(3));
    assert_eq!(loopmorse(&["analyze", "--genus", "2", "--n", "8"]).status.code(), Some(3));
    let out = loopmorse_with_env(&["analyze", "--n", "8"], "LOOPMORSE_THREADS", "zero");
    assert_eq!(out.status.code(), Some(3));
    // Unknown flags are configuration errors too; help is not.
    assert_eq!(loopmorse(&["analyze", "--frobnicate"]).status.code(), Some(3));
    assert_eq!(loopmorse(&["--help"]).status.code(), Some(0));
}

#[test]
fn identical_runs_emit_identical_bytes() {
    let args = ["analyze", "--group", "su2", "--space", "point", "--n", "16", "--seed", "7"];
    let first = loopmorse(&args);
    let second = loopmorse(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout, "same config and seed must emit identical bytes");
    // A thread cap changes scheduling, never the canonical bytes.
    let capped = loopmorse_with_env(&args, "LOOPMORSE_THREADS", "1");
    assert_eq!(capped.status.code(), Some(0));
    assert_eq!(first.stdout, capped.stdout);
}

#[test]
fn verify_passes_and_marks_point_lemmas_vacuous() {
    let out = loopmorse(&["verify", "--n", "12"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = parse_report(&out);
    let rows = checks_by_name(&report);
    let lemma_rows = [
        "moment-map first-order image",
        "commuting-direction nullity",
        "nondegenerate-kernel containment",
        "conjugation invariance identity",
    ];
    for (name, status, _) in &rows {
        let expected = if lemma_rows.contains(&name.as_str()) { "vacuous" } else { "pass" };
        assert_eq!(status, expected, "row '{name}'");
    }
    assert!(rows.len() >= 12, "every suite reports a row");
}

#[test]
fn verify_exercises_the_lemmas_off_the_point_space() {
    let out = loopmorse(&["verify", "--space", "conjugacy", "--class-angles", "0.7", "--n", "8"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = parse_report(&out);
    for (name, status, residual) in checks_by_name(&report) {
        assert_eq!(status, "pass", "row '{name}'");
        assert!(residual.is_finite(), "row '{name}' records its residual");
    }
}

#[test]
fn tightened_tolerance_turns_residuals_into_failures() {
    let out = loopmorse(&["verify", "--n", "12", "--tolerance", "1e-15"]);
    assert_eq!(out.status.code(), Some(2));
    let report = parse_report(&out);
    assert!(!report["passed"].as_bool().unwrap());
    let failed: Vec<_> = checks_by_name(&report)
        .into_iter()
        .filter(|(_, status, _)| status == "fail")
        .collect();
    assert!(!failed.is_empty(), "honest numerics cannot meet 1e-15 everywhere");
    for (name, _, residual) in &failed {
        assert!(*residual > 1e-15, "failing row '{name}' reports its magnitude");
    }
}

#[test]
fn export_writes_the_index_ladder_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("tables");
    let out = loopmorse(&["export-tables", "--n", "80", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let listed = String::from_utf8_lossy(&out.stdout);
    for file in ["index_table.csv", "series.csv", "conjugate_schedule.csv", "report.json"] {
        assert!(listed.contains(file), "stdout lists {file}");
        assert!(out_dir.join(file).exists(), "{file} written");
    }

    let index = std::fs::read_to_string(out_dir.join("index_table.csv")).unwrap();
    let mut lines = index.lines();
    assert_eq!(lines.next(), Some("k,xi_norm_sq,lambda"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    for (row, (k, lambda)) in rows.iter().zip([(0, 0), (1, 2), (2, 6), (3, 10)]) {
        assert_eq!(row[0], k.to_string());
        assert_eq!(row[2], lambda.to_string());
        let value: f64 = row[1].parse().unwrap();
        let expected = 8.0 * std::f64::consts::PI.powi(2) * (k * k) as f64;
        assert!((value - expected).abs() <= 1e-9 * expected.max(1.0));
    }

    // Conjugate times m/(2k) on (0, 1), multiplicity 2 each: 1 + 3 + 5 rows.
    let schedule = std::fs::read_to_string(out_dir.join("conjugate_schedule.csv")).unwrap();
    assert_eq!(schedule.lines().count(), 1 + 9);
    assert!(schedule.lines().skip(1).all(|l| l.ends_with(",2")));

    // Series table runs through the determined cap 4·3 + 1 = 13.
    let series = std::fs::read_to_string(out_dir.join("series.csv")).unwrap();
    assert_eq!(series.lines().count(), 1 + 14);
    assert_eq!(series.lines().last(), Some("13,0,0"));
    assert!(series.lines().any(|l| l == "12,1,4"));

    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["command"], "export-tables");
    assert_eq!(report["components"].as_array().unwrap().len(), 4);
}

#[test]
fn export_on_an_empty_run_writes_headers_only() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("empty");
    // One segment cannot hold the class minimum below the sublevel bound, so
    // the enumeration is empty and every table reduces to its header.
    let out = loopmorse(&[
        "export-tables",
        "--space",
        "conjugacy",
        "--class-angles",
        "2.5",
        "--n",
        "1",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    for (file, header) in [
        ("index_table.csv", "k,xi_norm_sq,lambda"),
        ("series.csv", "degree,ordinary,equivariant"),
        ("conjugate_schedule.csv", "k,time,multiplicity"),
    ] {
        let text = std::fs::read_to_string(out_dir.join(file)).unwrap();
        assert_eq!(text.trim_end(), header, "{file} is header-only");
    }
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert!(report["components"].as_array().unwrap().is_empty());
    assert!(report["series"].is_null());
}

#[test]
fn csv_format_projects_the_tables() {
    let out = loopmorse(&["analyze", "--n", "12", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("winding,velocity_angles,value,index,orbit,torus_fixed"));
    assert_eq!(text.lines().count(), 1 + 2);

    let out = loopmorse(&["verify", "--n", "12", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("name,residual,tolerance,status"));
    assert!(text.lines().any(|l| l.ends_with(",vacuous")));
}
