use std::path::Path;
use std::process::{Command, Output};

use pinch_cli::output::csv_bytes;
use pinch_cli::table1::{parse_csv, Table1Record};
use serde_json::Value;

fn pinch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pinch"))
        .args(args)
        .output()
        .expect("pinch binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn schema_validator() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schema/report.json");
    let schema: Value = serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

fn assert_valid(doc: &Value) {
    let validator = schema_validator();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "schema violations: {errors:?}");
}

fn json_of(args: &[&str]) -> Value {
    let out = pinch(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn single_row_table() {
    let out = pinch(&["table1", "--n", "5..5", "--variant", "listing"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(
        lines[0],
        "n,delta_n_listing,delta_n_proposition,table1_value,deviation_listing,deviation_proposition,crossings,notes"
    );
    let cells: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(cells[0], "5");
    assert_eq!(cells[3], "0.94888");
    assert_eq!(cells[1].trim_start_matches("0.").len(), 10);
    assert_eq!(cells[6], "listing:1");
    assert!(!text.contains('\r'));
}

#[test]
fn csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let out = pinch(&[
        "table1",
        "--n",
        "5..7",
        "--variant",
        "both",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let bytes = std::fs::read(&path).unwrap();
    let records: Vec<Table1Record> = parse_csv(&bytes).unwrap();
    assert_eq!(records.len(), 3);
    assert_eq!(csv_bytes(&records).unwrap(), bytes);
    assert_eq!(parse_csv(&csv_bytes(&records).unwrap()).unwrap(), records);
    assert!(records
        .iter()
        .all(|r| r.delta_n_proposition.is_none() && r.crossings.ends_with("proposition:0")));
}

#[test]
fn json_reports_validate_against_schema() {
    assert_valid(&json_of(&[
        "table1",
        "--n",
        "5..6",
        "--variant",
        "both",
        "--format",
        "json",
    ]));
    assert_valid(&json_of(&[
        "curve",
        "--n",
        "5",
        "--delta",
        "0.95",
        "--samples",
        "20",
        "--format",
        "json",
    ]));
    assert_valid(&json_of(&[
        "curve",
        "--n",
        "6",
        "--delta",
        "1",
        "--variant",
        "both",
        "--samples",
        "5",
        "--format",
        "json",
    ]));
    assert_valid(&json_of(&[
        "integral",
        "--n",
        "5..8",
        "--delta",
        "1",
        "--include-sphere-factor",
        "--format",
        "json",
    ]));
    assert_valid(&json_of(&[
        "integral",
        "--n",
        "5",
        "--delta",
        "0.6",
        "--variant",
        "both",
        "--format",
        "json",
    ]));
    assert_valid(&json_of(&["check", "--n", "5..6", "--format", "json"]));
}

#[test]
fn schema_rejects_malformed_reports() {
    let mut doc = json_of(&["integral", "--n", "5", "--delta", "0.9", "--format", "json"]);
    doc["rows"][0]["variant"] = Value::from("both");
    assert!(!schema_validator().is_valid(&doc));
}

#[test]
fn format_is_inferred_from_extension() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    assert!(pinch(&[
        "integral",
        "--n",
        "5",
        "--delta",
        "0.9",
        "--out",
        path.to_str().unwrap()
    ])
    .status
    .success());
    let doc: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(doc["command"], "integral");
}

#[test]
fn curve_has_samples_plus_breakpoints() {
    let text = stdout(&pinch(&["curve", "--n", "5", "--delta", "0.95", "--samples", "100"]));
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 103);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let root = rows.iter().find(|r| r.contains(",rho_delta,")).unwrap();
    let residual: f64 = root.split(',').nth(col("residual")).unwrap().parse().unwrap();
    assert!(residual.abs() < 1e-10);
}

#[test]
fn curve_at_delta_one_collapses_breakpoints() {
    let doc = json_of(&[
        "curve",
        "--n",
        "9",
        "--delta",
        "1",
        "--samples",
        "8",
        "--format",
        "json",
    ]);
    let flagged: Vec<&Value> = doc["rows"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["breakpoint"] != "")
        .collect();
    assert_eq!(flagged.len(), 3);
    for r in flagged {
        assert_eq!(r["phi_left"], r["phi_right"]);
    }
}

#[test]
fn integral_at_delta_one_reports_stated_closed_form() {
    let doc = json_of(&["integral", "--n", "5..6", "--delta", "1", "--format", "json"]);
    let row = &doc["rows"][0];
    assert!(row["value"].as_f64().unwrap() < 0.0);
    assert_eq!(row["claimed_delta_one"].as_f64().unwrap(), -0.08);
    assert!(row["sphere_area"].is_null());
    let doc = json_of(&["integral", "--n", "5", "--delta", "0.9", "--format", "json"]);
    assert!(doc["rows"][0]["claimed_delta_one"].is_null());
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &[][..],
        &["table1", "--tol", "1"],
        &["table1", "--tol", "1e-11"],
        &["table1", "--n", "4..20"],
        &["table1", "--n", "5..65"],
        &["curve", "--delta", "0.25"],
        &["curve", "--n", "5"],
        &["integral", "--delta", "1.5"],
        &["table1", "--scan-step", "0.5"],
        &["bogus"],
    ] {
        assert_eq!(pinch(args).status.code(), Some(2), "{args:?}");
    }
    assert_eq!(pinch(&["--help"]).status.code(), Some(0));
}

#[test]
fn failing_rows_exit_with_three_and_explain() {
    let out = pinch(&["table1", "--n", "5..5", "--variant", "proposition"]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    assert!(text.contains("proposition:0"));
    assert!(text.contains("I ≥ 0 on the whole grid"));
}

#[test]
fn check_passes_and_detects_perturbation() {
    let out = pinch(&["check", "--n", "5..6"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).lines().all(|l| l.contains("PASS")));

    let out = pinch(&["check", "--n", "5..6", "--inject-psi-perturbation", "1e-3"]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    let failing: Vec<&str> = text.lines().filter(|l| l.contains("FAIL")).collect();
    assert_eq!(failing.len(), 1);
    assert!(failing[0].starts_with("dual_path"));
}

#[test]
fn check_tol_only_touches_parameterized_suites() {
    let base = json_of(&["check", "--n", "5..6", "--format", "json"]);
    let loose = json_of(&["check", "--n", "5..6", "--tol", "1e-2", "--format", "json"]);
    for (b, l) in base["outcomes"]
        .as_array()
        .unwrap()
        .iter()
        .zip(loose["outcomes"].as_array().unwrap())
    {
        assert_eq!(b["name"], l["name"]);
        if l["parameterized"] == true {
            assert_eq!(l["tolerance"].as_f64(), Some(1e-2));
        } else {
            assert_eq!(b["tolerance"], l["tolerance"]);
        }
    }
    assert!(loose["outcomes"]
        .as_array()
        .unwrap()
        .iter()
        .any(|o| o["parameterized"] == true));
    assert!(loose["outcomes"]
        .as_array()
        .unwrap()
        .iter()
        .any(|o| o["parameterized"] == false));
}

#[test]
fn outputs_are_deterministic() {
    let a = pinch(&["table1", "--n", "5..8", "--format", "json"]).stdout;
    let b = pinch(&["table1", "--n", "5..8", "--format", "json"]).stdout;
    assert_eq!(a, b);
    let a = pinch(&["curve", "--n", "5", "--delta", "0.97", "--samples", "50"]).stdout;
    let b = pinch(&["curve", "--n", "5", "--delta", "0.97", "--samples", "50"]).stdout;
    assert_eq!(a, b);
}
