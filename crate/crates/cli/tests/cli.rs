use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn tdsusy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdsusy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_string()
}

/// Parses `x,t,...` CSV into header and numeric rows.
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn reality_suite_passes_with_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let run = tdsusy(&["verify", "--suite", "reality", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(report["suite"], "reality");
    assert_eq!(report["passed"], true);
    let checks = report["checks"].as_array().unwrap();
    let reality: Vec<_> = checks.iter().filter(|c| c["name"].as_str().unwrap().starts_with("reality ")).collect();
    assert_eq!(reality.len(), 20);
    assert!(reality.iter().all(|c| c["measured"].as_f64().unwrap() <= 1e-10));
}

#[test]
fn families_suite_passes() {
    let run = tdsusy(&["verify", "--suite", "families"]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let report: Value = serde_json::from_slice(&run.stdout).unwrap();
    let families = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["name"].as_str().unwrap().starts_with("family "))
        .count();
    assert!(families >= 5);
}

#[test]
fn unknown_suite_is_a_usage_error() {
    assert_eq!(code(&tdsusy(&["verify", "--suite", "bogus"])), 2);
}

#[test]
fn failing_checks_name_the_identity() {
    // A tolerance no finite-difference residual can meet.
    let run = tdsusy(&["verify", "--suite", "factorize", "--tol", "1e-30", "--format", "csv"]);
    assert_eq!(code(&run), 1);
    let err = String::from_utf8_lossy(&run.stderr);
    assert!(err.contains("factorization: the adjoint times the operator"), "{err}");
    let csv = String::from_utf8(run.stdout).unwrap();
    assert!(csv.starts_with("name,identity,measured,limit,passed\n"));
    assert_eq!(tdsusy(&["verify", "--suite", "factorize", "--tol", "-1"]).status.code(), Some(2));
}

#[test]
fn free_even_ground_member_is_constant_in_x() {
    let run = tdsusy(&["potential", "--family", "free-even-k", "--k", "0", "--grid", "x=-3:3:7,t=0:2:5"]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let (header, rows) = parse_csv(&String::from_utf8(run.stdout).unwrap());
    assert_eq!(header, ["x", "t", "value"]);
    assert_eq!(rows.len(), 35);
    for r in &rows {
        assert!((r[2] + 1.0 / (1.0 + r[1] * r[1])).abs() < 1e-15);
    }
    // Row-major in t, then x.
    assert_eq!((rows[0][0], rows[0][1]), (-3.0, 0.0));
    assert_eq!((rows[1][0], rows[1][1]), (-2.0, 0.0));
    assert_eq!((rows[7][0], rows[7][1]), (-3.0, 0.5));
}

#[test]
fn potential_parameter_and_domain_errors_exit_2() {
    let odd = tdsusy(&["potential", "--family", "free-odd-k", "--k", "1", "--grid", "x=-1:1:5,t=0:1:2"]);
    assert_eq!(code(&odd), 2);
    assert!(String::from_utf8_lossy(&odd.stderr).contains("outside the domain"));
    let range = tdsusy(&["potential", "--family", "free-even-k", "--k", "7", "--grid", "x=-1:1:5,t=0:1:2"]);
    assert_eq!(code(&range), 2);
    let missing = tdsusy(&["potential", "--family", "free-evenodd-ml", "--m", "0", "--grid", "x=-1:1:5,t=0:1:2"]);
    assert_eq!(code(&missing), 2);
    let grid = tdsusy(&["potential", "--family", "free-even-k", "--k", "0", "--grid", "x=1:-1:5,t=0:1:2"]);
    assert_eq!(code(&grid), 2);
}

#[test]
fn juxtaposed_export_is_finite_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let run = tdsusy(&[
            "potential", "--family", "free-juxtaposed-n", "--n", "2", "--grid", "x=-6:6:61,t=0:2:11", "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&run), 0);
    }
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    let (_, rows) = parse_csv(std::str::from_utf8(&text).unwrap());
    assert!(rows.iter().all(|r| r[2].is_finite()));
}

#[test]
fn potential_json_carries_grid_and_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "fam.json", r#"{"family":"oscillator-anharmonic","lambda":1.0,"omega":1.0}"#);
    let run = tdsusy(&["potential", "--config", &cfg, "--grid", "x=-2:2:5,t=0.3:0.5:3", "--format", "json"]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let v: Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(v["grid"]["x"]["n"], 5);
    assert_eq!(v["values"].as_array().unwrap().len(), 15);
    assert_eq!(v["form"], "derived");
}

#[test]
fn single_seed_transform_matches_family_export() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "chain.json",
        r#"{"seed_potential":{"kind":"free"},
            "chain":[{"family":"free-lambda","lambda":4.5}],
            "state":{"family":"free-lambda","lambda":-0.5}}"#,
    );
    let grid = "x=-3:3:13,t=0:1.5:4";
    let t = tdsusy(&["transform", "--config", &cfg, "--grid", grid]);
    assert_eq!(code(&t), 0, "{}", String::from_utf8_lossy(&t.stderr));
    let (header, trows) = parse_csv(&String::from_utf8(t.stdout).unwrap());
    assert_eq!(header, ["x", "t", "U", "absW", "re", "im"]);
    let p = tdsusy(&["potential", "--family", "free-even-k", "--k", "2", "--grid", grid]);
    let (_, prows) = parse_csv(&String::from_utf8(p.stdout).unwrap());
    assert_eq!(trows.len(), prows.len());
    for (a, b) in trows.iter().zip(&prows) {
        assert_eq!((a[0], a[1]), (b[0], b[1]));
        assert!((a[2] - b[2]).abs() <= 1e-9 * b[2].abs().max(1.0), "{a:?} vs {b:?}");
        assert!(a[3] > 0.0);
    }
}

#[test]
fn inadmissible_chain_reports_its_sign_change() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        r#"{"seed_potential":{"kind":"free"},
            "chain":[{"family":"free-lambda","lambda":-1.5}],
            "state":{"family":"free-lambda","lambda":-0.5},
            "grid":{"x":{"a":-4.0,"b":4.0,"n":40},"t":{"a":0.0,"b":1.0,"n":3}}}"#,
    );
    let run = tdsusy(&["transform", "--config", &cfg]);
    assert_eq!(code(&run), 1);
    let err = String::from_utf8_lossy(&run.stderr);
    assert!(err.contains("changes sign 1 time(s)"), "{err}");
    assert!(err.contains("0.000000 at t = 0.5"), "{err}");
}

#[test]
fn transform_config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write_config(
        dir.path(),
        "empty.json",
        r#"{"seed_potential":{"kind":"free"},"chain":[],"state":{"family":"free-lambda","lambda":-0.5}}"#,
    );
    assert_eq!(code(&tdsusy(&["transform", "--config", &empty, "--grid", "x=-1:1:5,t=0:1:2"])), 2);
    let mismatch = write_config(
        dir.path(),
        "mismatch.json",
        r#"{"seed_potential":{"kind":"free"},"chain":[{"family":"oscillator-eigen","n":0,"omega":1.0}],
            "state":{"family":"free-lambda","lambda":-0.5}}"#,
    );
    assert_eq!(code(&tdsusy(&["transform", "--config", &mismatch, "--grid", "x=-1:1:5,t=0:1:2"])), 2);
    let garbage = write_config(dir.path(), "garbage.json", "{not json");
    assert_eq!(code(&tdsusy(&["transform", "--config", &garbage])), 2);
    assert_eq!(code(&tdsusy(&["transform", "--config", "/nonexistent/config.json"])), 2);
}

fn propagate_config(state: &str, tau: f64, box_: (f64, f64, usize)) -> String {
    format!(
        r#"{{"seed_potential":{{"kind":"free"}},{state}
            "box":{{"x_min":{},"x_max":{},"nodes":{}}},
            "tau":{tau},"t_final":1.0,"snapshots":[0.0,0.5,1.0]}}"#,
        box_.0, box_.1, box_.2
    )
}

#[test]
fn zero_state_propagates_to_a_zero_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "zero.json", &propagate_config("", 0.01, (-4.0, 4.0, 41)));
    let run = tdsusy(&["propagate", "--config", &cfg]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let (header, rows) = parse_csv(&String::from_utf8(run.stdout).unwrap());
    assert_eq!(header, ["x", "t", "re", "im"]);
    assert_eq!(rows.len(), 3 * 41);
    assert!(rows.iter().all(|r| r[2] == 0.0 && r[3] == 0.0));
}

#[test]
fn propagation_errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let state = r#""state":{"family":"free-lambda","lambda":-0.5},"#;
    let bad_tau = write_config(dir.path(), "tau.json", &propagate_config(state, 0.0, (-12.0, 12.0, 241)));
    assert_eq!(code(&tdsusy(&["propagate", "--config", &bad_tau])), 2);
    let small = write_config(dir.path(), "small.json", &propagate_config(state, 0.01, (-3.0, 3.0, 61)));
    let run = tdsusy(&["propagate", "--config", &small]);
    assert_eq!(code(&run), 1);
    assert!(String::from_utf8_lossy(&run.stderr).contains("box too small"));
}

#[test]
fn free_propagation_json_reports_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let state = r#""state":{"family":"free-lambda","lambda":-0.5},"#;
    let cfg = write_config(dir.path(), "free.json", &propagate_config(state, 5e-3, (-12.0, 12.0, 241)));
    let run = tdsusy(&["propagate", "--config", &cfg, "--format", "json"]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let v: Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(v["snapshots"].as_array().unwrap().len(), 3);
    assert!(v["diagnostics"]["max_norm_drift"].as_f64().unwrap() < 1e-10);
    let n0 = v["snapshots"][0]["norm_squared"].as_f64().unwrap();
    assert!((n0 - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-6);
}
