//! End-to-end tests of the `modwave` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn modwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modwave"))
        .args(args)
        .env_remove("MODWAVE_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("modwave-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

/// CSV body after the `#schema=` line with the `timing_ms` column removed.
fn csv_without_timing(text: &str) -> Vec<Vec<String>> {
    let (schema, body) = text.split_once('\n').unwrap();
    assert!(schema.starts_with("#schema="));
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(body.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let timing = headers.iter().position(|h| h == "timing_ms").unwrap();
    rdr.records()
        .map(|r| {
            r.unwrap()
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != timing)
                .map(|(_, v)| v.to_string())
                .collect()
        })
        .collect()
}

fn trailer_value(text: &str, key: &str) -> String {
    text.lines()
        .filter_map(|l| l.strip_prefix('#'))
        .flat_map(|l| l.split(' '))
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")).map(str::to_string))
        .unwrap_or_else(|| panic!("no `{key}` in trailer"))
}

#[test]
fn stable_kdv_wave_exits_zero() {
    let o = modwave(&["classify", "--equation", "kdv", "--a", "0.3", "--E", "0.01", "--c", "-1.2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "Stable");
    assert_eq!(v["conventions"].as_str().unwrap().len(), 64);
}

#[test]
fn focusing_mkdv_cnoidal_wave_exits_ten() {
    let o = modwave(&["classify", "--equation", "mkdv-focusing", "--a", "0", "--E", "0.5", "--c", "-1"]);
    assert_eq!(o.status.code(), Some(10), "{}", stderr(&o));
}

#[test]
fn json_output_round_trips_through_a_file() {
    let out = std::env::temp_dir().join(format!("modwave-cli-rt-{}.json", std::process::id()));
    let o = modwave(&[
        "classify", "--equation", "kdv", "--a", "0.3", "--E", "0.01", "--c", "-1.2", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let again = serde_json::to_string_pretty(&v).unwrap();
    assert_eq!(serde_json::from_str::<serde_json::Value>(&again).unwrap(), v);
    assert_eq!(v["input"]["params"]["a"], 0.3);
    std::fs::remove_file(out).ok();
}

#[test]
fn malformed_config_names_the_field() {
    let path = temp_file("bad.json", r#"{"equation": "kdv", "tolerances": {"tol_qaud": 1e-12}}"#);
    let o = modwave(&["classify", "--config", path.to_str().unwrap(), "--a", "0.3", "--E", "0.01", "--c", "-1.2"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("tol_qaud") && err.contains("line 1"), "{err}");
}

#[test]
fn negative_tolerance_is_rejected_with_the_field_name() {
    let o = modwave(&["classify", "--equation", "kdv", "--a", "0.3", "--E", "0.01", "--c", "-1.2", "--tol-quad", "-1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--tol-quad"), "{}", stderr(&o));
}

#[test]
fn config_file_drives_a_sweep() {
    let path = temp_file(
        "sweep.json",
        r#"{"equation": "kdv", "mode": "sweep", "params": {"a": {"start": 0.1, "stop": 0.3, "count": 3}, "E": 0.01, "c": -1.2},
            "output": {"format": "csv"}}"#,
    );
    let o = modwave(&["sweep", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_without_timing(&stdout(&o));
    assert_eq!(rows.len(), 3);
    assert_eq!(rows.iter().map(|r| r[2].as_str()).collect::<Vec<_>>(), ["0.1", "0.2", "0.3"]);
}

#[test]
fn sweep_output_is_independent_of_thread_count() {
    let args = |jobs: &'static str| {
        vec![
            "sweep", "--equation", "kdv", "--a", "0:0.4:5", "--E", "0.005:0.02:3", "--c", "-1.5:-1:2", "--format",
            "csv", "--jobs", jobs,
        ]
    };
    let one = modwave(&args("1"));
    let four = modwave(&args("4"));
    assert_eq!(one.status.code(), Some(0), "{}", stderr(&one));
    assert_eq!(four.status.code(), Some(0), "{}", stderr(&four));
    let (a, b) = (csv_without_timing(&stdout(&one)), csv_without_timing(&stdout(&four)));
    assert_eq!(a.len(), 30);
    assert_eq!(a, b);
}

#[test]
fn jobs_environment_variable_takes_precedence() {
    let base = ["sweep", "--equation", "kdv", "--a", "0.3", "--E", "0.01", "--c", "-1.2", "--jobs", "2"];
    let run = |value: &str| {
        Command::new(env!("CARGO_BIN_EXE_modwave")).args(base).env("MODWAVE_JOBS", value).output().unwrap()
    };
    assert_eq!(run("3").status.code(), Some(0));
    let bad = run("many");
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("MODWAVE_JOBS"), "{}", stderr(&bad));
}

#[test]
fn whitham_gamma_changes_sign_near_the_cutoff() {
    let o = modwave(&["smallamp", "--equation", "whitham", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let x: f64 = trailer_value(&text, "x").parse().unwrap();
    assert!((1.145..=1.147).contains(&x), "k* = {x}");
    assert_eq!(text.lines().filter(|l| l.starts_with("#sign_change")).count(), 1);
}

#[test]
fn fractional_kdv_index_flips_sign_at_unit_order() {
    let o = modwave(&["smallamp", "--equation", "fkdv:1", "--alpha", "0.6:2:15", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let x: f64 = trailer_value(&stdout(&o), "x").parse().unwrap();
    assert!((x - 1.0).abs() < 1e-6, "alpha = {x}");
}

#[test]
fn ilw_discriminant_grid_is_positive() {
    let o = modwave(&["smallamp", "--equation", "ilw:1", "--depth", "0.5:4:8", "--k", "0.2:3:15", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(trailer_value(&stdout(&o), "all_positive"), "true");
}

#[test]
fn bloch_check_agrees_for_kdv_and_benjamin_ono() {
    let kdv = modwave(&["bloch-check", "--equation", "kdv", "--a", "0.3", "--E", "0.01", "--c", "-1.2"]);
    assert_eq!(kdv.status.code(), Some(0), "{}", stderr(&kdv));
    let bo = modwave(&["bloch-check", "--equation", "benjamin-ono", "--a", "0", "--k", "1", "--c", "-2"]);
    assert_eq!(bo.status.code(), Some(0), "{}", stderr(&bo));
}

#[test]
fn validate_passes() {
    let o = modwave(&["validate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(!stderr(&o).contains("FAIL"));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
}
