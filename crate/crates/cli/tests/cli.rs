use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use grassmann_fock::distribution::{weighted_norm, WeightSystem};
use grassmann_fock::process::{ModelConfig, ProcessModel, SpectralDensity};
use grassmann_fock::GrassmannElement;
use serde_json::Value;
use tempfile::TempDir;

fn grassmann(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grassmann")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const ONE: &str = r#"{"terms":[{"gens":[],"re":1,"im":0}]}"#;

/// `(t, s, K_series, K_oracle, K_closed_form, rel_err)` rows, without the summary row.
fn read_csv(path: &Path) -> (Vec<[f64; 6]>, f64) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,s,K_series,K_oracle,K_closed_form,rel_err"));
    let mut rows = Vec::new();
    let mut max = None;
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 6, "{line}");
        if cells[0] == "max" {
            max = Some(cells[5].parse().unwrap());
            continue;
        }
        let mut row = [0.0; 6];
        for (r, c) in row.iter_mut().zip(&cells) {
            *r = c.parse().unwrap();
        }
        rows.push(row);
    }
    (rows, max.expect("summary row present"))
}

#[test]
fn check_algebra_passes() {
    let out = grassmann(&["check", "--suite", "algebra", "--seed", "42", "--samples", "10000"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);
    for inv in report["invariants"].as_array().unwrap() {
        assert_eq!(inv["samples"], 10000);
        assert!(inv["worst_margin"].is_number());
    }
}

#[test]
fn check_all_reports_every_invariant() {
    let out = grassmann(&["check", "--samples", "100"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["invariants"].as_array().unwrap().len() >= 12);
}

#[test]
fn check_is_deterministic() {
    let args = ["check", "--suite", "norms", "--seed", "9", "--samples", "200"];
    assert_eq!(grassmann(&args).stdout, grassmann(&args).stdout);
}

#[test]
fn vage_below_growth_threshold_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "cfg.json", r#"{"weights":{"phi":"linear","lambda":0.1,"G_max":64}}"#);
    let out = grassmann(&["--config", s(&cfg), "check", "--suite", "vage"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("growth condition"), "{}", stderr(&out));
}

#[test]
fn bad_flags_exit_two() {
    assert_eq!(code(&grassmann(&["check", "--suite", "nonsense"])), 2);
    assert_eq!(code(&grassmann(&["check", "--samples", "-3"])), 2);
    assert_eq!(code(&grassmann(&["covariance", "--bm", "--t-grid", "2:1:0.5"])), 2);
    assert_eq!(code(&grassmann(&["covariance", "--H", "1.5", "--t-grid", "1"])), 2);
    assert_eq!(code(&grassmann(&["--g-max", "65", "eval", "--program", "x.json"])), 2);
    assert_eq!(code(&grassmann(&["frobnicate"])), 2);
}

#[test]
fn brownian_covariance_table() {
    let dir = TempDir::new().unwrap();
    let bm = dir.path().join("bm.csv");
    let out = grassmann(&["covariance", "--bm", "--t-grid", "0.5:2:0.5", "--n-max", "400", "--out", s(&bm)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (rows, max) = read_csv(&bm);
    assert_eq!(rows.len(), 16);
    let worst = rows.iter().map(|r| (r[2] - r[0].min(r[1])).abs()).fold(0.0, f64::max);
    assert!(worst <= 0.05, "{worst}");
    assert_eq!(max, rows.iter().map(|r| r[5]).fold(0.0, f64::max));

    let half = dir.path().join("half.csv");
    let out = grassmann(&["covariance", "--H", "0.5", "--t-grid", "0.5:2:0.5", "--n-max", "400", "--out", s(&half)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (rows_half, _) = read_csv(&half);
    for (a, b) in rows.iter().zip(&rows_half) {
        for k in 0..6 {
            assert!((a[k] - b[k]).abs() <= 1e-6, "{a:?} vs {b:?}");
        }
    }
}

#[test]
fn fractional_covariance_within_two_percent() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("fbm.csv");
    let out = grassmann(&["covariance", "--H", "0.7", "--t-grid", "0.5:2:0.5", "--s-grid", "1:2:1", "--out", s(&csv)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (rows, max) = read_csv(&csv);
    assert_eq!(rows.len(), 8);
    assert!(max <= 0.02, "{max}");
    assert!(stderr(&out).contains("fitted scale"));
}

#[test]
fn covariance_self_test_failure_exits_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "cfg.json", r#"{"model":{"density":{"form":"constant"},"n_max":400,"M":64}}"#);
    let out = grassmann(&["--config", s(&cfg), "covariance", "--t-grid", "1"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("QuadratureUnderResolved"), "{}", stderr(&out));
}

#[test]
fn covariance_outside_window_is_a_usage_error() {
    let out = grassmann(&["covariance", "--bm", "--t-grid", "9", "--n-max", "50"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("GridExceeded"));
}

fn integrate(dir: &TempDir, a: &str, b: &str, steps: &str) -> Value {
    let one = write(dir, "one.json", ONE);
    let out = grassmann(&[
        "integrate",
        "--H",
        "0.7",
        "--g",
        s(&one),
        "--Y",
        s(&one),
        "--a",
        a,
        "--b",
        b,
        "--steps",
        steps,
        "--n-max",
        "32",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn integral_of_unit_integrand_is_the_increment() {
    let dir = TempDir::new().unwrap();
    let doc = integrate(&dir, "0.5", "1.5", "256");
    let value: GrassmannElement = serde_json::from_value(doc["value"].clone()).unwrap();
    let model = ProcessModel::new(ModelConfig::new(SpectralDensity::power_law(0.7).unwrap()).with_n_max(32)).unwrap();
    let exact = &model.f_element(1.5).unwrap() - &model.f_element(0.5).unwrap();
    let w = WeightSystem::default();
    let err = weighted_norm(&(&value - &exact), 1, &w);

    let table = doc["table"].as_array().unwrap();
    let steps: Vec<u64> = table.iter().map(|r| r["steps"].as_u64().unwrap()).collect();
    assert_eq!(steps, [64, 128, 256]);
    assert!(table[0]["increment"].is_null());
    let inc: Vec<f64> = table[1..].iter().map(|r| r["increment"].as_f64().unwrap()).collect();
    assert!(inc[0] >= 2.0 * inc[1], "{inc:?}");
    assert!(err <= inc[1], "error {err:e} above reported increment {:e}", inc[1]);
}

#[test]
fn empty_interval_gives_zero() {
    let dir = TempDir::new().unwrap();
    let doc = integrate(&dir, "1", "1", "16");
    let value: GrassmannElement = serde_json::from_value(doc["value"].clone()).unwrap();
    assert!(value.is_zero());
}

#[test]
fn piecewise_integrand_splits_the_interval() {
    let dir = TempDir::new().unwrap();
    let one = write(&dir, "one.json", ONE);
    let y = write(
        &dir,
        "y.json",
        &format!(r#"{{"pieces":[{{"from":0.5,"value":{ONE}}},{{"from":1.0,"value":{{"terms":[]}}}}]}}"#),
    );
    let out = grassmann(&[
        "integrate",
        "--H",
        "0.7",
        "--g",
        s(&one),
        "--Y",
        s(&y),
        "--a",
        "0",
        "--b",
        "2",
        "--steps",
        "256",
        "--n-max",
        "16",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let value: GrassmannElement = serde_json::from_value(doc["value"].clone()).unwrap();
    let model = ProcessModel::new(ModelConfig::new(SpectralDensity::power_law(0.7).unwrap()).with_n_max(16)).unwrap();
    let exact = &model.f_element(1.0).unwrap() - &model.f_element(0.5).unwrap();
    assert!(value.max_abs_diff(&exact) < 1e-4, "{}", value.max_abs_diff(&exact));
}

#[test]
fn integrate_parse_failure_exits_one() {
    let dir = TempDir::new().unwrap();
    let one = write(&dir, "one.json", ONE);
    let bad = write(&dir, "bad.json", r#"{"terms":[{"gens":[2,1],"re":1,"im":0}]}"#);
    let out = grassmann(&["integrate", "--bm", "--g", s(&bad), "--Y", s(&one), "--a", "0", "--b", "1"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("ascending"), "{}", stderr(&out));
    let missing = dir.path().join("missing.json");
    let out = grassmann(&["integrate", "--bm", "--g", s(&one), "--Y", s(&missing), "--a", "0", "--b", "1"]);
    assert_eq!(code(&out), 1);
}

fn eval(dir: &TempDir, program: &str) -> Output {
    let path = write(dir, "program.json", program);
    grassmann(&["eval", "--program", s(&path)])
}

fn result(out: &Output) -> Value {
    assert_eq!(code(out), 0, "{}", stderr(out));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn eval_inverse() {
    let dir = TempDir::new().unwrap();
    let out = eval(
        &dir,
        r#"[{"op":"load","name":"z","value":{"terms":[{"gens":[],"re":2,"im":0},{"gens":[1,2],"re":1,"im":0}]}},
            {"op":"invert"}]"#,
    );
    let v = result(&out);
    assert_eq!(v["kind"], "element");
    let z: GrassmannElement = serde_json::from_value(v["value"].clone()).unwrap();
    assert_eq!(z.to_json().unwrap(), r#"{"terms":[{"gens":[],"re":0.5,"im":0.0},{"gens":[1,2],"re":-0.25,"im":0.0}]}"#);
}

#[test]
fn eval_odd_square_is_zero() {
    let dir = TempDir::new().unwrap();
    let out = eval(
        &dir,
        r#"[{"op":"load","name":"v","value":{"terms":[{"gens":[1],"re":0.3,"im":-1.1},{"gens":[2],"re":2.5,"im":0.7},
                                                      {"gens":[1,2,3],"re":-0.9,"im":0.2},{"gens":[4],"re":1e-3,"im":5}]}},
            {"op":"multiply","args":["v","v"]}]"#,
    );
    let v = result(&out);
    assert_eq!(v["value"]["terms"].as_array().unwrap().len(), 0);
}

#[test]
fn eval_conjugation_is_an_involution() {
    let dir = TempDir::new().unwrap();
    let z =
        r#"{"terms":[{"gens":[],"re":1,"im":2},{"gens":[1,3],"re":-0.5,"im":0.25},{"gens":[2,3,4],"re":0,"im":1}]}"#;
    let out = eval(
        &dir,
        &format!(r#"[{{"op":"load","name":"z","value":{z}}},{{"op":"conjugate","k":7}},{{"op":"conjugate","k":7}}]"#),
    );
    let v = result(&out);
    let back: GrassmannElement = serde_json::from_value(v["value"].clone()).unwrap();
    assert_eq!(back, GrassmannElement::from_json(z).unwrap());
}

#[test]
fn eval_norms_and_berezin() {
    let dir = TempDir::new().unwrap();
    let out = eval(
        &dir,
        r#"[{"op":"load","name":"z","value":{"terms":[{"gens":[],"re":3,"im":0},{"gens":[1],"re":4,"im":0}]}},
            {"op":"weighted_norm","p":1}]"#,
    );
    let x = result(&out)["value"].as_f64().unwrap();
    assert!((x - (9.0f64 + 16.0 * (-2.0f64).exp()).sqrt()).abs() < 1e-12);

    let out = eval(
        &dir,
        r#"[{"op":"load","name":"f","value":{"terms":[{"gens":[1,2],"re":5,"im":0},{"gens":[1],"re":1,"im":0}]}},
            {"op":"berezin","gens":[1,2]}]"#,
    );
    let z: GrassmannElement = serde_json::from_value(result(&out)["value"].clone()).unwrap();
    assert_eq!(z.len(), 1);
    assert_eq!(z.body().norm(), 5.0);
}

#[test]
fn eval_reports_the_violated_precondition() {
    let dir = TempDir::new().unwrap();
    let out =
        eval(&dir, r#"[{"op":"load","name":"s","value":{"terms":[{"gens":[3],"re":1,"im":0}]}},{"op":"invert"}]"#);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("NotInvertible"), "{}", stderr(&out));

    let path =
        write(&dir, "wide.json", r#"[{"op":"load","name":"s","value":{"terms":[{"gens":[12],"re":1,"im":0}]}}]"#);
    let out = grassmann(&["--g-max", "10", "eval", "--program", s(&path)]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("TruncationOverflow"), "{}", stderr(&out));

    assert_eq!(code(&eval(&dir, r#"[{"op":"multiply","args":["a","b"]}]"#)), 1);
    assert_eq!(code(&eval(&dir, "not json")), 1);
}

#[test]
fn eval_writes_to_file() {
    let dir = TempDir::new().unwrap();
    let program =
        write(&dir, "p.json", &format!(r#"[{{"op":"load","name":"one","value":{ONE}}},{{"op":"norm","p":2}}]"#));
    let target = dir.path().join("out.json");
    let out = grassmann(&["eval", "--program", s(&program), "--out", s(&target)]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(v["value"], 1.0);
}
