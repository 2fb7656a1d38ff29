use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const MAJORITY: &str = r#"{"id": "majority", "prior0": 0.5, "sensors": [
    {"class": {"kind": "explicit-pmf", "pmf0": [0.8, 0.2], "pmf1": [0.2, 0.8]}, "count": 3}]}"#;

const BAND: &str = r#"{"id": "band", "prior0": 0.5, "sensors": [
    {"class": {"kind": "gaussian-band", "h0": {"lo": -1, "hi": 0}, "h1": {"lo": 1, "hi": 2}, "sigma": 1},
     "quantizer": {"thresholds": [1.0]}, "count": 3}]}"#;

const KL: &str = r#"{"id": "kl", "prior0": 0.5, "sensors": [
    {"class": {"kind": "kl-ball", "nominal0": {"mean": 0, "sigma": 1}, "nominal1": {"mean": 1, "sigma": 1},
               "eps0": EPS, "eps1": EPS}, "quantizer": {"thresholds": [1.0]}}]}"#;

fn run(dir: &TempDir, scenario: &str, args: &[&str]) -> Output {
    let path = dir.path().join("scenario.json");
    std::fs::write(&path, scenario).unwrap();
    Command::new(env!("CARGO_BIN_EXE_robust-fusion"))
        .arg(args[0])
        .arg("--scenario")
        .arg(&path)
        .args(&args[1..])
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn majority_of_three() {
    let dir = TempDir::new().unwrap();
    let o = run(&dir, MAJORITY, &["evaluate"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("scenario_id,K,method,p_false_alarm,p_miss,p_error,ci_halfwidth,seed\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0..3], ["majority", "3", "exact-convolution"]);
    let pe: f64 = rows[0][5].parse().unwrap();
    assert!((pe - 0.104).abs() < 1e-12, "{pe}");
}

#[test]
fn monte_carlo_adds_a_row() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("eval.csv");
    let o = run(&dir, MAJORITY, &["evaluate", "--mc-samples", "200000", "--seed", "7", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let rows = csv_rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][2], "monte-carlo");
    assert_eq!(rows[1][7], "7");
    let pe: f64 = rows[1][5].parse().unwrap();
    let hw: f64 = rows[1][6].parse().unwrap();
    assert!(hw > 0.0 && (pe - 0.104).abs() < hw, "{pe} ± {hw}");
}

#[test]
fn unwritable_output_exits_3() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("missing").join("eval.csv");
    let o = run(&dir, MAJORITY, &["evaluate", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!stderr(&o).is_empty());
    let o = Command::new(env!("CARGO_BIN_EXE_robust-fusion"))
        .args(["lfd", "--scenario"])
        .arg(Path::new("/nonexistent/scenario.json"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn overlapping_bands_exit_2_naming_sensor() {
    let dir = TempDir::new().unwrap();
    let bad = BAND.replace(r#""h1": {"lo": 1"#, r#""h1": {"lo": -0.5"#);
    let o = run(&dir, &bad, &["lfd"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sensor 0"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn band_lfd_reports_inner_endpoints() {
    let dir = TempDir::new().unwrap();
    let o = run(&dir, BAND, &["lfd"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    let get = |p: &str| rows.iter().find(|r| r[2] == p).unwrap()[3].parse::<f64>().unwrap();
    assert_eq!(get("q0_mean"), 0.0);
    assert_eq!(get("q1_mean"), 1.0);
}

#[test]
fn kl_ball_without_radius_has_no_mixing() {
    let dir = TempDir::new().unwrap();
    let o = run(&dir, &KL.replace("EPS", "0"), &["lfd"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    for p in ["u", "v"] {
        let v: f64 = rows.iter().find(|r| r[2] == p).unwrap()[3].parse().unwrap();
        assert_eq!(v, 0.0);
    }
}

#[test]
fn band_saddle_holds() {
    let dir = TempDir::new().unwrap();
    let o = run(&dir, BAND, &["saddle", "--members", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().last(), Some("HOLDS"));
}

#[test]
fn dabak_boundedness_is_violated() {
    let dir = TempDir::new().unwrap();
    let o = run(&dir, &KL.replace("EPS", "0.08"), &["saddle", "--members", "9"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("VIOLATED"), "{text}");
    assert!(last.contains("member"), "{last}");
}

#[test]
fn lfd_only_saddle_has_zero_gap() {
    let dir = TempDir::new().unwrap();
    let o = run(&dir, BAND, &["saddle", "--members", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let body: String = text.lines().filter(|l| !l.starts_with("HOLDS")).collect::<Vec<_>>().join("\n");
    let rows = csv_rows(&body);
    let saddle = rows.iter().find(|r| r[0] == "saddle").unwrap();
    assert_eq!(saddle[3].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn sweep_over_odd_k_is_nonincreasing() {
    let dir = TempDir::new().unwrap();
    let o = run(&dir, MAJORITY, &["sweep", "--k-list", "1,3,5,7,9"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    let pe: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(pe.len(), 5);
    assert!((pe[0] - 0.2).abs() < 1e-12 && (pe[1] - 0.104).abs() < 1e-12);
    assert!(pe.windows(2).all(|w| w[1] <= w[0]), "{pe:?}");

    let o = run(&dir, MAJORITY, &["sweep", "--k-list", "4"]);
    assert_eq!(csv_rows(&stdout(&o)).len(), 1);
}

#[test]
fn uninformative_sweep_exits_2() {
    let dir = TempDir::new().unwrap();
    let flat = MAJORITY.replace("[0.2, 0.8]", "[0.8, 0.2]");
    let o = run(&dir, &flat, &["sweep", "--k-list", "1,3"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn malformed_scenario_exits_2() {
    let dir = TempDir::new().unwrap();
    let o = run(&dir, r#"{"id": "x"}"#, &["evaluate"]);
    assert_eq!(o.status.code(), Some(2));
}
