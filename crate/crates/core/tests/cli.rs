use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn attnrat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_attnrat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Writes `make-fixture` output for `kind` into `dir`.
fn fixture(dir: &TempDir, kind: &str, n: usize) -> PathBuf {
    let out = attnrat(&["make-fixture", kind, "--n", &n.to_string()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let path = dir.path().join(format!("{kind}-{n}.json"));
    std::fs::write(&path, &out.stdout).unwrap();
    path
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn compile_uniform_mean_layer() {
    let dir = TempDir::new().unwrap();
    let spec = fixture(&dir, "identity", 2);
    let out_path = dir.path().join("compiled.json");
    let out = attnrat(&["compile", s(&spec), "--out", s(&out_path)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!(report["achievedNumDegree"].as_u64().unwrap() <= 2);
    assert_eq!(report["run"]["seed"], 0);

    let verify = attnrat(&["verify", s(&spec), "--compiled", s(&out_path)]);
    assert_eq!(code(&verify), 0, "{}", stderr(&verify));
    let v = json(&verify);
    assert_eq!(v["equivalenceChecked"], true);
    assert_eq!(v["pointsChecked"], 4);
    assert!(v["mismatch"].is_null());
}

#[test]
fn zero_weight_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let spec = fixture(&dir, "identity", 2);
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&spec).unwrap()).unwrap();
    v["heads"][0]["weights"][0][0][0] = Value::from("0/1");
    let bad = write(&dir, "bad.json", &v.to_string());
    let out = attnrat(&["compile", s(&bad)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("not positive"), "{}", stderr(&out));
}

#[test]
fn malformed_json_exits_2() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", "{\"n\": 2,");
    assert_eq!(code(&attnrat(&["compile", s(&bad)])), 2);
}

#[test]
fn vanishing_denominator_exits_3() {
    let dir = TempDir::new().unwrap();
    let spec = fixture(&dir, "reciprocal", 2);
    let out = attnrat(&["compile", s(&spec)]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("00"), "{}", stderr(&out));
}

#[test]
fn parity_check_on_fixtures() {
    let dir = TempDir::new().unwrap();
    let out = attnrat(&["parity-check", s(&fixture(&dir, "parity", 6))]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = json(&out);
    assert_eq!(r["signRepresents"], true);
    assert_eq!(r["satisfied"], true);
    assert_eq!(r["bound"], "3/2");

    let out = attnrat(&["parity-check", s(&fixture(&dir, "identity", 3))]);
    assert_eq!(json(&out)["signRepresents"], false);
}

#[test]
fn cap_exceeded_exits_4() {
    let dir = TempDir::new().unwrap();
    let spec = fixture(&dir, "parity", 40);
    assert_eq!(code(&attnrat(&["parity-check", s(&spec)])), 4);
    assert_eq!(code(&attnrat(&["parity-check", "--cap", "5", s(&fixture(&dir, "parity", 6))])), 4);
}

#[test]
fn campaign_records_seed_and_trials() {
    let out = attnrat(&["parity-check", "--campaign", "--n", "6", "--trials", "50", "--seed", "9"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = json(&out);
    assert_eq!(r["seed"], 9);
    assert_eq!(r["trials"], 50);
    assert_eq!(r["signRepresentationsFound"], 0);
    assert!(r["note"].as_str().unwrap().contains("does not prove"));
}

#[test]
fn sensitivity_reports() {
    let r = json(&attnrat(&["sensitivity", "--parity", "5"]));
    assert_eq!(r["avgSensitivity"], "5/1");
    assert_eq!(r["parityCorrelation"], "1/1");

    let dir = TempDir::new().unwrap();
    let identity = fixture(&dir, "identity", 3);
    let r = json(&attnrat(&["sensitivity", s(&identity), "--tau", "1/2"]));
    // sign(|x|/3 - 1/2) is majority of 3
    assert_eq!(r["avgSensitivity"], "3/2");
    assert_eq!(r["parityCorrelation"], "1/2");

    let constant = fixture(&dir, "constant", 3);
    assert_eq!(json(&attnrat(&["sensitivity", s(&constant)]))["avgSensitivity"], "0/1");
}

#[test]
fn approx_relu_single_gate() {
    let dir = TempDir::new().unwrap();
    let net = fixture(&dir, "single-gate", 1);
    let out = attnrat(&["approx-relu", s(&net), "--epsilon", "1/10", "--grid", "10000"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = json(&out);
    assert!(r["measuredSupErrorDecimal"].as_f64().unwrap() <= 0.1);
    assert_eq!(r["withinEpsilon"], true);
    assert_eq!(r["run"]["grid"], 10000);

    assert_eq!(code(&attnrat(&["approx-relu", s(&net), "--epsilon", "0"])), 2);
    // budget too small for the degree cap
    assert_eq!(code(&attnrat(&["approx-relu", s(&net), "--epsilon", "1/1000", "--k-cap", "3"])), 5);
}

#[test]
fn unnormalized_gate_is_named() {
    let dir = TempDir::new().unwrap();
    let net = write(
        &dir,
        "net.json",
        r#"{"inputDim":1,"layers":[[{"a":["1/2"],"b":"0/1"},{"a":["3/4"],"b":"1/2"}]],"readout":{"a":["1/2","1/2"],"b":"0/1"}}"#,
    );
    let out = attnrat(&["approx-relu", s(&net), "--epsilon", "1/2"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("gate 2 in layer 1"), "{}", stderr(&out));
}

#[test]
fn margin_pipeline_on_sawtooth() {
    let dir = TempDir::new().unwrap();
    let out = attnrat(&["theorem2", s(&fixture(&dir, "sawtooth", 2)), "--grid", "10000"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = json(&out);
    assert_eq!(r["gamma"], "1/13");
    assert_eq!(r["approximantSignRepresents"], true);
    assert_eq!(r["satisfied"], true);

    let out = attnrat(&["theorem2", s(&fixture(&dir, "out-of-range", 2))]);
    assert_eq!(code(&out), 3);
}

#[test]
fn sweep_csv() {
    let dir = TempDir::new().unwrap();
    let config = write(
        &dir,
        "sweep.json",
        r#"{"configurations":[{"family":"sawtooth","n":2},{"family":"sawtooth","n":4},{"family":"sawtooth","n":6}]}"#,
    );
    let out = attnrat(&["sweep", s(&config)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let header = rows.headers().unwrap().clone();
    let q = header.iter().position(|h| h == "bound_quantity").unwrap();
    let records: Vec<_> = rows.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), 3);
    for r in &records {
        let v: f64 = r[q].parse().unwrap();
        assert!(v.is_finite() && v > 0.0);
    }
    assert_eq!(attnrat(&["sweep", s(&config)]).stdout, out.stdout);

    let empty = write(&dir, "empty.json", r#"{"configurations":[]}"#);
    let out = attnrat(&["sweep", s(&empty)]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1);
}

#[test]
fn unknown_fixture_and_bad_flags() {
    assert_eq!(code(&attnrat(&["make-fixture", "nope"])), 2);
    assert_eq!(code(&attnrat(&["parity-check"])), 2);
}
