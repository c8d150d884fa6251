use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn locc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_locc")).args(args).output().expect("spawn locc")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn fixture(dir: &TempDir, name: &str, d: usize, indices: &str) -> PathBuf {
    let path = dir.path().join(name);
    let out = locc(&["gen-fixture", "--d", &d.to_string(), "--indices", indices, "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn example_one_side_a() {
    let dir = TempDir::new().unwrap();
    let input = fixture(&dir, "ex1.json", 4, "00,01,10,33");
    let out = locc(&["analyze", s(&input), "--side", "A", "--trials", "500"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    let side = &report["sides"][0];
    assert_eq!(report["sides"].as_array().unwrap().len(), 1);
    assert_eq!((side["dim_t"].as_u64(), side["dim_tperp"].as_u64()), (Some(12), Some(4)));
    assert_eq!(side["verdict"]["tag"], "distinguishable_projective");
    assert_eq!(side["simulation"]["successes"], 500);
    assert_eq!(report["tol"].as_f64(), Some(1e-10));
}

#[test]
fn bell_basis_is_refuted_on_both_sides() {
    let dir = TempDir::new().unwrap();
    let input = fixture(&dir, "bell.json", 2, "00,01,10,11");
    let out = locc(&["analyze", s(&input)]);
    assert_eq!(code(&out), 1);
    for side in json(&out)["sides"].as_array().unwrap() {
        assert_eq!(side["verdict"]["tag"], "not_distinguishable");
        assert_eq!(side["verdict"]["reason"], "tperp_dim_below_d");
        assert!(side["protocol"].is_null());
    }
}

#[test]
fn malformed_input_and_usage_errors() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"dA\": 2").unwrap();
    assert_eq!(code(&locc(&["analyze", s(&bad)])), 3);
    assert_eq!(code(&locc(&["analyze", s(&dir.path().join("missing.json"))])), 3);
    assert_eq!(code(&locc(&["analyze", s(&bad), "--side", "C"])), 3);
    assert_eq!(code(&locc(&["frobnicate"])), 3);
    assert_eq!(code(&locc(&["gen-fixture", "--d", "2", "--indices", "00,2x"])), 3);
    assert_eq!(code(&locc(&["gen-fixture", "--d", "2", "--indices", "00,20"])), 3);
    assert_eq!(code(&locc(&["--help"])), 0);
}

#[test]
fn non_orthogonal_states_are_rejected() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("overlap.json");
    std::fs::write(
        &path,
        r#"{"dA":2,"dB":2,"states":[{"type":"pure","vector":[[1,0],[0,0],[0,0],[0,0]]},
            {"type":"pure","vector":[[0.6,0],[0.8,0],[0,0],[0,0]]}]}"#,
    )
    .unwrap();
    let out = locc(&["analyze", s(&path)]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("orthogonal"));
}

#[test]
fn reports_are_byte_stable() {
    let dir = TempDir::new().unwrap();
    let input = fixture(&dir, "pair.json", 3, "01,22");
    let a = locc(&["analyze", s(&input), "--seed", "9", "--trials", "300"]);
    let b = locc(&["analyze", s(&input), "--seed", "9", "--trials", "300"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("\"tol\":1.0000000000000000e-10"));
    assert!(text.contains("\"seed\":9"));
}

#[test]
fn example_two_simulates_through_the_oracle() {
    let dir = TempDir::new().unwrap();
    let input = fixture(&dir, "ex2.json", 4, "00,01,12,30");
    let out = locc(&["analyze", s(&input), "--trials", "0"]);
    assert_eq!(code(&out), 2);
    let out = locc(&["simulate", s(&input), "--trials", "10000", "--seed", "42"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["protocol_source"], "oracle");
    assert_eq!(report["simulation"]["successes"], 10000);
    assert_eq!(report["simulation"]["perfect"], true);
    // without oracle restarts nothing is left to simulate
    let out = locc(&["simulate", s(&input), "--oracle-attempts", "0"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn zero_trials_is_flagged() {
    let dir = TempDir::new().unwrap();
    let input = fixture(&dir, "ex1.json", 4, "00,01,10,33");
    let out = locc(&["simulate", s(&input), "--trials", "0"]);
    assert_eq!(code(&out), 0);
    let sim = &json(&out)["simulation"];
    assert_eq!(sim["note"], "no trials");
    assert_eq!(sim["success_rate"].as_f64(), Some(1.0));
}

#[test]
fn protocol_file_round_trip_and_corruption() {
    let dir = TempDir::new().unwrap();
    let input = fixture(&dir, "ex1.json", 4, "00,01,10,33");
    let proto = dir.path().join("proto.json");
    let out = locc(&["analyze", s(&input), "--side", "B", "--trials", "0", "--protocol-out", s(&proto)]);
    assert_eq!(code(&out), 0);

    let out = locc(&["simulate", s(&input), "--protocol", s(&proto), "--trials", "2000"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["simulation"]["successes"], 2000);

    // swap two of Bob's finishing vectors in every branch
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&proto).unwrap()).unwrap();
    for branch in doc["bob"].as_array_mut().unwrap() {
        let blocks = branch["blocks"].as_array_mut().unwrap();
        let first = blocks.iter().position(|b| !b.as_array().unwrap().is_empty()).unwrap();
        let last = blocks.iter().rposition(|b| !b.as_array().unwrap().is_empty()).unwrap();
        blocks.swap(first, last);
    }
    let corrupt = dir.path().join("corrupt.json");
    std::fs::write(&corrupt, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = locc(&["simulate", s(&input), "--protocol", s(&corrupt), "--trials", "2000"]);
    assert_eq!(code(&out), 1, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(json(&out)["simulation"]["success_rate"].as_f64().unwrap() < 1.0);

    // a protocol for another dimension is an input error
    let small = fixture(&dir, "small.json", 2, "00,01");
    assert_eq!(code(&locc(&["simulate", s(&small), "--protocol", s(&proto)])), 3);
}

#[test]
fn sample_generic_histograms() {
    let out = locc(&["sample-generic", "--d", "2", "--n", "1", "--samples", "10"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["dim_histogram"]["4"], 10);
    let out = locc(&["sample-generic", "--d", "3", "--n", "3", "--samples", "50", "--seed", "7", "--det"]);
    let report = json(&out);
    assert_eq!(report["dim_histogram"]["3"], 50);
    assert_eq!(report["det_diagnostics"].as_array().unwrap().len(), 50);
    assert_eq!(code(&locc(&["sample-generic", "--d", "2", "--n", "5"])), 3);
}

#[test]
fn gen_fixture_writes_schema() {
    let out = locc(&["gen-fixture", "--d", "2", "--indices", "00,11"]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!((doc["dA"].as_u64(), doc["dB"].as_u64()), (Some(2), Some(2)));
    let states = doc["states"].as_array().unwrap();
    assert_eq!(states.len(), 2);
    assert_eq!(states[0]["type"], "pure");
    assert_eq!(states[0]["vector"].as_array().unwrap().len(), 4);
}

#[test]
fn rectangular_input_is_padded() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("rect.json");
    // |0>|0> and |1>|1> on 2 ⊗ 3
    std::fs::write(
        &path,
        r#"{"dA":2,"dB":3,"states":[
            {"type":"pure","vector":[[1,0],[0,0],[0,0],[0,0],[0,0],[0,0]]},
            {"type":"pure","vector":[[0,0],[0,0],[0,0],[0,0],[1,0],[0,0]]}]}"#,
    )
    .unwrap();
    let out = locc(&["analyze", s(&path), "--trials", "100"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!((report["d_a"].as_u64(), report["d_b"].as_u64(), report["d"].as_u64()), (Some(2), Some(3), Some(3)));
}
