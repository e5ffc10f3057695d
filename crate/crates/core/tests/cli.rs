use std::path::Path;
use std::process::{Command, Output};

use mumw::golden;
use mumw::linalg::BipartiteOperator;
use serde_json::{json, Value};

fn mumw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mumw"))
        .args(args)
        .env_remove("MUMW_SEED")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn write_json(path: &Path, v: &impl serde::Serialize) {
    std::fs::write(path, serde_json::to_string(v).unwrap()).unwrap();
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_wtilde(path: &Path) -> BipartiteOperator {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    serde_json::from_value(v["w_tilde"].clone()).unwrap()
}

#[test]
fn basis_gellmann_writes_eight_matrices_and_passes() {
    let out = mumw(&["basis", "--dim", "3", "--basis", "gellmann"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["basis"]["grouped"].as_array().unwrap().len(), 8);
    assert_eq!(v["report"]["pass"], json!(true));
}

#[test]
fn basis_shifted_diagonal_passes() {
    let out = mumw(&["basis", "--dim", "3", "--basis", "appendix-b"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["report"]["pass"], json!(true));
}

#[test]
fn mub_basis_rejects_composite_dimension() {
    let out = mumw(&["basis", "--dim", "4", "--basis", "mub"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], json!("not-prime"));
}

#[test]
fn usage_errors_are_structured() {
    let out = mumw(&["witness", "--dim", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], json!("usage"));

    let out = mumw(&["witness", "--dim", "3", "--N", "4", "--L", "5"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], json!("invalid-spec"));

    let out = mumw(&["witness", "--dim", "3", "--N", "4", "--L", "1", "--kappa", "0.9"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], json!("kappa-out-of-range"));
}

#[test]
fn mums_family_at_kappa_opt() {
    let out = mumw(&["mums", "--dim", "4", "--basis", "gellmann", "--kappa", "opt"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((v["family"]["kappa"].as_f64().unwrap() - 0.375).abs() < 1e-12);
    assert_eq!(v["report"]["pass"], json!(true));
}

#[test]
fn witness_reproduces_gellmann_shift_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("w.json");
    let out = mumw(&[
        "witness", "--dim", "3", "--basis", "gellmann", "--N", "4", "--L", "4", "--rot", "id,id,id,perm:1",
        "--out", path_str(&file),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let wt = read_wtilde(&file);
    assert!(golden::SHIFT1_GELLMANN.deviation(wt.matrix()) < 1e-9);

    let v: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    let prov = &v["w"]["provenance"];
    assert_eq!(prov["basis"], json!("gellmann"));
    assert_eq!(prov["rotations"], json!(["id", "id", "id", "perm:1"]));
    assert_eq!(prov["N"], json!(4));
    assert!(v["w_tilde"]["scale"].as_str().unwrap().starts_with("W̃ ="));
}

#[test]
fn witness_d2_mub_is_reduction_witness() {
    let out = mumw(&["witness", "--dim", "2", "--basis", "mub", "--N", "3", "--L", "3", "--rot", "id,id,id"]);
    assert_eq!(out.status.code(), Some(0));
    let wt: BipartiteOperator = serde_json::from_value(stdout_json(&out)["w_tilde"].clone()).unwrap();
    let target = mumw::witness::reduction_witness(2).unwrap();
    assert!(wt.max_abs_diff(&target) < 1e-10);
}

#[test]
fn witness_csv_is_real_rows() {
    let out = mumw(&["witness", "--dim", "2", "--basis", "mub", "--N", "3", "--L", "3", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.split(',').count() == 4));
}

fn mub_witness(dir: &Path, alphas: &str) -> std::path::PathBuf {
    let file = dir.join(format!("mub_{}.json", alphas.replace(',', "")));
    let out = mumw(&[
        "witness", "--dim", "3", "--basis", "mub", "--kappa", "1", "--N", "4", "--L", "2", "--alphas", alphas,
        "--out", path_str(&file),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    file
}

#[test]
fn verify_detects_ppt_entangled_state() {
    let dir = tempfile::tempdir().unwrap();
    let w = mub_witness(dir.path(), "1,2,3,4");
    let state = dir.path().join("rho1.json");
    write_json(&state, &golden::PPT_STATE_1.operator());
    let out = mumw(&[
        "verify", "--witness", path_str(&w), "--state", path_str(&state), "--expect", "detected-PPT-entangled",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = stdout_json(&out);
    assert_eq!(v["detection"]["verdict"], json!("detected-PPT-entangled"));
    assert!(v["detection"]["expectation"].as_f64().unwrap() < -1e-6);
}

#[test]
fn verify_rejects_planted_invalid_state() {
    let dir = tempfile::tempdir().unwrap();
    let w = mub_witness(dir.path(), "1,2,3,4");
    let state = dir.path().join("bad.json");
    write_json(&state, &golden::PPT_STATE_1.operator().scale(0.9));
    let out = mumw(&["verify", "--witness", path_str(&w), "--state", path_str(&state), "--restarts", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["detection"]["verdict"], json!("invalid-state"));
}

#[test]
fn verify_validates_reference_decomposition() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w3.json");
    let out = mumw(&[
        "witness", "--dim", "3", "--basis", "gellmann", "--N", "4", "--L", "2", "--alphas", "2,4,1,3",
        "--out", path_str(&w),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let dec = dir.path().join("dec.json");
    write_json(
        &dec,
        &json!({ "a": golden::DECOMPOSITION_A3.operator(), "b": golden::DECOMPOSITION_B3.operator() }),
    );
    let out = mumw(&["verify", "--witness", path_str(&w), "--decomposition", path_str(&dec)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["certificate"]["valid"], json!(true));
    assert!(v["certificate"]["a"]["matrix"].is_object());

    // A mismatched pair is rejected.
    let w1 = mub_witness(dir.path(), "1,2,3,4");
    let out = mumw(&["verify", "--witness", path_str(&w1), "--decomposition", path_str(&dec), "--restarts", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_output_is_deterministic_and_seed_env_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let w = mub_witness(dir.path(), "3,4,1,2");
    let args = ["verify", "--witness", path_str(&w), "--positivity-samples", "500", "--restarts", "4", "--seed", "5"];
    let a = mumw(&args);
    let b = mumw(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout_json(&a)["seed"], json!(5));

    let c = Command::new(env!("CARGO_BIN_EXE_mumw"))
        .args(args)
        .env("MUMW_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(stdout_json(&c)["seed"], json!(11));
}

#[test]
fn reproduce_examples() {
    for id in ["1", "2", "3", "appendixB"] {
        let out = mumw(&["reproduce", id]);
        assert_eq!(out.status.code(), Some(0), "reproduce {id}");
        assert_eq!(stdout_json(&out)["pass"], json!(true));
    }
    // The reference A4, B4 do not sum to the reference W~4; every other check passes.
    let out = mumw(&["reproduce", "4"]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    let failing: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == json!(false))
        .map(|c| c["check"].as_str().unwrap())
        .collect();
    assert_eq!(failing, vec!["W~4 (Gell-Mann, L = 2) = A4 + B4^Γ"]);

    let out = mumw(&["reproduce", "7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reproduce_csv_has_one_row_per_check() {
    let out = mumw(&["reproduce", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn explore_counts_witnesses_without_certificates() {
    let out = mumw(&["explore", "--dim", "3", "--basis", "mub", "--iters", "500", "--restarts", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["entries"].as_array().unwrap().len(), 16);
    assert!(v["witnesses_without_certificate"].as_u64().is_some());
}
