use std::path::PathBuf;
use std::process::{Command, Output};

use bctorus::eala::StructureConstants;
use bctorus::hermitian::HermitianData;
use bctorus::io::QuadFormJson;
use bctorus::lietorus::biisomorphic;
use bctorus::torus::Torus;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bctorus")).args(args).env_remove("BCTORUS_SEED").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn classify_three_gives_five_distinct_classes() {
    let out = run(&["classify-forms", "--n", "3"]);
    assert!(out.status.success());
    let doc = json(&out);
    let classes = doc["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 5);

    let mut data = Vec::new();
    for c in classes {
        let form: QuadFormJson = serde_json::from_value(c["form"].clone()).unwrap();
        let torus = Torus::from_form(form.to_form().unwrap());
        for orbit in c["orbits"].as_array().unwrap() {
            let m: Vec<u32> = serde_json::from_value(orbit.clone()).unwrap();
            data.push(HermitianData::build(3, torus.clone(), &m).unwrap());
        }
    }
    for (i, a) in data.iter().enumerate() {
        for b in &data[i + 1..] {
            assert!(!biisomorphic(a, b).unwrap().equivalent);
        }
    }
}

#[test]
fn classify_rejects_large_n() {
    let out = run(&["classify-forms", "--n", "5"]);
    assert!(!out.status.success());
}

#[test]
fn orbits_from_polynomial() {
    let out = run(&["orbits", "--n", "3", "--kappa", fixture("kappa_b.json").to_str().unwrap()]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["radical"], serde_json::json!([0]));
    assert_eq!(doc["iso"], serde_json::json!([0, 1, 2, 7]));
    let sizes: Vec<usize> = doc["orbits"].as_array().unwrap().iter().map(|o| o.as_array().unwrap().len()).collect();
    assert_eq!(sizes, vec![1, 2, 3, 4]);
}

#[test]
fn orbits_dimension_mismatch() {
    let out = run(&["orbits", "--n", "2", "--kappa", fixture("kappa_b.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

fn build(spec: &str, extra: &[&str]) -> Output {
    let spec = fixture(spec);
    let mut args = vec!["build", "--spec", spec.to_str().unwrap(), "--check"];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn build_setup_a() {
    let out = build("setup_a.json", &["--count", "200"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let doc = json(&out);
    assert_eq!(doc["type_b"], true);
    assert_eq!(doc["centre_dimension"], 0);
    assert_eq!(doc["identities"]["config"]["count"], 200);
}

#[test]
fn build_setup_b_is_not_type_b() {
    let out = build("setup_b.json", &["--count", "100"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["type_b"], false);
    assert_eq!(doc["passed"], true);
}

#[test]
fn build_rank_one_affine_specs() {
    for spec in ["affine_l1.json", "affine_half.json"] {
        let out = build(spec, &["--count", "100"]);
        assert!(out.status.success(), "{spec}");
    }
}

#[test]
fn small_window_fails_check() {
    let out = build("setup_a.json", &["--window", "1", "--count", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn non_isotropic_subset_is_rejected() {
    let out = build("not_isotropic.json", &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("not isotropic"), "{err}");
}

#[test]
fn build_is_deterministic_and_seed_flag_wins() {
    let a = build("setup_a.json", &["--count", "50", "--seed", "11"]);
    let b = build("setup_a.json", &["--count", "50", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
    let spec = fixture("setup_a.json");
    let args = ["build", "--spec", spec.to_str().unwrap(), "--count", "5"];
    let env_only = Command::new(env!("CARGO_BIN_EXE_bctorus")).args(args).env("BCTORUS_SEED", "7").output().unwrap();
    assert_eq!(json(&env_only)["identities"]["config"]["seed"], 7);
    let both = Command::new(env!("CARGO_BIN_EXE_bctorus"))
        .args(args)
        .args(["--seed", "9"])
        .env("BCTORUS_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(json(&both)["identities"]["config"]["seed"], 9);
}

#[test]
fn eala_export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sc.json");
    let spec = fixture("setup_b.json");
    let status = run(&["eala", "--spec", spec.to_str().unwrap(), "--window", "1", "--out", out_path.to_str().unwrap()]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let sc = StructureConstants::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    assert!(!sc.basis.is_empty());
    assert!(!sc.brackets.is_empty());
    assert!(!sc.dimensions.is_empty());

    let again = dir.path().join("again.json");
    run(&["eala", "--spec", spec.to_str().unwrap(), "--window", "1", "--out", again.to_str().unwrap()]);
    assert_eq!(text, std::fs::read_to_string(&again).unwrap());
}
