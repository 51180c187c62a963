use std::path::PathBuf;
use std::process::{Command, Output};

fn torsionkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torsionkit")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("torsionkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn thm2_exits_zero() {
    let out = torsionkit(&["verify", "thm2", "2", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["equal"], true);
    assert_eq!(v["witness"]["factor_count"], 2);
}

#[test]
fn thm2_is_deterministic() {
    let a = torsionkit(&["verify", "thm2", "3", "1", "--seed", "7"]);
    let b = torsionkit(&["verify", "thm2", "3", "1", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn cylinder_torsion_is_one() {
    let built = torsionkit(&["build", "cylinder"]);
    assert_eq!(built.status.code(), Some(0));
    let path = scratch("cylinder.json");
    std::fs::write(&path, &built.stdout).unwrap();
    let out = torsionkit(&["torsion", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["default"]["abs"], "1");
    assert_eq!(v["seeded"]["abs"], "1");
}

#[test]
fn decompose_counts_pieces() {
    let out = torsionkit(&["decompose", "3", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["pieces"].as_array().unwrap().len(), 6);
}

#[test]
fn homology_of_generated_surface() {
    let out = torsionkit(&["homology", "2", "0"]);
    assert_eq!(json(&out)["betti"], serde_json::json!([1, 4, 1]));
}

#[test]
fn other_verifications() {
    for args in [&["verify", "thm1"][..], &["verify", "case3", "2"], &["verify", "mv", "2", "1"]] {
        let out = torsionkit(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert_eq!(json(&out)["equal"], true);
    }
}

#[test]
fn independence_reads_trials_from_env() {
    let built = torsionkit(&["build", "pants"]);
    let path = scratch("pants.json");
    std::fs::write(&path, &built.stdout).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_torsionkit"))
        .args(["verify", "independence", path.to_str().unwrap(), "--seed", "3"])
        .env("TORSIONKIT_TRIALS", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["witness"]["trials"], 4);
}

#[test]
fn input_errors_exit_two() {
    let bad = scratch("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(torsionkit(&["torsion", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(torsionkit(&["decompose", "1", "0"]).status.code(), Some(2));
    assert_eq!(torsionkit(&["verify", "thm7"]).status.code(), Some(2));
    assert_eq!(torsionkit(&["frobnicate"]).status.code(), Some(2));
    let not_complex = scratch("not_complex.json");
    std::fs::write(&not_complex, r#"{"dims":[1,1],"boundaries":[[["1"]]]}"#).unwrap();
    assert_eq!(torsionkit(&["homology", not_complex.to_str().unwrap()]).status.code(), Some(0));
    std::fs::write(&not_complex, r#"{"dims":[1,1,1],"boundaries":[[["1"]],[["1"]]]}"#).unwrap();
    assert_eq!(torsionkit(&["torsion", not_complex.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn zero_trials_is_an_input_error() {
    let built = torsionkit(&["build", "circle"]);
    let path = scratch("circle.json");
    std::fs::write(&path, &built.stdout).unwrap();
    let out = torsionkit(&["verify", "independence", path.to_str().unwrap(), "--trials", "0"]);
    assert_eq!(out.status.code(), Some(2));
}
