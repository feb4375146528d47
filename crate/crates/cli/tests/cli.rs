use std::fs;
use std::process::Command as Proc;

use modulieis_cli::{
    cache_torsion, cached_table, dispatch, load_torsion, CliError, CommandSpec, Status,
};
use modulieis_core::curve::{find_full_torsion_curve, torsion_table};
use modulieis_core::Error;
use serde_json::Value;

fn bin() -> Proc {
    let mut c = Proc::new(env!("CARGO_BIN_EXE_modulieis"));
    c.env_remove("MODULIEIS_CACHE");
    c
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let out = bin().args(args).output().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), v)
}

fn spec(args: &[&str]) -> Result<CommandSpec, CliError> {
    CommandSpec::from_args(std::iter::once("modulieis").chain(args.iter().copied()))
}

#[test]
fn precondition_failures_are_usage_errors() {
    let out = bin()
        .args(["find-curve", "--prime", "5", "--level", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not 1 mod 3"));
    for bad in [
        &["verify", "--level", "3", "--identities", "I4,I99"][..],
        &["analytic-check", "--tau", "0.1,-1"],
        &["build-model"],
        &["find-curve", "--level", "3", "--prime", "21"],
        &["hecke", "--n", "9"],
    ] {
        assert!(matches!(spec(bad), Err(CliError::Usage(_))), "{bad:?}");
        assert_eq!(
            bin().args(bad).output().unwrap().status.code(),
            Some(2),
            "{bad:?}"
        );
    }
}

#[test]
fn verify_on_prime_without_curves_fails() {
    let (code, v) = run_json(&[
        "verify",
        "--level",
        "3",
        "--prime",
        "7",
        "--identities",
        "all",
    ]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "fail");
    assert!(v["payload"]["error"].as_str().unwrap().contains("F_7"));
}

#[test]
fn verify_subset_passes() {
    let (code, v) = run_json(&["verify", "--level", "5", "--identities", "I4,I8,I12"]);
    assert_eq!(code, 0);
    let reports = v["payload"]["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 3);
    assert!(reports
        .iter()
        .all(|r| r["failures"].as_array().unwrap().is_empty()));
}

#[test]
fn find_curve_reports_table() {
    let (code, v) = run_json(&["find-curve", "--prime", "19", "--level", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["curve"]["p"], 19);
    assert_eq!(v["command"]["command"], "find-curve");
}

#[test]
fn build_model_level_three_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("model.json");
    let code = bin()
        .args(["build-model", "--level", "3", "--prime", "auto", "--out"])
        .arg(&out)
        .status()
        .unwrap()
        .code();
    assert_eq!(code, Some(0));
    let v: Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["payload"]["model"]["diagnostics"]["kernel"], 1);
    assert_eq!(
        v["payload"]["model"]["quadrics"].as_array().unwrap().len(),
        1
    );
}

#[test]
fn model_payload_is_deterministic() {
    let s = spec(&[
        "build-model",
        "--level",
        "5",
        "--prime",
        "auto",
        "--seed",
        "0",
    ])
    .unwrap();
    let a = dispatch(&s).unwrap();
    let b = dispatch(&s).unwrap();
    assert_eq!(a.status, Status::Ok);
    assert_eq!(a.payload_bytes(), b.payload_bytes());
}

#[test]
fn cache_round_trip_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let c = find_full_torsion_curve(71, 5).unwrap();
    let t = torsion_table(&c, 5).unwrap();
    let path = cache_torsion(dir.path(), &t).unwrap();
    assert_eq!(load_torsion(&path).unwrap(), t);
    let (again, hit) = cached_table(Some(dir.path()), &c, 5).unwrap();
    assert!(hit);
    assert_eq!(again, t);

    let text = fs::read_to_string(&path).unwrap();
    let mut doc: Value = serde_json::from_str(&text).unwrap();
    let original = doc["table"]["curve"]["b"].as_u64().unwrap();
    doc["table"]["curve"]["b"] = Value::from((original + 1) % 71);
    fs::write(&path, serde_json::to_vec(&doc).unwrap()).unwrap();
    assert!(matches!(
        load_torsion(&path),
        Err(CliError::Core(Error::SchemaMismatch(_)))
    ));

    doc = serde_json::from_str(&text).unwrap();
    doc["schema"] = Value::from(99);
    fs::write(&path, serde_json::to_vec(&doc).unwrap()).unwrap();
    assert!(matches!(
        load_torsion(&path),
        Err(CliError::Core(Error::SchemaMismatch(_)))
    ));
}

#[test]
fn cache_hit_gives_identical_model_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let dir_s = dir.path().to_str().unwrap();
    let args = ["build-model", "--level", "4", "--cache-dir", dir_s];
    let s = spec(&args).unwrap();
    let cold = dispatch(&s).unwrap();
    let warm = dispatch(&s).unwrap();
    assert!(!cold.cache_hit && warm.cache_hit);
    assert_eq!(cold.payload_bytes(), warm.payload_bytes());
    assert_eq!(warm.payload["model"]["diagnostics"]["kernel"], 6);
}

#[test]
fn environment_overrides_cache_flag() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let status = bin()
        .env("MODULIEIS_CACHE", env_dir.path())
        .args(["find-curve", "--prime", "19", "--level", "3", "--cache-dir"])
        .arg(flag_dir.path())
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    assert_eq!(fs::read_dir(env_dir.path()).unwrap().count(), 1);
    assert_eq!(fs::read_dir(flag_dir.path()).unwrap().count(), 0);
}

#[test]
fn hecke_command_certifies() {
    let (code, v) = run_json(&["hecke", "--level", "3", "--n", "2", "--s", "1"]);
    assert_eq!(code, 0, "{v}");
    let p = &v["payload"];
    assert_eq!(p["specialized_equality"], true);
    assert_eq!(p["inclusions"], true);
    assert!(p["constraint_violations"].as_array().unwrap().is_empty());
    assert_eq!(p["certificate"]["n"], 2);
}

#[test]
fn analytic_check_passes_at_default_probe() {
    let (code, v) = run_json(&[
        "analytic-check",
        "--tau",
        "0.31,1.7",
        "--level",
        "5",
        "--radius",
        "200",
    ]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["payload"]["slope_probes"].as_array().unwrap().len(), 10);
    assert!(v["payload"]["legendre"]["residual"].as_f64().unwrap() < 1e-6);
}
