//! The `hglab` binary: subcommands, config strictness, outputs and exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hglab::config::Config;
use hglab::CliError;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

fn hglab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hglab")).current_dir(dir).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    fs::write(dir.join(name), serde_json::to_vec_pretty(v).unwrap()).unwrap();
    name.to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn list_names_every_builtin_scenario() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hglab(tmp.path(), &["list"]);
    assert!(out.status.success());
    for id in ["klein", "simplex", "example51", "coxeter334", "graphp", "counterexample", "rescale36"] {
        assert!(stdout(&out).lines().any(|l| l.starts_with(id)), "{id} missing");
    }
}

#[test]
fn unknown_scenario_is_a_config_error() {
    let text = json!({"output_dir": "o", "scenarios": [{"id": "nope", "seed": 1, "diagnostics": []}]}).to_string();
    assert!(matches!(Config::parse(&text), Err(CliError::ConfigInvalid(_))));
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", &serde_json::from_str(&text).unwrap());
    let out = hglab(tmp.path(), &["run", &cfg]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_rejects_unknown_fields_missing_seeds_and_bad_diagnostics() {
    let bad = [
        json!({"output_dir": "o", "scenarios": [{"id": "klein", "seed": 1, "diagnostics": [], "extra": 1}]}),
        json!({"output_dir": "o", "scenarios": [{"id": "klein", "diagnostics": []}]}),
        json!({"output_dir": "o", "scenarios": [{"id": "klein", "seed": 1}]}),
        json!({"output_dir": "o", "scenarios": [{"id": "klein", "seed": 1, "diagnostics": ["faces"]}]}),
        json!({"output_dir": "o", "scenarios": [{"id": "klein", "seed": 1, "diagnostics": [], "tolerances": {"typo": 1.0}}]}),
        json!({"output_dir": "o", "scenarios": [
            {"id": "klein", "seed": 1, "diagnostics": []},
            {"id": "klein", "seed": 2, "diagnostics": []}
        ]}),
        json!({"scenarios": []}),
    ];
    for v in bad {
        assert!(Config::parse(&v.to_string()).is_err(), "accepted {v}");
    }
    let named = json!({"output_dir": "o", "scenarios": [
        {"id": "klein", "seed": 1, "diagnostics": []},
        {"id": "klein", "name": "klein_b", "seed": 2, "diagnostics": []}
    ]});
    assert!(Config::parse(&named.to_string()).is_ok());
}

#[test]
fn empty_diagnostics_give_a_valid_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "c.json",
        &json!({"output_dir": "out", "scenarios": [{"id": "graphp", "seed": 3, "diagnostics": []}]}),
    );
    let out = hglab(tmp.path(), &["run", &cfg, "--assert"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: Value = serde_json::from_slice(&fs::read(tmp.path().join("out/manifest.json")).unwrap()).unwrap();
    let bytes = fs::read(tmp.path().join(&cfg)).unwrap();
    assert_eq!(manifest["config_hash"], Value::String(hex::encode(Sha256::digest(&bytes))));
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 0);
}

#[test]
fn outputs_are_written_per_diagnostic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "c.json",
        &json!({"output_dir": "out", "scenarios": [
            {"id": "simplex", "name": "s", "seed": 5, "diagnostics": ["hilbert", "faces"], "params": {"samples": 50}}
        ]}),
    );
    let out = hglab(tmp.path(), &["run", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for d in ["hilbert", "faces"] {
        assert!(tmp.path().join(format!("out/s/{d}.json")).is_file());
        assert!(tmp.path().join(format!("out/s/{d}.csv")).is_file());
    }
    let manifest: Value = serde_json::from_slice(&fs::read(tmp.path().join("out/manifest.json")).unwrap()).unwrap();
    for entry in manifest["outputs"].as_array().unwrap() {
        for key in ["csv", "json"] {
            let path = entry[key].as_str().unwrap();
            assert!(fs::metadata(tmp.path().join(path)).unwrap().len() > 0, "{path} is empty");
        }
    }
    let csv = fs::read_to_string(tmp.path().join("out/s/hilbert.csv")).unwrap();
    assert_eq!(csv.lines().count(), 51);
}

#[test]
fn failed_checks_exit_with_two_only_in_assert_mode() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "c.json",
        &json!({"output_dir": "out", "scenarios": [
            {"id": "klein", "seed": 1, "diagnostics": ["hilbert"], "params": {"samples": 20}, "tolerances": {"exact": 0.0}}
        ]}),
    );
    // Boosted pairs are not exact to the last bit, so a zero tolerance fails.
    assert_eq!(hglab(tmp.path(), &["run", &cfg]).status.code(), Some(0));
    assert_eq!(hglab(tmp.path(), &["run", &cfg, "--assert"]).status.code(), Some(2));
}

#[test]
fn dist_matches_the_simplex_formula() {
    let tmp = tempfile::tempdir().unwrap();
    let dom = write(
        tmp.path(),
        "simplex.json",
        &json!({"type": "polytope", "d": 3, "facets": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}),
    );
    let out = hglab(tmp.path(), &["dist", &dom, "1,1,1", "4,1,1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let d: f64 = stdout(&out).trim().parse().unwrap();
    assert!((d - 0.5 * 4f64.ln()).abs() < 1e-12, "{d}");
    assert_eq!(hglab(tmp.path(), &["dist", &dom, "1,1", "1,1,1"]).status.code(), Some(1));
}

#[test]
fn cartan_of_a_product_accumulates_gaps() {
    let tmp = tempfile::tempdir().unwrap();
    let m = json!([[2, 0, 0], [0, 1, 0], [0, 0, 0.5]]);
    let single = write(tmp.path(), "m.json", &m);
    let product = write(tmp.path(), "p.json", &json!({"product": vec![m.clone(); 10]}));
    let v: Value = serde_json::from_str(&stdout(&hglab(tmp.path(), &["cartan", &single]))).unwrap();
    assert!((v["mu_1d"].as_f64().unwrap() - 2.0 * 2f64.ln()).abs() < 1e-12);
    let v: Value = serde_json::from_str(&stdout(&hglab(tmp.path(), &["cartan", &product]))).unwrap();
    assert!((v["mu_1d"].as_f64().unwrap() - 20.0 * 2f64.ln()).abs() < 1e-12);
    let bad = write(tmp.path(), "bad.json", &json!([[1, 2], [3]]));
    assert_eq!(hglab(tmp.path(), &["cartan", &bad]).status.code(), Some(1));
}
