//! End-to-end runs of the `qtriple` binary.

use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn qtriple(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtriple")).args(args).env("QTRIPLE_THREADS", "1").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).expect("valid JSON")
}

#[test]
fn list_covers_the_catalogue() {
    let o = qtriple(&["list", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let ids: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["id"].as_str().unwrap()).collect();
    assert!(ids.len() >= 18, "{ids:?}");
    for id in ["q-binomial", "jacobi-triple-product", "1psi1", "rgj", "rgjc", "mrgj", "mrgjc", "armacdid", "lambert"] {
        assert!(ids.contains(&id), "missing {id}");
    }
    let text = stdout(&qtriple(&["list"]));
    assert_eq!(text.lines().count(), ids.len());
}

#[test]
fn formal_rgj_is_exact() {
    let o = qtriple(&["verify", "--identity", "rgj", "--mode", "formal", "--order", "12", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["schema_version"], 1);
    let r = &v["results"][0];
    assert_eq!(r["identity_id"], "rgj");
    assert_eq!(r["mode"], "formal");
    assert_eq!(r["residual"], "0");
    assert_eq!(r["order"], 12);
    assert_eq!(r["pass"], true);
}

#[test]
fn numeric_1psi1_at_high_precision() {
    let o = qtriple(&["numeric", "--identity", "1psi1", "--a", "2", "--b", "0.1", "--z", "0.5", "--prec", "256", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let r = &v["results"][0];
    assert_eq!(r["precision_bits"], 256);
    let residual: f64 = r["residual"].as_str().unwrap().parse().unwrap();
    assert!(residual < 1e-30, "residual {residual}");
}

#[test]
fn unattainable_tolerance_is_a_verification_failure() {
    // 64 bits cannot reach 1e-30
    let o = qtriple(&["numeric", "--identity", "1psi1", "--prec", "64", "--tol", "1e-30"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(qtriple(&["verify", "--identity", "no-such-identity"]).status.code(), Some(2));
    assert_eq!(qtriple(&["verify", "--identity", "rgj", "--prec", "8"]).status.code(), Some(2));
    assert_eq!(qtriple(&["verify"]).status.code(), Some(2));
    assert_eq!(qtriple(&["verify", "--identity", "q-binomial", "--mode", "bogus"]).status.code(), Some(2));
    assert_eq!(qtriple(&["numeric", "--identity", "rgj", "--mode", "formal"]).status.code(), Some(2));
    assert_eq!(qtriple(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let args = ["report", "--identity", "pfaff-saalschutz", "--identity", "1psi1", "--seed", "11", "--trials", "5"];
    let (x, y) = (qtriple(&args), qtriple(&args));
    assert_eq!(x.status.code(), Some(0));
    assert_eq!(x.stdout, y.stdout);
    let v = json(&x);
    assert_eq!(v["wall_time"], Value::Null);
    let ids: Vec<&str> = v["results"].as_array().unwrap().iter().map(|r| r["identity_id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["1psi1", "pfaff-saalschutz"]);
}

#[test]
fn flags_override_the_config_file() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "identities = [\"q-binomial\"]\norder = 3\nseed = 5").unwrap();
    let path = f.path().to_str().unwrap();
    let o = qtriple(&["--config", path, "report", "--n", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["config"]["seed"], 5);
    assert_eq!(v["config"]["n"], 4);
    assert_eq!(v["results"][0]["identity_id"], "q-binomial");

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "no_such_key = 1").unwrap();
    let o = qtriple(&["--config", bad.path().to_str().unwrap(), "verify", "--all"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn markdown_report() {
    let o = qtriple(&["report", "--identity", "pentagonal", "--format", "markdown"]);
    assert_eq!(o.status.code(), Some(0));
    let md = stdout(&o);
    assert!(md.starts_with("# Verification report"));
    assert!(md.contains("## pentagonal (formal)"));
    assert!(md.contains("| check | mode |"));
}

#[test]
fn region_tools() {
    let inside = qtriple(&["region", "predicate", "--a", "0.3", "--b", "0.4", "--z", "0.9", "--format", "json"]);
    assert_eq!(inside.status.code(), Some(0));
    let v = json(&inside);
    assert_eq!(v["results"][0]["params"]["new_region"], "true");
    let o = qtriple(&["region", "containment", "--r", "2", "--samples", "200"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn derive_windows() {
    let o = qtriple(&["derive", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}
