use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn confset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_confset"))
        .args(args)
        .env_remove("CONFSET_MAX_ORDER")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn entry<'a>(report: &'a Value, check: &str) -> &'a Value {
    report["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["check"] == check)
        .unwrap_or_else(|| panic!("no entry {check}"))
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn enumerate_matches_golden() {
    let out = confset(&["enumerate", "--group", "Z3", "--k", "3"]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        include_str!("golden/f_z3_3.txt")
    );
    let out = confset(&["enumerate", "--group", "Z3", "--k", "2", "--punctured"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "(1,2)\n(2,1)\n");
}

#[test]
fn analyze_reports() {
    let out = confset(&["analyze", "--group", "Z3", "--k", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["verdict"], "consistent");
    assert_eq!(entry(&r, "generation")["outcome"]["generating"], false);
    assert_eq!(entry(&r, "cayley_components")["outcome"]["components"], 3);
    assert_eq!(entry(&r, "norm_obstruction")["status"], "confirmed");

    let r = json(&confset(&["analyze", "--group", "Z4", "--k", "3"]));
    assert_eq!(entry(&r, "generation")["outcome"]["generating"], true);
    assert_eq!(entry(&r, "cayley_components")["outcome"]["components"], 1);
    let checks: Vec<&str> = r["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["check"].as_str().unwrap())
        .collect();
    let mut sorted = checks.clone();
    sorted.sort();
    assert_eq!(checks, sorted);
}

#[test]
fn reports_are_byte_identical() {
    let args = ["punctured", "--group", "S3", "--k", "2"];
    assert_eq!(confset(&args).stdout, confset(&args).stdout);
    let a = json(&confset(&["zp", "--p", "5", "--seed", "7"]));
    let b = json(&confset(&["zp", "--p", "5"]));
    for check in ["dimension", "claimed_basis", "homogeneous_solution"] {
        assert_eq!(entry(&a, check)["status"], entry(&b, check)["status"]);
    }
    assert!(entry(&a, "dimension")["wall_time_ms"].is_null());
}

#[test]
fn text_format() {
    let out = confset(&["zp", "--p", "3", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("dimension=2"));
    assert!(text.lines().any(|l| l.starts_with("CHECK")));
    assert!(text.ends_with("verdict: consistent\n"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(confset(&["zp", "--p", "2"]).status.code(), Some(1));
    assert_eq!(confset(&["zp", "--p", "11"]).status.code(), Some(1));
    assert_eq!(
        confset(&["analyze", "--group", "Q8", "--k", "2"]).status.code(),
        Some(1)
    );
    assert_eq!(confset(&["analyze", "--group", "Z3"]).status.code(), Some(1));
    assert_eq!(confset(&["bogus"]).status.code(), Some(1));
    assert_eq!(confset(&["--help"]).status.code(), Some(0));
    let out = confset(&["analyze", "--group", "Z3xQ", "--k", "2"]);
    assert!(String::from_utf8(out.stderr).unwrap().contains("byte 3"));
}

#[test]
fn cayley_outputs() {
    let dot = scratch("z2.dot");
    let out = confset(&["cayley", "--group", "Z2", "--k", "2", "--out", dot.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("graph cayley {"));
    assert_eq!(text.matches(" -- ").count(), 4);

    let summary = scratch("z3.json");
    let out = confset(&[
        "cayley",
        "--group",
        "Z3",
        "--k",
        "3",
        "--dot-cap",
        "10",
        "--out",
        summary.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let s: Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(s["components"], 3);
    assert_eq!(s["sizes"], serde_json::json!([9, 9, 9]));

    let r = json(&confset(&["cayley", "--group", "Z5", "--k", "5"]));
    assert_eq!(entry(&r, "components")["outcome"]["connected"], false);
    assert_eq!(entry(&r, "components")["outcome"]["components"], 5);
}

#[test]
fn punctured_findings_exit_zero() {
    let out = confset(&["punctured", "--group", "Z3", "--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let literal = entry(&r, "literal_quotient");
    assert_eq!(literal["status"], "finding");
    assert_eq!(literal["outcome"]["quotient_size"], 4);
    assert_eq!(literal["outcome"]["image_size"], 2);
    assert_eq!(entry(&r, "orbit_quotient")["status"], "confirmed");
    assert_eq!(r["findings"], 1);
}

#[test]
fn max_order_env_overrides_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_confset"))
        .args(["analyze", "--group", "Z5", "--k", "3", "--max-order", "10^9"])
        .env("CONFSET_MAX_ORDER", "100")
        .output()
        .unwrap();
    let r = json(&out);
    assert_eq!(entry(&r, "generation")["status"], "skipped");
    let r = json(&confset(&[
        "analyze",
        "--group",
        "Z5",
        "--k",
        "3",
        "--max-order",
        "10^9",
    ]));
    assert_eq!(entry(&r, "generation")["status"], "confirmed");
}

#[test]
fn table_groups() {
    let path = scratch("z2.table");
    std::fs::write(&path, "2\n0 1\n1 0\n").unwrap();
    let spec = format!("table:{}xZ2", path.display());
    let r = json(&confset(&["analyze", "--group", &spec, "--k", "4"]));
    assert_eq!(entry(&r, "generation")["outcome"]["generating"], false);
    assert_eq!(entry(&r, "norm_obstruction")["status"], "confirmed");
}

#[test]
fn verify_all_small_cap_skips_d3() {
    let out = confset(&["verify-all", "--max-order", "1000", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text
        .lines()
        .any(|l| l.starts_with("dihedral/D3^6 ") && l.contains("skipped")));
}
