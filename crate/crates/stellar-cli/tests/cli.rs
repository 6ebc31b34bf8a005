use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

const TRI: &str = r#"{"urelements":["a","b","c"],"faces":["{a}","{b}","{c}","{a,b}","{a,c}","{b,c}","{a,b,c}"]}"#;

fn stellar(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stellar"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Value {
    let out = stellar(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn to_file(dir: &Path, args: &[&str]) {
    let out = stellar(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
}

fn err(dir: &Path, args: &[&str]) -> Value {
    let out = stellar(dir, args);
    assert_eq!(out.status.code(), Some(1), "{args:?} should fail");
    serde_json::from_slice(&out.stderr).expect("json on stderr")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn setup() -> TempDir {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("tri.json"), TRI).unwrap();
    d
}

#[test]
fn subdividing_the_triangle_by_an_edge() {
    let d = setup();
    let v = ok(d.path(), &["subdivide", "--complex", "tri.json", "--by", "{a,b}"]);
    assert_eq!(v["faces"].as_array().unwrap().len(), 11);
}

#[test]
fn swapped_atoms_are_proven_equivalent() {
    let d = setup();
    let v = ok(d.path(), &["equiv", "--seq1", "[{a},{b}]", "--seq2", "[{b},{a}]"]);
    assert_eq!(v["status"], "proven");
    assert_eq!(v["same_faces"], true);
}

#[test]
fn faces_of_a_sequence() {
    let d = setup();
    let v = ok(d.path(), &["faces", "--seq", "[{a,b},{a,b,c}]"]);
    assert_eq!(v["count"], 17);
    assert_eq!(v["entry_is_face"], json!([true, true]));
}

#[test]
fn amalgamation_writes_a_verified_report() {
    let d = setup();
    let p = d.path();
    to_file(p, &["weld", "--complex", "tri.json", "--p", "a", "--t", "{a,b}", "--out", "w1.json"]);
    to_file(p, &["weld", "--complex", "tri.json", "--p", "c", "--t", "{b,c}", "--out", "w2.json"]);
    let v = ok(p, &["amalgamate", "--f", "w1.json", "--g", "w2.json", "--out", "am"]);
    assert_eq!(v["report"]["verified"], true);
    for f in ["f.json", "g.json", "amalgam.json", "report.json"] {
        assert!(p.join("am").join(f).exists(), "{f}");
    }
    // emitted objects load again unchanged
    let m = ok(p, &["check-map", "--map", "am/f.json"]);
    assert_eq!(m["grounded"], true);
    assert_eq!(m["expr"], read_json(&p.join("am/f.json"))["expr"]);
    let c = ok(p, &["subdivide", "--complex", "am/amalgam.json", "--seq", "[]"]);
    assert_eq!(c, read_json(&p.join("am/amalgam.json")));
}

#[test]
fn divide_compose_and_coinit() {
    let d = setup();
    let p = d.path();
    to_file(p, &["weld", "--complex", "tri.json", "--p", "a", "--t", "{a,b}", "--out", "w.json"]);
    to_file(p, &["divide", "--map", "w.json", "--by", "{a,c}", "--out", "d.json"]);
    let c = ok(p, &["coinit", "--map", "d.json"]);
    assert_eq!(c["verified"], true);
    let e = err(p, &["compose", "--left", "w.json", "--right", "w.json"]);
    assert_eq!(e["error"], "ValidationError");
    assert_eq!(e["invariant"], "DomainMismatch");
}

#[test]
fn tampered_assignment_is_rejected() {
    let d = setup();
    let p = d.path();
    to_file(p, &["weld", "--complex", "tri.json", "--p", "a", "--t", "{a,b}", "--out", "w.json"]);
    let mut v = read_json(&p.join("w.json"));
    v["assignment"][3][1] = json!("b");
    std::fs::write(p.join("bad.json"), v.to_string()).unwrap();
    let e = err(p, &["check-map", "--map", "bad.json"]);
    assert_eq!(e["invariant"], "assignment matches expression");
}

#[test]
fn pure_certificate_and_its_preconditions() {
    let d = setup();
    let p = d.path();
    let v = ok(p, &["certify-pure", "--complex", "tri.json", "--S", "[{a,b}]", "--T", "[{a,b,c}]", "--p", "a"]);
    assert_eq!(v["all_pure"], true);
    assert_eq!(v["composes_to_target"], true);
    let e = err(p, &["certify-pure", "--complex", "tri.json", "--S", "[{a,b}]", "--T", "[{a,b}]", "--p", "c"]);
    assert_eq!(e["error"], "PreconditionFailed");
    assert_eq!(e["invariant"], "(III)");
}

#[test]
fn limit_report_and_mesh() {
    let d = setup();
    let p = d.path();
    let v = ok(
        p,
        &["limit", "--ground", "tri.json", "--blocks", "1", "--samples", "20", "--report", "r.json", "--mesh", "m.off"],
    );
    assert_eq!(v["epsilons"].as_array().unwrap().len(), 2);
    let off = std::fs::read_to_string(p.join("m.off")).unwrap();
    assert!(off.starts_with("OFF\n7 6 0\n"));
    let report = read_json(&p.join("r.json"));
    assert!(report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["invariant"] == "Containment" && c["passed"] == true));
    let mesh = ok(p, &["export-mesh", "--ground", "tri.json", "--blocks", "1", "--stage", "0", "--format", "json"]);
    assert_eq!(mesh["faces"].as_array().unwrap().len(), 1);
}

#[test]
fn errors_are_structured() {
    let d = setup();
    let p = d.path();
    std::fs::write(p.join("open.json"), r#"{"urelements":["a","b"],"faces":["{a,b}"]}"#).unwrap();
    let e = err(p, &["subdivide", "--complex", "open.json", "--by", "{a}"]);
    assert_eq!(e["error"], "ValidationError");
    assert_eq!(e["invariant"], "NotSubsetClosed");
    let e = err(p, &["faces", "--seq", "[{a,b"]);
    assert_eq!(e["error"], "ParseError");
    let e = err(p, &["subdivide", "--complex", "missing.json", "--by", "{a}"]);
    assert_eq!(e["error"], "IoError");
    let e = err(p, &["export-mesh", "--ground", "tri.json", "--blocks", "1", "--stage", "9"]);
    assert_eq!(e["invariant"], "BadLevel");
}

#[test]
fn guardrail_comes_from_the_environment() {
    let d = setup();
    let out = Command::new(env!("CARGO_BIN_EXE_stellar"))
        .current_dir(d.path())
        .env("STELLAR_MAX_FACES", "8")
        .args(["subdivide", "--complex", "tri.json", "--by", "{a,b}"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let d = setup();
    let p = d.path();
    let args = ["limit", "--ground", "tri.json", "--blocks", "1", "--samples", "30", "--seed", "7"];
    let a = stellar(p, &args);
    let b = stellar(p, &args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn selftest_passes() {
    let d = setup();
    let v = ok(d.path(), &["selftest", "--cases", "8"]);
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 12);
}
