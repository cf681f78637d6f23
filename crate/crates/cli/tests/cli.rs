use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn mtc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtc")).args(args).output().expect("run mtc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn construct(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.path().join(name);
    let mut all = vec!["construct"];
    all.extend_from_slice(args);
    all.extend(["--output", path.to_str().unwrap()]);
    let o = mtc(&all);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn construct_is_deterministic_and_shaped() {
    let a = mtc(&["construct", "metaplectic", "--N", "3"]);
    let b = mtc(&["construct", "metaplectic", "--N", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let doc: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["format"], 1);
    assert_eq!(doc["rank"], 10);
    let cyc: Value = serde_json::from_slice(&mtc(&["construct", "cyclic", "--n", "5", "--a", "2"]).stdout).unwrap();
    assert_eq!(cyc["rank"], 5);
}

#[test]
fn even_metaplectic_parameter_is_rejected() {
    let o = mtc(&["construct", "metaplectic", "--N", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("N must be odd"));
    assert_eq!(mtc(&["construct", "ising", "--nu", "2"]).status.code(), Some(2));
    assert_eq!(mtc(&["construct", "cyclic", "--n", "8"]).status.code(), Some(2));
    assert_eq!(mtc(&["construct", "bogus"]).status.code(), Some(2));
}

#[test]
fn verify_round_trip_and_failures() {
    let dir = TempDir::new().unwrap();
    let m5 = construct(&dir, "m5.json", &["metaplectic", "--N", "5"]);
    let o = mtc(&["verify", p(&m5)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let text = std::fs::read_to_string(&m5).unwrap();
    let md = mtc_roundtrip(&text);
    assert_eq!(md, text);

    let mut doc: Value = serde_json::from_str(&text).unwrap();
    doc["T"][1] = serde_json::json!({"conductor": 1, "terms": [[0, -1, 1]]});
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&doc).unwrap()).unwrap();
    let o = mtc(&["verify", p(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("balancing fails at (g2,") || stdout(&o).contains("balancing fails at (1, g2)"), "{}", stdout(&o));

    let truncated = dir.path().join("trunc.json");
    std::fs::write(&truncated, &text[..text.len() / 2]).unwrap();
    assert_eq!(mtc(&["verify", p(&truncated)]).status.code(), Some(2));
    assert_eq!(mtc(&["verify", p(&dir.path().join("missing.json"))]).status.code(), Some(2));
}

fn mtc_roundtrip(text: &str) -> String {
    let md = mtc_core::format::data_from_json(text).unwrap();
    mtc_core::format::data_to_json(&md)
}

#[test]
fn condense_metaplectic_three() {
    let dir = TempDir::new().unwrap();
    let m3 = construct(&dir, "m3.json", &["metaplectic", "--N", "3"]);
    let o = mtc(&["condense", p(&m3), "--boson", "g2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "6 invertibles, 2 × √3\n");
    assert_eq!(mtc(&["condense", p(&m3), "--boson", "g"]).status.code(), Some(2));
    assert_eq!(mtc(&["condense", p(&m3), "--boson", "nope"]).status.code(), Some(2));
    let o = mtc(&["--json", "condense", p(&m3), "--boson", "g2"]);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["invertible_count"], 6);
}

#[test]
fn enumerate_counts() {
    let o = mtc(&["enumerate", "--metaplectic-count", "15"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "16\n");
    assert_eq!(stdout(&mtc(&["enumerate", "--metaplectic-count", "9"])), "8\n");
    assert_eq!(stdout(&mtc(&["enumerate", "--cyclic-classes", "30"])), "8\n");
    assert_eq!(mtc(&["enumerate", "--metaplectic-count", "4"]).status.code(), Some(2));
    assert_eq!(mtc(&["enumerate"]).status.code(), Some(2));
}

#[test]
fn compare_ising_variants() {
    let dir = TempDir::new().unwrap();
    let i1 = construct(&dir, "i1.json", &["ising", "--nu", "1"]);
    let i3 = construct(&dir, "i3.json", &["ising", "--nu", "3"]);
    assert_eq!(mtc(&["compare", p(&i1), p(&i3)]).status.code(), Some(1));
    let o = mtc(&["compare", p(&i1), p(&i1)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("sigma -> sigma"));
}

#[test]
fn analyze_products_and_theorems() {
    let dir = TempDir::new().unwrap();
    let s = construct(&dir, "s.json", &["semion"]);
    let z3 = construct(&dir, "z3.json", &["cyclic", "--n", "3"]);
    let prod = construct(&dir, "prod.json", &["deligne", "--left", p(&s), "--right", p(&z3)]);
    let o = mtc(&["--json", "analyze", p(&prod), "-P", "primality", "-P", "semion"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["primality"]["prime"], false);
    assert!(r["semion"]["labels"].is_array());

    let m3 = construct(&dir, "m3.json", &["metaplectic", "--N", "3"]);
    let o = mtc(&["analyze", p(&m3), "--p", "2", "--m", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("metaplectic: N = 3"));
    assert!(out.contains("primality: prime"));
    assert!(out.contains("case metaplectic x odd cyclic (l = 3, k = 1)"));
    assert_eq!(mtc(&["analyze", p(&m3), "-P", "theorem"]).status.code(), Some(2));
    assert_eq!(mtc(&["analyze", p(&m3), "--p", "3", "--m", "2", "-P", "theorem"]).status.code(), Some(2));
}

#[test]
fn family_and_ring_documents() {
    let dir = TempDir::new().unwrap();
    let fam = construct(&dir, "fam.json", &["z2z2-family"]);
    let o = mtc(&["verify", p(&fam)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let ring = construct(&dir, "d7.json", &["dihedral-ring", "--m", "7"]);
    assert_eq!(mtc(&["verify", p(&ring)]).status.code(), Some(0));
    assert_eq!(mtc(&["condense", p(&ring), "--boson", "sgn"]).status.code(), Some(2));
}
