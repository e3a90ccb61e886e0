mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::crate_dir;
use serde_json::Value;

const GOLDEN: &str = "tests/golden/analyze_electromagnetic.json";
const EM_QUERY: &str = "An electromagnetic side-channel attack on the device leaks the secret signing key";

fn hwv2w(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hwv2w"))
        .args(args)
        .current_dir(cwd)
        .env_remove("RUST_LOG")
        .output()
        .expect("run hwv2w")
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn fixture(rel: &str) -> String {
    crate_dir().join("fixtures").join(rel).display().to_string()
}

/// ingest → build-index → build-ontology → train in `dir`.
fn build_artifacts(dir: &Path) -> PathBuf {
    ok(&hwv2w(&["ingest", "--nvd", &fixture("nvd/hw_feed.json"), "--cwe", &fixture("cwe_catalog.csv"), "--out", "snap.json"], dir));
    ok(&hwv2w(&["build-index", "--snapshot", "snap.json", "--out", "index.json"], dir));
    ok(&hwv2w(&["build-ontology", "--snapshot", "snap.json", "--out", "onto.nt"], dir));
    ok(&hwv2w(&["train", "--snapshot", "snap.json", "--out", "tree.json"], dir));
    dir.to_path_buf()
}

#[test]
fn ingest_three_items() {
    let tmp = tempfile::tempdir().unwrap();
    let out = ok(&hwv2w(
        &["ingest", "--nvd", &fixture("nvd/three_items.json"), "--cwe", &fixture("cwe_catalog.csv"), "--out", "s.json"],
        tmp.path(),
    ));
    assert!(out.contains("kept 3"), "{out}");
    let snap: Value = serde_json::from_str(&std::fs::read_to_string(tmp.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(snap["cves"].as_array().unwrap().len(), 3);
}

#[test]
fn analyze_json_matches_golden_file() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = build_artifacts(tmp.path());
    let out = ok(&hwv2w(
        &["analyze", "--index", "index.json", "--ontology", "onto.nt", "--tree", "tree.json", "--json", EM_QUERY],
        &dir,
    ));
    let golden = crate_dir().join(GOLDEN);
    if std::env::var_os("HWV2W_BLESS").is_some() {
        std::fs::create_dir_all(golden.parent().unwrap()).unwrap();
        std::fs::write(&golden, &out).unwrap();
    }
    assert_eq!(out, std::fs::read_to_string(&golden).unwrap());
    let got: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(got["cwe_distribution"]["modal"], "CWE-203");

    // a second run is byte-identical
    let again = ok(&hwv2w(
        &["analyze", "--index", "index.json", "--ontology", "onto.nt", "--tree", "tree.json", "--json", EM_QUERY],
        &dir,
    ));
    assert_eq!(out, again);
}

#[test]
fn text_output_and_query() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = build_artifacts(tmp.path());
    let text = ok(&hwv2w(&["analyze", "--index", "index.json", "--ontology", "onto.nt", EM_QUERY], &dir));
    assert!(text.contains("CWE-203"), "{text}");
    assert!(text.contains("vector: CVSS:3.1/"), "{text}");
    let q = "SELECT ?v ?t ?i WHERE { ?v TargetsCWE CWE-276 . ?v Exploits ?t . ?t hasAttackImpact ?i }";
    let rows = ok(&hwv2w(&["query", "--ontology", "onto.nt", q], &dir));
    assert!(rows.contains("CVE-2020-2020\tGoogleChromeOS\tSpoofingAttack"), "{rows}");
    let json: Value = serde_json::from_str(&ok(&hwv2w(&["query", "--json", "--ontology", "onto.nt", q], &dir))).unwrap();
    assert_eq!(json["vars"].as_array().unwrap().len(), 3);
}

#[test]
fn train_and_evaluate() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = build_artifacts(tmp.path());
    let text = ok(&hwv2w(&["train", "--snapshot", "snap.json", "--out", "t2.json", "--max-depth", "2", "--text"], &dir));
    assert!(text.starts_with("root "), "{text}");
    let e: Value = serde_json::from_str(&ok(&hwv2w(
        &["evaluate", "--tree", "t2.json", "--snapshot", "snap.json", "--all", "--json"],
        &dir,
    )))
    .unwrap();
    assert_eq!(e["samples"], 20);
    let acc = e["accuracy"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&acc));
}

#[test]
fn mitigate_from_fixtures() {
    let tmp = tempfile::tempdir().unwrap();
    let src = crate_dir().join("fixtures/mitigation");
    let out = ok(&hwv2w(
        &["mitigate", "side channel leak", "--cwe", "CWE-203", "--fixture-dir", &src.display().to_string(), "--json"],
        tmp.path(),
    ));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["prompt"].as_str().unwrap().contains("- CWE 203 - Potential Mitigation:"));
    assert_eq!(v["response"], "FIXTURE-RESPONSE");
    assert_eq!(v["source_urls"][0], "https://cwe.mitre.org/data/definitions/203.html");
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hwv2w(&["query", "--ontology", "nowhere/onto.nt", "SELECT ?v WHERE { ?v Exploits ?t }"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nowhere/onto.nt"));

    assert_eq!(hwv2w(&["frobnicate"], tmp.path()).status.code(), Some(1));
    assert_eq!(hwv2w(&["--help"], tmp.path()).status.code(), Some(0));
    assert_eq!(hwv2w(&["--version"], tmp.path()).status.code(), Some(0));

    let dir = build_artifacts(tmp.path());
    let out = hwv2w(&["analyze", "--index", "index.json", "--ontology", "onto.nt", "the of a"], &dir);
    assert_eq!(out.status.code(), Some(1));
    let out = hwv2w(&["query", "--ontology", "onto.nt", "SELECT ?x WHERE { }"], &dir);
    assert_eq!(out.status.code(), Some(1));

    // a page fixture directory with no pages: user error, nothing fetched
    let out = hwv2w(&["mitigate", "d", "--cwe", "CWE-203", "--fixture-dir", "empty"], &dir);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}
