use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn alggraph(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_alggraph"))
        .args(args)
        .current_dir(dir)
        .env_remove("ALGGRAPH_CAPS")
        .output()
        .expect("binary runs")
}

fn with_corpus() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let out = alggraph(dir.path(), &["corpus"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    dir
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{}: {}", e, String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn semilattice_connectivity_passes() {
    let d = with_corpus();
    let out = alggraph(d.path(), &["verify", "connectivity", "corpus/s2.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "pass");
}

#[test]
fn parity_relation_is_quasi_two_decomposable() {
    let d = with_corpus();
    let out = alggraph(d.path(), &["verify", "q2d", "rel/parity3.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "pass");
}

#[test]
fn projection_algebra_has_unary_edges() {
    let d = with_corpus();
    let out = alggraph(d.path(), &["analyze", "corpus/proj2.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["omits_type1"], false);
    let out = alggraph(d.path(), &["verify", "connectivity", "corpus/proj2.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["verdict"], "inapplicable");
}

#[test]
fn exit_codes_for_errors() {
    let d = with_corpus();
    assert_eq!(alggraph(d.path(), &["verify", "connectivity", "missing.json"]).status.code(), Some(74));
    assert_eq!(alggraph(d.path(), &["frobnicate"]).status.code(), Some(64));
    assert_eq!(alggraph(d.path(), &["verify", "sideways", "corpus/s2.json"]).status.code(), Some(64));
    std::fs::write(d.path().join("bad.json"), r#"{"name":"x","size":2,"operations":[{"name":"f","arity":2,"table":[1,0,0,1]}]}"#).unwrap();
    assert_eq!(alggraph(d.path(), &["analyze", "bad.json"]).status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_alggraph"))
        .args(["analyze", "corpus/s2.json"])
        .current_dir(d.path())
        .env("ALGGRAPH_CAPS", "nonsense=1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn caps_from_environment_apply() {
    let d = with_corpus();
    let out = Command::new(env!("CARGO_BIN_EXE_alggraph"))
        .args(["verify", "connectivity", "corpus/c3.json"])
        .current_dir(d.path())
        .env("ALGGRAPH_CAPS", "clone=1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(json(&out)["reasons"][0].as_str().unwrap().contains("truncated"));
}

#[test]
fn corpus_files_round_trip() {
    let d = with_corpus();
    for entry in std::fs::read_dir(d.path().join("corpus")).unwrap() {
        let p = entry.unwrap().path();
        let text = std::fs::read_to_string(&p).unwrap();
        let a = alggraph::FiniteAlgebra::from_json(&text).unwrap();
        assert_eq!(alggraph::FiniteAlgebra::from_json(&a.to_json()).unwrap(), a, "{}", p.display());
    }
    for entry in std::fs::read_dir(d.path().join("rel")).unwrap() {
        let p = entry.unwrap().path();
        let spec = alggraph::product::RelationSpec::from_json(&std::fs::read_to_string(&p).unwrap()).unwrap();
        let again = alggraph::product::RelationSpec::from_json(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(spec, again);
    }
}

#[test]
fn graph_writes_dot() {
    let d = with_corpus();
    let out = alggraph(d.path(), &["graph", "corpus/m2.json", "--dot", "m2.dot"]);
    assert_eq!(out.status.code(), Some(0));
    let dot = std::fs::read_to_string(d.path().join("m2.dot")).unwrap();
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("special"));
}

#[test]
fn edges_lists_records() {
    let d = with_corpus();
    let out = alggraph(d.path(), &["edges", "corpus/z2.json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["resolved"], "affine");
}

#[test]
fn random_is_reproducible() {
    let d = tempfile::tempdir().unwrap();
    let args = ["random", "--seed", "9", "--spec", "n=2..3;ops=2;filter=smooth", "--count", "4"];
    let a = alggraph(d.path(), &args);
    let b = alggraph(d.path(), &args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["instances"].as_array().unwrap().len(), 4);
    let out = alggraph(d.path(), &["random", "--spec", "n=2;ops=1;filter=omits1;budget=5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("starvation"));
}

#[test]
fn campaign_json_is_reproducible() {
    let d = tempfile::tempdir().unwrap();
    let args = ["campaign", "rect", "--seed", "4", "--count", "3", "--json", "a.json"];
    assert_eq!(alggraph(d.path(), &args).status.code(), Some(0));
    let args = ["campaign", "rect", "--seed", "4", "--count", "3", "--json", "b.json"];
    assert_eq!(alggraph(d.path(), &args).status.code(), Some(0));
    let a = std::fs::read(d.path().join("a.json")).unwrap();
    let b = std::fs::read(d.path().join("b.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn other_verifiers_on_corpus_relations() {
    let d = with_corpus();
    for (check, file) in [("rect", "rel/s2_order.json"), ("lifting", "rel/c3_order.json"), ("almost-trivial", "rel/parity3.json")] {
        let out = alggraph(d.path(), &["verify", check, file]);
        assert_eq!(out.status.code(), Some(0), "{} {}: {}", check, file, String::from_utf8_lossy(&out.stdout));
    }
    let out = alggraph(d.path(), &["verify", "qmaj", "corpus/m2.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["term"].is_string());
}
