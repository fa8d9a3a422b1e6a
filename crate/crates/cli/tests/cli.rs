use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use eventkg::ingest::{sentence_to_jsonl, DepEdge, ParsedSentence, Token};
use serde_json::Value;

fn barks_because_meows(doc: &str) -> ParsedSentence {
    let words = [
        ("The", "the", "DT"),
        ("dog", "dog", "NN"),
        ("barks", "bark", "VBZ"),
        ("because", "because", "IN"),
        ("the", "the", "DT"),
        ("cat", "cat", "NN"),
        ("meows", "meow", "VBZ"),
    ];
    let deps = [(1, "det", 0), (2, "nsubj", 1), (2, "advcl", 6), (6, "mark", 3), (5, "det", 4), (6, "nsubj", 5)];
    ParsedSentence {
        doc: doc.to_string(),
        para: 0,
        sent: 0,
        tokens: words.iter().enumerate().map(|(i, (w, l, t))| Token::new(i, w, l, t, None)).collect(),
        deps: deps.iter().map(|&(g, l, d)| DepEdge::new(g, l, d)).collect(),
    }
}

fn corpus(dir: &Path) -> PathBuf {
    let path = dir.join("corpus.jsonl");
    let mut f = std::fs::File::create(&path).unwrap();
    for d in 0..3 {
        writeln!(f, "{}", sentence_to_jsonl(&barks_because_meows(&format!("d{d}")))).unwrap();
    }
    path
}

fn eventkg(store: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eventkg")).arg("--store").arg(store).args(args).output().unwrap()
}

fn ok_json(out: Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn built() -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("kg.db");
    let input = corpus(dir.path());
    let report = ok_json(eventkg(&store, &["build", "--input", input.to_str().unwrap()]));
    assert_eq!(report["sentences"], 3);
    (dir, store)
}

#[test]
fn build_then_query_tails() {
    let (_dir, store) = built();
    let v = ok_json(eventkg(&store, &["query", "tails", "--head", "dog bark", "--types", "Reason"]));
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 1);
    assert_eq!(results[0]["text"], "cat meows");
    assert!((results[0]["probability"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn stats_reports_counts() {
    let (_dir, store) = built();
    let v = ok_json(eventkg(&store, &["stats", "--json"]));
    assert_eq!(v["eventualities"], 2);
    let text = eventkg(&store, &["stats"]);
    assert!(text.status.success());
    assert!(!text.stdout.is_empty());
}

#[test]
fn bad_flag_combination_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = eventkg(&dir.path().join("absent.db"), &["query", "rels", "--head", "x", "--tail", "y", "--types", "Reason,Result", "--hops", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = eventkg(&dir.path().join("absent.db"), &["mine-rules", "--min-hc", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_store_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = eventkg(&dir.path().join("absent.db"), &["stats"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn conceptualize_needs_isa_table() {
    let (_dir, store) = built();
    let out = eventkg(&store, &["conceptualize"]);
    assert!(!out.status.success());
}

#[test]
fn mine_rules_on_sparse_graph_is_empty() {
    let (_dir, store) = built();
    let out = eventkg(&store, &["mine-rules"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
}

#[test]
fn metapath_counts_are_tsv() {
    let (_dir, store) = built();
    let out = eventkg(&store, &["mine-metapaths", "--seeds", "10", "--walks", "5", "--len", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("metapath\thops\tcount"));
    assert!(lines.all(|l| l.split('\t').count() == 3));
}

#[test]
fn export_import_round_trip() {
    let (dir, store) = built();
    let out_dir = dir.path().join("export");
    assert!(eventkg(&store, &["export", "--out", out_dir.to_str().unwrap()]).status.success());
    let copy = dir.path().join("copy.db");
    assert!(eventkg(&copy, &["import", "--dir", out_dir.to_str().unwrap()]).status.success());
    assert_eq!(ok_json(eventkg(&store, &["stats", "--json"])), ok_json(eventkg(&copy, &["stats", "--json"])));
}
