mod common;

use eventkg::pipeline::{build_graph, process_paragraph, PipelineConfig};
use eventkg::lexicon::ConnectiveLexicon;
use eventkg::pattern::PatternTable;
use eventkg::store::{export_jsonl, import_jsonl, load_sqlite, save_sqlite, GraphBuilder, KnowledgeGraph, Layer, StoreError};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph(seed: u64, n: usize) -> KnowledgeGraph {
    build_graph(&common::synthetic_corpus(n, seed), &PipelineConfig { workers: Some(1), ..PipelineConfig::default() }).unwrap().0
}

fn assert_same(a: &KnowledgeGraph, b: &KnowledgeGraph) {
    assert_eq!(a.events().collect::<Vec<_>>(), b.events().collect::<Vec<_>>());
    assert_eq!(a.concepts().collect::<Vec<_>>(), b.concepts().collect::<Vec<_>>());
    assert_eq!(a.relations().collect::<Vec<_>>(), b.relations().collect::<Vec<_>>());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn merge_order_is_irrelevant(seed in any::<u64>()) {
        let corpus = common::synthetic_corpus(60, seed);
        let lexicon = ConnectiveLexicon::builtin();
        let table = PatternTable::builtin();
        let mut parts: Vec<GraphBuilder> = corpus.iter().map(|p| process_paragraph(p, &lexicon, &table).unwrap()).collect();
        let mut sequential = GraphBuilder::new();
        for p in parts.clone() {
            sequential.merge(p).unwrap();
        }
        parts.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 1));
        // Merge as a tree rather than a fold.
        while parts.len() > 1 {
            let b = parts.pop().unwrap();
            let mut a = parts.pop().unwrap();
            a.merge(b).unwrap();
            parts.insert(0, a);
        }
        let shuffled = parts.pop().unwrap_or_default();
        prop_assert_eq!(sequential.summary(), shuffled.summary());
        assert_same(&sequential.finish().unwrap(), &shuffled.finish().unwrap());
    }
}

#[test]
fn sqlite_round_trip() {
    let g = graph(3, 150);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("kg.db");
    save_sqlite(&g, &path).unwrap();
    assert!(!dir.path().join("kg.db.partial").exists());
    assert_same(&g, &load_sqlite(&path).unwrap());
    save_sqlite(&g, &path).unwrap();
    assert_same(&g, &load_sqlite(&path).unwrap());
}

#[test]
fn jsonl_round_trip() {
    let g = graph(4, 150);
    let dir = tempfile::tempdir().unwrap();
    export_jsonl(&g, dir.path()).unwrap();
    assert_same(&g, &import_jsonl(dir.path()).unwrap());
}

#[test]
fn missing_store_is_an_error() {
    assert!(load_sqlite(std::path::Path::new("/nonexistent/kg.db")).is_err());
}

#[test]
fn core_filter_thresholds() {
    let g = graph(5, 400);
    let core = g.filter_core(2.0, 1.0);
    assert!(core.event_count() < g.event_count());
    assert!(core.events().all(|e| e.frequency >= 2.0));
    assert!(core.relations().all(|r| r.total() > 1.0 && r.layer() == Layer::Event));
    assert!(core.relations().all(|r| core.event(&r.head.id).is_ok() && core.event(&r.tail.id).is_ok()));
}

#[test]
fn stats_count_what_was_built() {
    let g = graph(6, 200);
    let s = g.stats();
    assert_eq!(s.patterns.iter().map(|r| r.eventualities).sum::<usize>(), g.event_count());
    let freq: f64 = g.events().map(|e| e.frequency).sum();
    assert_eq!(s.patterns.iter().map(|r| r.frequency).sum::<f64>(), freq);
    assert!(matches!(g.event("0".repeat(32).as_str()), Err(StoreError::NotFound(_))));
}
