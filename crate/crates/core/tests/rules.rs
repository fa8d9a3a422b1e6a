mod common;

use std::collections::BTreeMap;

use eventkg::rules::{expand_facts, mine, score_rule, Atom, FactSet, HornRule, MineConfig, Multiplicity, Var};
use eventkg::store::{KnowledgeGraph, Layer, NodeRef};
use eventkg::RelationType::{self, *};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::oracle;

type RawFact = (u8, usize, u8, u8);

fn facts_strategy() -> impl Strategy<Value = Vec<RawFact>> {
    prop::collection::vec((0..6u8, 0..3usize, 0..6u8, 1..4u8), 1..25)
}

const TYPES: [RelationType; 3] = [Reason, Result, Contrast];

fn fact_set(raw: &[RawFact]) -> FactSet {
    let mut f = FactSet::new();
    for &(h, t, x, m) in raw {
        f.insert(&format!("e{h}"), TYPES[t], &format!("e{x}"), m as f64);
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn mine_matches_enumeration(raw in facts_strategy()) {
        let facts = fact_set(&raw);
        let cfg = MineConfig::default();
        let got: BTreeMap<String, _> = mine(&facts, &cfg).into_iter().map(|r| (r.rule.to_string(), r.metrics)).collect();
        prop_assert_eq!(got, oracle::enumerate_rules(&facts, cfg.min_head_coverage, cfg.min_pca_confidence));
    }

    #[test]
    fn metric_bounds(raw in facts_strategy()) {
        let cfg = MineConfig { min_head_coverage: 0.0, min_pca_confidence: 0.0, ..MineConfig::default() };
        for r in mine(&fact_set(&raw), &cfg) {
            let m = r.metrics;
            prop_assert!(m.pca_confidence >= m.std_confidence);
            for v in [m.head_coverage, m.std_confidence, m.pca_confidence] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
    }

    #[test]
    fn fact_order_is_irrelevant(raw in facts_strategy(), seed in any::<u64>()) {
        let mut shuffled = raw.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let cfg = MineConfig::default();
        prop_assert_eq!(mine(&fact_set(&raw), &cfg), mine(&fact_set(&shuffled), &cfg));
    }
}

#[test]
fn expansion_rounds_weights() {
    let mut kg = KnowledgeGraph::new();
    let (a, b, c) = (NodeRef::event("a"), NodeRef::event("b"), NodeRef::event("c"));
    kg.add_relation(a.clone(), b.clone(), Reason, 3.0);
    kg.add_relation(a.clone(), c.clone(), Reason, 0.4);
    kg.add_relation(b.clone(), c.clone(), Result, 2.5);
    kg.add_relation(b, c, CoOccurrence, 4.0);
    let round = expand_facts(&kg, Layer::Event, Multiplicity::Round, false);
    assert_eq!(round.len(), 2);
    assert_eq!(round.total(), 5.0);
    assert_eq!(expand_facts(&kg, Layer::Event, Multiplicity::Ceil, false).total(), 7.0);
    assert_eq!(expand_facts(&kg, Layer::Event, Multiplicity::WeightExact, true).total(), 9.9);
    assert!(expand_facts(&KnowledgeGraph::new(), Layer::Event, Multiplicity::Round, false).is_empty());
}

#[test]
fn belief_contrast_rule() {
    // "I believe X" concedes, "X" results elsewhere, and the pair contrasts.
    let mut f = FactSet::new();
    for i in 0..5 {
        f.insert(&format!("believe{i}"), Concession, &format!("mid{i}"), 2.0);
        f.insert(&format!("other{i}"), Result, &format!("mid{i}"), 1.0);
        f.insert(&format!("believe{i}"), Contrast, &format!("other{i}"), 1.0);
    }
    f.insert("believe0", Contrast, "noise", 1.0);
    let rules = mine(&f, &MineConfig::default());
    let want = "⟨?a Concession ?f⟩ ∧ ⟨?b Result ?f⟩ ⇒ ⟨?a Contrast ?b⟩";
    let r = rules.iter().find(|r| r.rule.to_string() == want).expect("rule surfaces");
    assert!(r.metrics.head_coverage >= 0.01 && r.metrics.pca_confidence >= 0.1);
    assert_eq!(r.metrics.support, 5.0);
    assert_eq!(r.metrics.head_coverage, 5.0 / 6.0);
}

#[test]
fn scoring_through_fresh_variable() {
    let atom = |s, t, o| Atom { subject: s, relation: t, object: o };
    let rule = HornRule::new(vec![atom(Var::A, Reason, Var::F), atom(Var::F, Result, Var::B)], Contrast);
    let mut f = FactSet::new();
    f.insert("x", Reason, "m", 1.0);
    f.insert("m", Result, "y", 1.0);
    f.insert("m", Result, "z", 1.0);
    f.insert("x", Contrast, "y", 1.0);
    let m = score_rule(&rule, &f);
    assert_eq!((m.support, m.std_confidence, m.pca_confidence), (1.0, 0.5, 0.5));
    assert_eq!(m, oracle::score(&rule, &f));
}
