//! Generalizing eventualities into concepts and carrying their weights
//! into concept-level relations.

mod isa;

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::extract::Word;
use crate::ingest::Pos;
use crate::relation::RelationType;
use crate::store::{ConceptInstance, ConceptRecord, EventualityRecord, KnowledgeGraph, Layer, NodeRef, RelationRecord};

pub use isa::{Hypernym, IsaError, IsaTable, TOP_K};

const PERSONAL_PRONOUNS: [&str; 18] = [
    "i", "me", "myself", "you", "yourself", "yourselves", "he", "him", "himself", "she", "her", "herself", "we", "us",
    "ourselves", "they", "them", "themselves",
];

pub fn is_personal_pronoun(lemma: &str) -> bool {
    PERSONAL_PRONOUNS.contains(&lemma.to_lowercase().as_str())
}

/// Placeholder for the `n`-th distinct person in an eventuality.
pub fn person_placeholder(n: usize) -> String {
    match n {
        0 => "PersonX".to_string(),
        1 => "PersonY".to_string(),
        2 => "PersonZ".to_string(),
        _ => format!("Person{}", n + 1),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptConfig {
    /// Candidates kept per eventuality.
    pub beam: usize,
    /// Candidates below this probability are dropped.
    pub min_prob: f64,
    /// Also build concept-to-event and event-to-concept edges.
    pub cross_layer_edges: bool,
}

impl Default for ConceptConfig {
    fn default() -> Self {
        ConceptConfig { beam: 100, min_prob: 0.0, cross_layer_edges: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TokenConceptualization {
    pub source: String,
    pub concept: String,
    pub probability: f64,
}

/// Options for one skeleton word. Entities map to their type and personal
/// pronouns to a person placeholder, both with probability 1. A noun known
/// to the IsA table keeps its own lemma (probability 1) next to its
/// hypernyms; compounds are looked up whole before the head noun alone.
/// Anything else passes through unchanged.
pub fn conceptualize_token(
    word: &Word,
    compound: Option<&str>,
    person: Option<&str>,
    isa: &IsaTable,
) -> Vec<TokenConceptualization> {
    let one = |concept: &str| TokenConceptualization {
        source: word.lemma.clone(),
        concept: concept.to_string(),
        probability: 1.0,
    };
    if !word.pos.is_nominal() {
        return vec![one(&word.lemma)];
    }
    if let Some(ner) = word.ner {
        return vec![one(ner.concept())];
    }
    if let Some(p) = person {
        return vec![one(p)];
    }
    let hypernyms = compound
        .map(|c| isa.lookup(c))
        .filter(|h| !h.is_empty())
        .unwrap_or_else(|| isa.lookup(&word.lemma));
    let mut out = vec![one(&word.lemma)];
    out.extend(hypernyms.iter().map(|h| TokenConceptualization {
        source: word.lemma.clone(),
        concept: h.concept.clone(),
        probability: h.probability,
    }));
    out
}

/// Concept candidates for one eventuality: the product over skeleton words
/// of their options, best `beam` kept, ordered by probability then text.
pub fn conceptualize_eventuality(e: &EventualityRecord, isa: &IsaTable, config: &ConceptConfig) -> Vec<(Vec<String>, f64)> {
    let mut persons: Vec<String> = Vec::new();
    let options: Vec<Vec<TokenConceptualization>> = e
        .skeleton
        .iter()
        .map(|&i| {
            let w = &e.words[i];
            let person = (w.pos == Pos::Pronoun && w.ner.is_none() && is_personal_pronoun(&w.lemma)).then(|| {
                let n = persons.iter().position(|p| *p == w.lemma).unwrap_or_else(|| {
                    persons.push(w.lemma.clone());
                    persons.len() - 1
                });
                person_placeholder(n)
            });
            let compound = compound_phrase(e, i);
            conceptualize_token(w, compound.as_deref(), person.as_deref(), isa)
        })
        .collect();

    let by_rank = |a: &(Vec<String>, f64), b: &(Vec<String>, f64)| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0));
    let mut beam: Vec<(Vec<String>, f64)> = vec![(Vec::new(), 1.0)];
    for opts in &options {
        let mut next = Vec::with_capacity(beam.len() * opts.len());
        for (words, p) in &beam {
            for o in opts {
                let q = p * o.probability;
                if q < config.min_prob {
                    continue;
                }
                let mut w = words.clone();
                w.push(o.concept.clone());
                next.push((w, q));
            }
        }
        next.sort_by(by_rank);
        next.truncate(config.beam.max(1));
        beam = next;
    }
    let mut best: BTreeMap<Vec<String>, f64> = BTreeMap::new();
    for (w, p) in beam {
        let slot = best.entry(w).or_insert(0.0);
        *slot = slot.max(p);
    }
    let mut out: Vec<_> = best.into_iter().collect();
    out.sort_by(by_rank);
    out
}

/// "pork rib" for the skeleton noun "rib" with a compound modifier "pork".
fn compound_phrase(e: &EventualityRecord, head: usize) -> Option<String> {
    let mut parts: Vec<usize> = e
        .edges
        .iter()
        .filter(|x| x.gov == head && x.label == "compound")
        .map(|x| x.dep)
        .collect();
    if parts.is_empty() {
        return None;
    }
    parts.push(head);
    parts.sort_unstable();
    Some(parts.iter().map(|&i| e.words[i].lemma.as_str()).collect::<Vec<_>>().join(" "))
}

/// Σ Pr(C|E)·w_E over the instances of a concept.
pub fn concept_weight(instances: &[(f64, f64)]) -> f64 {
    instances.iter().map(|(p, w)| p * w).sum()
}

/// The concept layer derived from a graph of eventualities.
#[derive(Debug, Clone, Default)]
pub struct ConceptLayer {
    pub concepts: Vec<ConceptRecord>,
    pub relations: Vec<RelationRecord>,
}

impl ConceptLayer {
    /// Adds the concepts and their relations to `graph`.
    pub fn apply_to(&self, graph: &mut KnowledgeGraph) {
        for c in &self.concepts {
            graph.insert_concept(c.clone());
        }
        for r in &self.relations {
            graph.insert_relation(r.clone());
        }
    }
}

type Candidates = HashMap<String, Vec<(String, f64)>>;

/// Conceptualizes every eventuality of `view` and derives concept-level
/// weights: each concept's weight, edges between concepts and (optionally)
/// edges between concepts and eventualities.
pub fn conceptualize(view: &KnowledgeGraph, isa: &IsaTable, config: &ConceptConfig) -> ConceptLayer {
    let events: Vec<&EventualityRecord> = view.events().collect();
    let per_event: Vec<Vec<(Vec<String>, f64)>> =
        events.par_iter().map(|e| conceptualize_eventuality(e, isa, config)).collect();

    let mut concepts: BTreeMap<String, ConceptRecord> = BTreeMap::new();
    let mut cands: Candidates = HashMap::new();
    for (e, list) in events.iter().zip(per_event) {
        let mut mine = Vec::with_capacity(list.len());
        for (words, p) in list {
            let cid = ConceptRecord::cid_for(&words);
            let rec = concepts.entry(cid.clone()).or_insert_with(|| ConceptRecord {
                cid: cid.clone(),
                pattern: e.pattern.clone(),
                words,
                weight: 0.0,
                instances: Vec::new(),
            });
            rec.weight += p * e.frequency;
            rec.instances.push(ConceptInstance { eid: e.eid.clone(), probability: p });
            mine.push((cid, p));
        }
        cands.insert(e.eid.clone(), mine);
    }

    let mut edges: BTreeMap<(NodeRef, NodeRef), BTreeMap<RelationType, f64>> = BTreeMap::new();
    let mut add = |h: NodeRef, t: NodeRef, ty: RelationType, w: f64| {
        *edges.entry((h, t)).or_default().entry(ty).or_insert(0.0) += w;
    };
    let none = Vec::new();
    for r in view.relations().filter(|r| r.layer() == Layer::Event) {
        let hs = cands.get(&r.head.id).unwrap_or(&none);
        let ts = cands.get(&r.tail.id).unwrap_or(&none);
        for (ty, w) in &r.weights {
            for (ch, ph) in hs {
                for (ct, pt) in ts {
                    add(NodeRef::concept(ch), NodeRef::concept(ct), *ty, ph * w * pt);
                }
            }
            if config.cross_layer_edges {
                for (ch, ph) in hs {
                    add(NodeRef::concept(ch), r.tail.clone(), *ty, ph * w);
                }
                for (ct, pt) in ts {
                    add(r.head.clone(), NodeRef::concept(ct), *ty, w * pt);
                }
            }
        }
    }
    let relations = edges
        .into_iter()
        .filter_map(|((h, t), weights)| {
            let mut rec = RelationRecord::new(h, t);
            rec.weights = weights.into_iter().filter(|(_, w)| *w > 0.0).collect();
            (!rec.weights.is_empty()).then_some(rec)
        })
        .collect();
    ConceptLayer { concepts: concepts.into_values().collect(), relations }
}
