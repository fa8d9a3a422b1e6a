//! The three-table graph: eventualities, concepts, and weighted relations
//! between any two nodes.

mod builder;
mod export;
mod sqlite;
mod stats;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::extract::{Word, WordEdge};
use crate::hash::digest_id;
use crate::relation::RelationType;

pub use builder::{BuildSummary, GraphBuilder};
pub use export::{export_jsonl, import_jsonl, EVENTUALITIES_FILE, CONCEPTS_FILE, RELATIONS_FILE};
pub use sqlite::{load_sqlite, save_sqlite};
pub use stats::{PatternRow, RelationRow, Stats};

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("no node with id `{0}`")]
    NotFound(String),
    #[error("relation references unknown node `{0}`")]
    Dangling(String),
    #[error("id `{id}` already holds `{existing}`, refusing `{incoming}`")]
    Collision { id: String, existing: String, incoming: String },
    #[error("sqlite: {0}")]
    Sqlite(#[from] rusqlite::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file} line {line}: {reason}")]
    Parse { file: String, line: usize, reason: String },
}

pub(crate) fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.display().to_string(), source }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Event,
    Concept,
}

impl NodeKind {
    pub fn letter(self) -> &'static str {
        match self {
            NodeKind::Event => "E",
            NodeKind::Concept => "C",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Event => "event",
            NodeKind::Concept => "concept",
        }
    }

    pub fn parse(s: &str) -> Option<NodeKind> {
        match s {
            "event" => Some(NodeKind::Event),
            "concept" => Some(NodeKind::Concept),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeRef {
    pub kind: NodeKind,
    pub id: String,
}

impl NodeRef {
    pub fn event(id: impl Into<String>) -> NodeRef {
        NodeRef { kind: NodeKind::Event, id: id.into() }
    }

    pub fn concept(id: impl Into<String>) -> NodeRef {
        NodeRef { kind: NodeKind::Concept, id: id.into() }
    }
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind.letter(), self.id)
    }
}

/// Which pair of node kinds a relation joins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layer {
    Event,
    Concept,
    ConceptEvent,
    EventConcept,
}

impl Layer {
    pub fn of(head: NodeKind, tail: NodeKind) -> Layer {
        match (head, tail) {
            (NodeKind::Event, NodeKind::Event) => Layer::Event,
            (NodeKind::Concept, NodeKind::Concept) => Layer::Concept,
            (NodeKind::Concept, NodeKind::Event) => Layer::ConceptEvent,
            (NodeKind::Event, NodeKind::Concept) => Layer::EventConcept,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Layer::Event => "event",
            Layer::Concept => "concept",
            Layer::ConceptEvent => "concept-event",
            Layer::EventConcept => "event-concept",
        }
    }

    pub fn parse(s: &str) -> Option<Layer> {
        [Layer::Event, Layer::Concept, Layer::ConceptEvent, Layer::EventConcept]
            .into_iter()
            .find(|l| l.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventualityRecord {
    pub eid: String,
    pub pattern: String,
    pub verbs: Vec<String>,
    pub words: Vec<Word>,
    pub skeleton: Vec<usize>,
    pub edges: Vec<WordEdge>,
    /// Representative surface form.
    pub text: String,
    pub frequency: f64,
}

impl EventualityRecord {
    pub fn canonical(&self) -> String {
        crate::extract::canonical_string(&self.words, &self.edges)
    }

    pub fn lemma_text(&self) -> String {
        self.words.iter().map(|w| w.lemma.as_str()).collect::<Vec<_>>().join(" ")
    }

    pub fn skeleton_words(&self) -> impl Iterator<Item = &Word> {
        self.skeleton.iter().map(|&i| &self.words[i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptInstance {
    pub eid: String,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptRecord {
    pub cid: String,
    pub pattern: String,
    pub words: Vec<String>,
    pub weight: f64,
    /// Sorted by eid.
    pub instances: Vec<ConceptInstance>,
}

impl ConceptRecord {
    pub fn text(&self) -> String {
        self.words.join(" ")
    }

    pub fn cid_for(words: &[String]) -> String {
        digest_id(&words.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationRecord {
    pub rid: String,
    pub head: NodeRef,
    pub tail: NodeRef,
    /// Only positive weights are stored.
    pub weights: BTreeMap<RelationType, f64>,
}

impl RelationRecord {
    pub fn rid_for(head: &str, tail: &str) -> String {
        digest_id(&format!("{head}{tail}"))
    }

    pub fn new(head: NodeRef, tail: NodeRef) -> RelationRecord {
        RelationRecord { rid: Self::rid_for(&head.id, &tail.id), head, tail, weights: BTreeMap::new() }
    }

    pub fn layer(&self) -> Layer {
        Layer::of(self.head.kind, self.tail.kind)
    }

    pub fn weight(&self, t: RelationType) -> f64 {
        self.weights.get(&t).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.weights.values().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
}

/// A node adjacent to a queried node.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor {
    pub node: NodeRef,
    pub weight: f64,
    pub rid: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnowledgeGraph {
    events: BTreeMap<String, EventualityRecord>,
    concepts: BTreeMap<String, ConceptRecord>,
    relations: BTreeMap<String, RelationRecord>,
    outgoing: BTreeMap<NodeRef, BTreeSet<String>>,
    incoming: BTreeMap<NodeRef, BTreeSet<String>>,
}

impl KnowledgeGraph {
    pub fn new() -> KnowledgeGraph {
        KnowledgeGraph::default()
    }

    pub fn insert_event(&mut self, record: EventualityRecord) {
        self.events.insert(record.eid.clone(), record);
    }

    pub fn insert_concept(&mut self, record: ConceptRecord) {
        self.concepts.insert(record.cid.clone(), record);
    }

    /// Adds `weight` to the `relation` slot of the (head, tail) record.
    /// Non-positive weights are ignored.
    pub fn add_relation(&mut self, head: NodeRef, tail: NodeRef, relation: RelationType, weight: f64) {
        if weight <= 0.0 {
            return;
        }
        let rid = RelationRecord::rid_for(&head.id, &tail.id);
        let rec = self.relations.entry(rid.clone()).or_insert_with(|| {
            self.outgoing.entry(head.clone()).or_default().insert(rid.clone());
            self.incoming.entry(tail.clone()).or_default().insert(rid.clone());
            RelationRecord::new(head, tail)
        });
        *rec.weights.entry(relation).or_insert(0.0) += weight;
    }

    pub fn insert_relation(&mut self, record: RelationRecord) {
        for (t, w) in &record.weights {
            self.add_relation(record.head.clone(), record.tail.clone(), *t, *w);
        }
    }

    pub fn events(&self) -> impl Iterator<Item = &EventualityRecord> {
        self.events.values()
    }

    pub fn concepts(&self) -> impl Iterator<Item = &ConceptRecord> {
        self.concepts.values()
    }

    pub fn relations(&self) -> impl Iterator<Item = &RelationRecord> {
        self.relations.values()
    }

    pub fn event_count(&self) -> usize {
        self.events.len()
    }

    pub fn concept_count(&self) -> usize {
        self.concepts.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    pub fn event(&self, eid: &str) -> Result<&EventualityRecord, StoreError> {
        self.events.get(eid).ok_or_else(|| StoreError::NotFound(eid.to_string()))
    }

    pub fn concept(&self, cid: &str) -> Result<&ConceptRecord, StoreError> {
        self.concepts.get(cid).ok_or_else(|| StoreError::NotFound(cid.to_string()))
    }

    pub fn relation(&self, rid: &str) -> Result<&RelationRecord, StoreError> {
        self.relations.get(rid).ok_or_else(|| StoreError::NotFound(rid.to_string()))
    }

    pub fn relation_between(&self, head: &str, tail: &str) -> Option<&RelationRecord> {
        self.relations.get(&RelationRecord::rid_for(head, tail))
    }

    pub fn contains(&self, node: &NodeRef) -> bool {
        match node.kind {
            NodeKind::Event => self.events.contains_key(&node.id),
            NodeKind::Concept => self.concepts.contains_key(&node.id),
        }
    }

    /// Resolves a bare id to whichever table holds it.
    pub fn resolve(&self, id: &str) -> Result<NodeRef, StoreError> {
        if self.events.contains_key(id) {
            Ok(NodeRef::event(id))
        } else if self.concepts.contains_key(id) {
            Ok(NodeRef::concept(id))
        } else {
            Err(StoreError::NotFound(id.to_string()))
        }
    }

    /// Case-insensitive exact match on surface text, lemma text or concept
    /// text. Ties go to the more frequent node, then the smaller id.
    pub fn find_by_text(&self, text: &str) -> Option<NodeRef> {
        let key = text.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
        let mut best: Option<(f64, NodeRef)> = None;
        let mut offer = |score: f64, node: NodeRef| {
            let better = match &best {
                None => true,
                Some((s, n)) => score > *s || (score == *s && node < *n),
            };
            if better {
                best = Some((score, node));
            }
        };
        for e in self.events.values() {
            if e.text.to_lowercase() == key || e.lemma_text() == key {
                offer(e.frequency, NodeRef::event(&e.eid));
            }
        }
        for c in self.concepts.values() {
            if c.text().to_lowercase() == key {
                offer(c.weight, NodeRef::concept(&c.cid));
            }
        }
        best.map(|(_, n)| n)
    }

    pub fn outgoing(&self, node: &NodeRef) -> impl Iterator<Item = &RelationRecord> {
        self.outgoing.get(node).into_iter().flatten().map(|rid| &self.relations[rid])
    }

    pub fn incoming(&self, node: &NodeRef) -> impl Iterator<Item = &RelationRecord> {
        self.incoming.get(node).into_iter().flatten().map(|rid| &self.relations[rid])
    }

    /// Adjacent nodes, heaviest first (ties by id). With a type filter only
    /// that type's weight counts and zero-weight records are skipped.
    pub fn neighbors(
        &self,
        id: &str,
        direction: Direction,
        relation: Option<RelationType>,
    ) -> Result<Vec<Neighbor>, StoreError> {
        let node = self.resolve(id)?;
        let records: Vec<&RelationRecord> = match direction {
            Direction::Out => self.outgoing(&node).collect(),
            Direction::In => self.incoming(&node).collect(),
        };
        let mut out: Vec<Neighbor> = records
            .into_iter()
            .filter_map(|r| {
                let weight = relation.map_or_else(|| r.total(), |t| r.weight(t));
                let other = match direction {
                    Direction::Out => r.tail.clone(),
                    Direction::In => r.head.clone(),
                };
                (weight > 0.0).then(|| Neighbor { node: other, weight, rid: r.rid.clone() })
            })
            .collect();
        out.sort_by(|a, b| b.weight.total_cmp(&a.weight).then_with(|| a.node.id.cmp(&b.node.id)));
        Ok(out)
    }

    /// The core graph: eventualities seen at least `min_freq` times and
    /// event relations whose summed weight exceeds `max_dropped_weight`,
    /// both endpoints surviving. Concepts are not carried over.
    pub fn filter_core(&self, min_freq: f64, max_dropped_weight: f64) -> KnowledgeGraph {
        let mut out = KnowledgeGraph::new();
        for e in self.events.values().filter(|e| e.frequency >= min_freq) {
            out.insert_event(e.clone());
        }
        for r in self.relations.values() {
            if r.layer() == Layer::Event
                && r.total() > max_dropped_weight
                && out.events.contains_key(&r.head.id)
                && out.events.contains_key(&r.tail.id)
            {
                out.insert_relation(r.clone());
            }
        }
        out
    }

    /// Eventualities eligible for conceptualization and the event relations
    /// among them.
    pub fn conceptualization_view(&self, min_freq: f64) -> KnowledgeGraph {
        let mut out = KnowledgeGraph::new();
        for e in self.events.values().filter(|e| e.frequency >= min_freq) {
            out.insert_event(e.clone());
        }
        for r in self.relations.values() {
            if r.layer() == Layer::Event && out.events.contains_key(&r.head.id) && out.events.contains_key(&r.tail.id) {
                out.insert_relation(r.clone());
            }
        }
        out
    }

    /// Drops every concept and every relation touching one.
    pub fn without_concepts(&self) -> KnowledgeGraph {
        let mut out = KnowledgeGraph::new();
        for e in self.events.values() {
            out.insert_event(e.clone());
        }
        for r in self.relations.values().filter(|r| r.layer() == Layer::Event) {
            out.insert_relation(r.clone());
        }
        out
    }

    pub fn stats(&self) -> Stats {
        Stats::of(self)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::ingest::Pos;

    pub(crate) fn event(lemmas: &str, freq: f64) -> EventualityRecord {
        let words: Vec<Word> = lemmas
            .split_whitespace()
            .map(|l| Word { lemma: l.to_string(), pos: Pos::Noun, ner: None })
            .collect();
        let edges = Vec::new();
        EventualityRecord {
            eid: digest_id(&crate::extract::canonical_string(&words, &edges)),
            pattern: "s-v".into(),
            verbs: vec![],
            skeleton: (0..words.len()).collect(),
            words,
            edges,
            text: lemmas.to_string(),
            frequency: freq,
        }
    }

    fn graph() -> (KnowledgeGraph, Vec<String>) {
        let mut g = KnowledgeGraph::new();
        let ids: Vec<String> = ["a x", "b x", "c x", "d x"]
            .iter()
            .zip([5.0, 1.0, 3.0, 2.0])
            .map(|(t, f)| {
                let e = event(t, f);
                let id = e.eid.clone();
                g.insert_event(e);
                id
            })
            .collect();
        let e = |i: usize| NodeRef::event(ids[i].clone());
        g.add_relation(e(0), e(1), RelationType::Result, 2.0);
        g.add_relation(e(0), e(2), RelationType::Result, 0.5);
        g.add_relation(e(0), e(2), RelationType::Result, 0.5);
        g.add_relation(e(0), e(3), RelationType::Reason, 3.0);
        g.add_relation(e(0), e(3), RelationType::Result, 1.0);
        (g, ids)
    }

    #[test]
    fn weights_sum_per_type() {
        let (g, ids) = graph();
        let r = g.relation_between(&ids[0], &ids[2]).unwrap();
        assert_eq!(r.weight(RelationType::Result), 1.0);
        let r = g.relation_between(&ids[0], &ids[3]).unwrap();
        assert_eq!(r.weights.len(), 2);
        assert_eq!(g.relation_count(), 3);
    }

    #[test]
    fn neighbors_sorted_and_filtered() {
        let (g, ids) = graph();
        let n = g.neighbors(&ids[0], Direction::Out, Some(RelationType::Result)).unwrap();
        let got: Vec<_> = n.iter().map(|x| (x.node.id.clone(), x.weight)).collect();
        let mut tail = vec![(ids[2].clone(), 1.0), (ids[3].clone(), 1.0)];
        tail.sort_by(|a, b| a.0.cmp(&b.0));
        let mut want = vec![(ids[1].clone(), 2.0)];
        want.extend(tail);
        assert_eq!(got, want);
        let n = g.neighbors(&ids[0], Direction::Out, Some(RelationType::Reason)).unwrap();
        assert_eq!(n.len(), 1);
        let n = g.neighbors(&ids[3], Direction::In, None).unwrap();
        assert_eq!((n[0].node.id.as_str(), n[0].weight), (ids[0].as_str(), 4.0));
        assert!(matches!(g.neighbors("nope", Direction::Out, None), Err(StoreError::NotFound(_))));
    }

    #[test]
    fn core_filter() {
        let (g, ids) = graph();
        let core = g.filter_core(2.0, 1.0);
        assert_eq!(core.event_count(), 3);
        assert!(core.event(&ids[1]).is_err());
        // a->b dropped with its endpoint, a->c has total exactly 1.0
        assert_eq!(core.relation_count(), 1);
        assert!(core.relation_between(&ids[0], &ids[3]).is_some());
        assert!(core.events().all(|e| e.frequency >= 2.0));
        assert!(core.relations().all(|r| r.total() > 1.0));
    }

    #[test]
    fn gate_view_keeps_frequent() {
        let (g, ids) = graph();
        let v = g.conceptualization_view(5.0);
        assert_eq!(v.event_count(), 1);
        assert!(v.event(&ids[0]).is_ok());
        assert_eq!(v.relation_count(), 0);
    }

    #[test]
    fn rid_depends_on_order() {
        assert_ne!(RelationRecord::rid_for("a", "b"), RelationRecord::rid_for("b", "a"));
    }

    #[test]
    fn text_lookup() {
        let (g, ids) = graph();
        assert_eq!(g.find_by_text("A  X").unwrap().id, ids[0]);
        assert!(g.find_by_text("zzz").is_none());
    }
}
