//! Probabilistic one- and two-hop retrieval over a weighted relation graph.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use serde::Serialize;

use crate::relation::RelationType;
use crate::store::{KnowledgeGraph, Layer, NodeRef};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InferError {
    #[error("unknown node `{0}`")]
    UnknownId(String),
}

/// Which part of the graph a query sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryLayer {
    Event,
    Concept,
    Hybrid,
}

impl FromStr for QueryLayer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "event" => Ok(QueryLayer::Event),
            "concept" => Ok(QueryLayer::Concept),
            "hybrid" => Ok(QueryLayer::Hybrid),
            _ => Err(format!("unknown layer `{s}` (expected event, concept or hybrid)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub middle: NodeRef,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scored<T> {
    pub target: T,
    pub probability: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Witness>,
}

/// Truncation applied after ranking.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ranking {
    pub k: Option<usize>,
    pub min_prob: f64,
}

impl Default for Ranking {
    fn default() -> Self {
        Ranking { k: None, min_prob: 0.0 }
    }
}

impl Ranking {
    pub fn top(k: usize) -> Ranking {
        Ranking { k: Some(k), min_prob: 0.0 }
    }
}

type Adjacency = BTreeMap<NodeRef, BTreeMap<NodeRef, BTreeMap<RelationType, f64>>>;

/// Read-only adjacency view. Neighbor lists are kept in id order so every
/// sum is taken in a fixed order.
#[derive(Debug, Clone, Default)]
pub struct InferenceGraph {
    nodes: BTreeSet<NodeRef>,
    out: Adjacency,
}

impl InferenceGraph {
    pub fn from_kg(kg: &KnowledgeGraph, layer: QueryLayer, include_cooccurrence: bool) -> InferenceGraph {
        let mut nodes = BTreeSet::new();
        if layer != QueryLayer::Concept {
            nodes.extend(kg.events().map(|e| NodeRef::event(&e.eid)));
        }
        if layer != QueryLayer::Event {
            nodes.extend(kg.concepts().map(|c| NodeRef::concept(&c.cid)));
        }
        let keep = |l: Layer| match layer {
            QueryLayer::Event => l == Layer::Event,
            QueryLayer::Concept => l == Layer::Concept,
            QueryLayer::Hybrid => true,
        };
        let edges = kg
            .relations()
            .filter(|r| keep(r.layer()))
            .flat_map(|r| r.weights.iter().map(move |(t, w)| (r.head.clone(), *t, r.tail.clone(), *w)));
        Self::from_edges(nodes, edges, include_cooccurrence)
    }

    pub fn from_edges(
        nodes: impl IntoIterator<Item = NodeRef>,
        edges: impl IntoIterator<Item = (NodeRef, RelationType, NodeRef, f64)>,
        include_cooccurrence: bool,
    ) -> InferenceGraph {
        let mut g = InferenceGraph { nodes: nodes.into_iter().collect(), out: BTreeMap::new() };
        for (h, t, tail, w) in edges {
            if w <= 0.0 || (!include_cooccurrence && t == RelationType::CoOccurrence) {
                continue;
            }
            g.nodes.insert(h.clone());
            g.nodes.insert(tail.clone());
            *g.out.entry(h).or_default().entry(tail).or_default().entry(t).or_insert(0.0) += w;
        }
        g
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodeRef> {
        self.nodes.iter()
    }

    pub fn contains(&self, n: &NodeRef) -> bool {
        self.nodes.contains(n)
    }

    fn check(&self, n: &NodeRef) -> Result<(), InferError> {
        if self.nodes.contains(n) {
            Ok(())
        } else {
            Err(InferError::UnknownId(n.id.clone()))
        }
    }

    /// Outgoing tails with their weight for one relation type, in id order.
    pub fn tails_of(&self, head: &NodeRef, t: RelationType) -> Vec<(&NodeRef, f64)> {
        self.out
            .get(head)
            .into_iter()
            .flatten()
            .filter_map(|(tail, ws)| ws.get(&t).map(|w| (tail, *w)))
            .collect()
    }

    pub fn weights_between(&self, head: &NodeRef, tail: &NodeRef) -> Option<&BTreeMap<RelationType, f64>> {
        self.out.get(head).and_then(|m| m.get(tail))
    }

    fn tail_dist(&self, head: &NodeRef, t: RelationType) -> Vec<(&NodeRef, f64)> {
        let tails = self.tails_of(head, t);
        let total: f64 = tails.iter().map(|(_, w)| w).sum();
        tails.into_iter().map(|(n, w)| (n, w / total)).collect()
    }

    fn relation_dist(&self, head: &NodeRef, tail: &NodeRef) -> Vec<(RelationType, f64)> {
        let Some(ws) = self.weights_between(head, tail) else {
            return Vec::new();
        };
        let total: f64 = ws.values().sum();
        ws.iter().map(|(t, w)| (*t, w / total)).collect()
    }

    fn prior(&self, head: &NodeRef) -> Vec<(RelationType, f64)> {
        let mut by_type: BTreeMap<RelationType, f64> = BTreeMap::new();
        for ws in self.out.get(head).into_iter().flat_map(|m| m.values()) {
            for (t, w) in ws {
                *by_type.entry(*t).or_insert(0.0) += w;
            }
        }
        let total: f64 = by_type.values().sum();
        by_type.into_iter().map(|(t, w)| (t, w / total)).collect()
    }

    /// Pr(tail | head, T): the head's T-weights normalized over tails.
    pub fn tails_1hop(&self, head: &NodeRef, t: RelationType, rank: Ranking) -> Result<Vec<Scored<NodeRef>>, InferError> {
        self.check(head)?;
        let out = self
            .tail_dist(head, t)
            .into_iter()
            .map(|(n, p)| Scored { target: n.clone(), probability: p, witnesses: vec![] })
            .collect();
        Ok(rank_nodes(out, rank))
    }

    /// Σ over middles of Pr(m | head, T1)·Pr(tail | m, T2).
    pub fn tails_2hop(
        &self,
        head: &NodeRef,
        t1: RelationType,
        t2: RelationType,
        rank: Ranking,
    ) -> Result<Vec<Scored<NodeRef>>, InferError> {
        self.check(head)?;
        let mut acc: BTreeMap<NodeRef, (f64, Vec<Witness>)> = BTreeMap::new();
        for (m, p1) in self.tail_dist(head, t1) {
            for (tail, p2) in self.tail_dist(m, t2) {
                let slot = acc.entry(tail.clone()).or_insert((0.0, Vec::new()));
                slot.0 += p1 * p2;
                slot.1.push(Witness { middle: m.clone(), probability: p1 * p2 });
            }
        }
        let out = acc
            .into_iter()
            .map(|(target, (probability, witnesses))| Scored { target, probability, witnesses })
            .collect();
        Ok(rank_nodes(out, rank))
    }

    /// Pr(T | head, tail): the pair's weights normalized over types.
    pub fn relations_1hop(
        &self,
        head: &NodeRef,
        tail: &NodeRef,
        rank: Ranking,
    ) -> Result<Vec<Scored<Vec<RelationType>>>, InferError> {
        self.check(head)?;
        self.check(tail)?;
        let out = self
            .relation_dist(head, tail)
            .into_iter()
            .map(|(t, p)| Scored { target: vec![t], probability: p, witnesses: vec![] })
            .collect();
        Ok(rank_types(out, rank))
    }

    /// Pr(T | head): the head's outgoing weight mass per type.
    pub fn type_prior(&self, head: &NodeRef) -> Result<Vec<Scored<Vec<RelationType>>>, InferError> {
        self.check(head)?;
        let out = self
            .prior(head)
            .into_iter()
            .map(|(t, p)| Scored { target: vec![t], probability: p, witnesses: vec![] })
            .collect();
        Ok(rank_types(out, Ranking::default()))
    }

    /// score(T1, T2) = Σ over middles of Pr(T1 | head)·Pr(m | head, T1)·Pr(T2 | m, tail).
    pub fn relations_2hop(
        &self,
        head: &NodeRef,
        tail: &NodeRef,
        rank: Ranking,
    ) -> Result<Vec<Scored<Vec<RelationType>>>, InferError> {
        self.check(head)?;
        self.check(tail)?;
        let mut acc: BTreeMap<(RelationType, RelationType), (f64, Vec<Witness>)> = BTreeMap::new();
        for (t1, prior) in self.prior(head) {
            for (m, p_mid) in self.tail_dist(head, t1) {
                for (t2, p_rel) in self.relation_dist(m, tail) {
                    let p = prior * p_mid * p_rel;
                    let slot = acc.entry((t1, t2)).or_insert((0.0, Vec::new()));
                    slot.0 += p;
                    slot.1.push(Witness { middle: m.clone(), probability: p });
                }
            }
        }
        let out = acc
            .into_iter()
            .map(|((a, b), (probability, witnesses))| Scored { target: vec![a, b], probability, witnesses })
            .collect();
        Ok(rank_types(out, rank))
    }
}

fn truncate<T>(mut v: Vec<Scored<T>>, rank: Ranking) -> Vec<Scored<T>> {
    v.retain(|s| s.probability >= rank.min_prob);
    if let Some(k) = rank.k {
        v.truncate(k);
    }
    v
}

fn rank_nodes(mut v: Vec<Scored<NodeRef>>, rank: Ranking) -> Vec<Scored<NodeRef>> {
    v.sort_by(|a, b| b.probability.total_cmp(&a.probability).then_with(|| a.target.cmp(&b.target)));
    truncate(v, rank)
}

fn rank_types(mut v: Vec<Scored<Vec<RelationType>>>, rank: Ranking) -> Vec<Scored<Vec<RelationType>>> {
    v.sort_by(|a, b| b.probability.total_cmp(&a.probability).then_with(|| a.target.cmp(&b.target)));
    truncate(v, rank)
}
