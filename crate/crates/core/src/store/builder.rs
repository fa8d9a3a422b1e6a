//! Exact, order-independent aggregation of extracted instances.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{EventualityRecord, KnowledgeGraph, NodeRef, StoreError};
use crate::discourse::RelationInstance;
use crate::extract::{Eventuality, Word, WordEdge};
use crate::relation::RelationType;

#[derive(Debug, Clone, PartialEq)]
struct EventAcc {
    canonical: String,
    pattern: String,
    words: Vec<Word>,
    skeleton: Vec<usize>,
    edges: Vec<WordEdge>,
    text: String,
    count: u64,
}

impl EventAcc {
    fn absorb(&mut self, other: &EventAcc) {
        self.count += other.count;
        if other.text < self.text {
            self.text = other.text.clone();
        }
        if other.pattern < self.pattern {
            self.pattern = other.pattern.clone();
        }
        for (mine, theirs) in self.words.iter_mut().zip(&other.words) {
            mine.ner = match (mine.ner, theirs.ner) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
        }
    }
}

/// Weight of one relation slot as a histogram of `1/share` contributions.
type Shares = BTreeMap<u64, u64>;

/// Accumulates instances from any number of workers. Counts are integers
/// and relation weights are kept as share histograms, so merging is
/// associative and commutative and the finished graph does not depend on
/// how the input was partitioned.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GraphBuilder {
    strict: bool,
    events: BTreeMap<String, EventAcc>,
    relations: BTreeMap<(String, String), BTreeMap<RelationType, Shares>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BuildSummary {
    pub eventuality_instances: u64,
    pub unique_eventualities: usize,
    pub relation_instances: u64,
    pub unique_relations: usize,
}

impl GraphBuilder {
    pub fn new() -> GraphBuilder {
        GraphBuilder::default()
    }

    /// In strict mode `finish` rejects relations whose endpoints were never
    /// added as eventualities.
    pub fn strict(mut self, strict: bool) -> GraphBuilder {
        self.strict = strict;
        self
    }

    fn add_acc(&mut self, eid: &str, acc: EventAcc) -> Result<(), StoreError> {
        match self.events.get_mut(eid) {
            Some(existing) => {
                if existing.canonical != acc.canonical {
                    return Err(StoreError::Collision {
                        id: eid.to_string(),
                        existing: existing.canonical.clone(),
                        incoming: acc.canonical,
                    });
                }
                existing.absorb(&acc);
            }
            None => {
                self.events.insert(eid.to_string(), acc);
            }
        }
        Ok(())
    }

    pub fn add_eventuality(&mut self, ev: &Eventuality) -> Result<(), StoreError> {
        let acc = EventAcc {
            canonical: ev.canonical(),
            pattern: ev.pattern.clone(),
            words: ev.words.clone(),
            skeleton: ev.skeleton.clone(),
            edges: ev.edges.clone(),
            text: ev.text(),
            count: 1,
        };
        self.add_acc(&ev.eid, acc)
    }

    pub fn add_relation(&mut self, r: &RelationInstance) {
        *self
            .relations
            .entry((r.head.clone(), r.tail.clone()))
            .or_default()
            .entry(r.relation)
            .or_default()
            .entry(r.share)
            .or_insert(0) += 1;
    }

    pub fn extend<'a>(
        &mut self,
        events: impl IntoIterator<Item = &'a Eventuality>,
        relations: impl IntoIterator<Item = &'a RelationInstance>,
    ) -> Result<(), StoreError> {
        for e in events {
            self.add_eventuality(e)?;
        }
        for r in relations {
            self.add_relation(r);
        }
        Ok(())
    }

    pub fn merge(&mut self, other: GraphBuilder) -> Result<(), StoreError> {
        for (eid, acc) in other.events {
            self.add_acc(&eid, acc)?;
        }
        for (pair, slots) in other.relations {
            let mine = self.relations.entry(pair).or_default();
            for (t, shares) in slots {
                let slot = mine.entry(t).or_default();
                for (share, n) in shares {
                    *slot.entry(share).or_insert(0) += n;
                }
            }
        }
        Ok(())
    }

    pub fn summary(&self) -> BuildSummary {
        BuildSummary {
            eventuality_instances: self.events.values().map(|e| e.count).sum(),
            unique_eventualities: self.events.len(),
            relation_instances: self.relations.values().flat_map(|s| s.values()).flat_map(|h| h.values()).sum(),
            unique_relations: self.relations.len(),
        }
    }

    pub fn finish(self) -> Result<KnowledgeGraph, StoreError> {
        let mut g = KnowledgeGraph::new();
        for (eid, acc) in self.events {
            let verbs = acc.words.iter().filter(|w| w.pos.is_verbal()).map(|w| w.lemma.clone()).collect();
            g.insert_event(EventualityRecord {
                eid,
                pattern: acc.pattern,
                verbs,
                words: acc.words,
                skeleton: acc.skeleton,
                edges: acc.edges,
                text: acc.text,
                frequency: acc.count as f64,
            });
        }
        for ((head, tail), slots) in self.relations {
            if self.strict {
                for id in [&head, &tail] {
                    if g.event(id).is_err() {
                        return Err(StoreError::Dangling(id.clone()));
                    }
                }
            }
            for (t, shares) in slots {
                let weight: f64 = shares.iter().map(|(&share, &n)| n as f64 / share as f64).sum();
                g.add_relation(NodeRef::event(&head), NodeRef::event(&tail), t, weight);
            }
        }
        Ok(g)
    }
}
