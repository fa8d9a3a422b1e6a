//! Per-pattern and per-relation-type counts.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::{KnowledgeGraph, Layer};
use crate::relation::RelationType;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternRow {
    pub pattern: String,
    pub eventualities: usize,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationRow {
    pub relation: RelationType,
    pub records: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stats {
    pub eventualities: usize,
    pub concepts: usize,
    pub relations: usize,
    pub patterns: Vec<PatternRow>,
    /// Event-layer relations only.
    pub relation_types: Vec<RelationRow>,
    pub layers: BTreeMap<Layer, usize>,
}

impl Stats {
    pub fn of(g: &KnowledgeGraph) -> Stats {
        let table = crate::pattern::PatternTable::builtin();
        let mut patterns: Vec<PatternRow> = table
            .patterns()
            .iter()
            .map(|p| PatternRow { pattern: p.code.clone(), eventualities: 0, frequency: 0.0 })
            .collect();
        for e in g.events() {
            let row = match patterns.iter().position(|r| r.pattern == e.pattern) {
                Some(i) => &mut patterns[i],
                None => {
                    patterns.push(PatternRow { pattern: e.pattern.clone(), eventualities: 0, frequency: 0.0 });
                    patterns.last_mut().unwrap()
                }
            };
            row.eventualities += 1;
            row.frequency += e.frequency;
        }
        let mut relation_types: Vec<RelationRow> =
            RelationType::ALL.iter().map(|&t| RelationRow { relation: t, records: 0, weight: 0.0 }).collect();
        let mut layers = BTreeMap::new();
        for r in g.relations() {
            *layers.entry(r.layer()).or_insert(0) += 1;
            if r.layer() != Layer::Event {
                continue;
            }
            for (t, w) in &r.weights {
                let row = &mut relation_types[t.index()];
                row.records += 1;
                row.weight += w;
            }
        }
        Stats {
            eventualities: g.event_count(),
            concepts: g.concept_count(),
            relations: g.relation_count(),
            patterns,
            relation_types,
            layers,
        }
    }
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "eventualities {}  concepts {}  relations {}", self.eventualities, self.concepts, self.relations)?;
        writeln!(f)?;
        writeln!(f, "{:<14} {:>12} {:>14}", "pattern", "unique", "frequency")?;
        for r in &self.patterns {
            writeln!(f, "{:<14} {:>12} {:>14.3}", r.pattern, r.eventualities, r.frequency)?;
        }
        writeln!(f)?;
        writeln!(f, "{:<18} {:>12} {:>14}", "relation", "records", "weight")?;
        for r in &self.relation_types {
            writeln!(f, "{:<18} {:>12} {:>14.3}", r.relation.name(), r.records, r.weight)?;
        }
        if !self.layers.is_empty() {
            writeln!(f)?;
            for (layer, n) in &self.layers {
                writeln!(f, "{:<18} {:>12}", layer.name(), n)?;
            }
        }
        Ok(())
    }
}
