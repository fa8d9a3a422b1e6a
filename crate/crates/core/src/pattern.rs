//! The eventuality pattern table and the single-pattern matcher.

use std::collections::BTreeSet;

use crate::ingest::{Clause, DepEdge, ParsedSentence, Pos};
use crate::label;

const DEFAULT_TSV: &str = include_str!("../data/patterns.tsv");

#[derive(Debug, thiserror::Error)]
#[error("pattern table line {line}: {reason}")]
pub struct PatternError {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotClass {
    Nominal,
    Verb,
    Adjective,
    Be,
    There,
}

impl SlotClass {
    fn from_name(name: &str) -> Option<SlotClass> {
        let stem = name.trim_end_matches(|c: char| c.is_ascii_digit());
        Some(match stem {
            "n" => SlotClass::Nominal,
            "v" => SlotClass::Verb,
            "a" => SlotClass::Adjective,
            "be" => SlotClass::Be,
            "there" => SlotClass::There,
            _ => return None,
        })
    }

    pub fn admits(self, pos: Pos, lemma: &str) -> bool {
        match self {
            SlotClass::Nominal => pos.is_nominal(),
            SlotClass::Verb => pos == Pos::Verb,
            SlotClass::Adjective => pos == Pos::Adjective,
            SlotClass::Be => pos == Pos::BeVerb,
            SlotClass::There => lemma.eq_ignore_ascii_case("there"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub name: String,
    pub class: SlotClass,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternEdge {
    pub gov: usize,
    pub label: String,
    pub dep: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub code: String,
    pub slots: Vec<Slot>,
    pub anchor: usize,
    /// Ordered so that every governor is bound before it is used.
    pub edges: Vec<PatternEdge>,
}

impl Pattern {
    pub fn anchor_class(&self) -> SlotClass {
        self.slots[self.anchor].class
    }

    pub fn describe(&self) -> String {
        self.edges
            .iter()
            .map(|e| format!("{}:{}:{}", self.slots[e.gov].name, e.label, self.slots[e.dep].name))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Token positions bound by a successful match.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Match {
    pub skeleton: Vec<usize>,
    pub words: Vec<usize>,
    /// Consumed edges, positive then optional, in source-token coordinates.
    pub edges: Vec<DepEdge>,
}

#[derive(Debug, Clone)]
pub struct PatternTable {
    patterns: Vec<Pattern>,
}

impl PatternTable {
    pub fn builtin() -> PatternTable {
        Self::parse(DEFAULT_TSV).expect("builtin pattern table parses")
    }

    pub fn parse(text: &str) -> Result<PatternTable, PatternError> {
        let mut patterns: Vec<Pattern> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let err = |reason: String| PatternError { line, reason };
            let cols: Vec<&str> = raw.split('\t').collect();
            if cols.len() != 3 {
                return Err(err(format!("expected 3 columns, found {}", cols.len())));
            }
            let code = cols[0].trim().to_string();
            if patterns.iter().any(|p| p.code == code) {
                return Err(err(format!("duplicate code {code}")));
            }
            let mut slots: Vec<Slot> = Vec::new();
            let mut slot = |name: &str| -> Result<usize, PatternError> {
                if let Some(i) = slots.iter().position(|s| s.name == name) {
                    return Ok(i);
                }
                let class = SlotClass::from_name(name)
                    .ok_or_else(|| PatternError { line, reason: format!("bad slot `{name}`") })?;
                slots.push(Slot { name: name.to_string(), class });
                Ok(slots.len() - 1)
            };
            let anchor = slot(cols[1].trim())?;
            let mut edges = Vec::new();
            for spec in cols[2].split_whitespace() {
                let parts: Vec<&str> = spec.split(':').collect();
                if parts.len() != 3 {
                    return Err(PatternError { line, reason: format!("bad edge `{spec}`") });
                }
                edges.push(PatternEdge { gov: slot(parts[0])?, label: parts[1].to_string(), dep: slot(parts[2])? });
            }
            let mut bound = vec![anchor];
            for e in &edges {
                if !bound.contains(&e.gov) {
                    return Err(err(format!("edge governor {} used before it is bound", slots[e.gov].name)));
                }
                if bound.contains(&e.dep) {
                    return Err(err(format!("slot {} bound twice", slots[e.dep].name)));
                }
                bound.push(e.dep);
            }
            if bound.len() != slots.len() {
                return Err(err("unreachable slot".into()));
            }
            patterns.push(Pattern { code, slots, anchor, edges });
        }
        Ok(PatternTable { patterns })
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn get(&self, code: &str) -> Option<&Pattern> {
        self.patterns.iter().find(|p| p.code == code)
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }
}

/// The clause-restricted dependency graph with canonical labels.
#[derive(Debug, Clone)]
pub struct ClauseGraph<'a> {
    pub sentence: &'a ParsedSentence,
    pub edges: Vec<DepEdge>,
}

impl<'a> ClauseGraph<'a> {
    pub fn new(sentence: &'a ParsedSentence, clause: &Clause) -> ClauseGraph<'a> {
        let edges = clause
            .edges(sentence)
            .map(|d| DepEdge::new(d.gov, label::canonical(&d.label), d.dep))
            .collect();
        ClauseGraph { sentence, edges }
    }

    /// The whole sentence as one clause.
    pub fn whole(sentence: &'a ParsedSentence) -> ClauseGraph<'a> {
        let edges = sentence
            .deps
            .iter()
            .map(|d| DepEdge::new(d.gov, label::canonical(&d.label), d.dep))
            .collect();
        ClauseGraph { sentence, edges }
    }
}

/// Tries one pattern anchored at `anchor`. Positive edges are bound by
/// backtracking; optional edges hanging below bound words are absorbed
/// transitively; any other non-ignored edge touching a bound word rejects
/// the binding.
pub fn match_one(graph: &ClauseGraph<'_>, anchor: usize, pattern: &Pattern) -> Option<Match> {
    let tok = graph.sentence.tokens.get(anchor)?;
    if !pattern.anchor_class().admits(tok.pos, &tok.lemma) {
        return None;
    }
    let mut binding = vec![usize::MAX; pattern.slots.len()];
    binding[pattern.anchor] = anchor;
    let mut used = Vec::with_capacity(pattern.edges.len());
    search(graph, pattern, 0, &mut binding, &mut used)
}

fn search(
    graph: &ClauseGraph<'_>,
    pattern: &Pattern,
    step: usize,
    binding: &mut Vec<usize>,
    used: &mut Vec<usize>,
) -> Option<Match> {
    if step == pattern.edges.len() {
        return complete(graph, binding, used);
    }
    let pe = &pattern.edges[step];
    let gov = binding[pe.gov];
    let class = pattern.slots[pe.dep].class;
    for (i, e) in graph.edges.iter().enumerate() {
        if e.gov != gov || e.label != pe.label || binding.contains(&e.dep) {
            continue;
        }
        let t = &graph.sentence.tokens[e.dep];
        if !class.admits(t.pos, &t.lemma) {
            continue;
        }
        binding[pe.dep] = e.dep;
        used.push(i);
        if let Some(m) = search(graph, pattern, step + 1, binding, used) {
            return Some(m);
        }
        used.pop();
        binding[pe.dep] = usize::MAX;
    }
    None
}

fn complete(graph: &ClauseGraph<'_>, binding: &[usize], used: &[usize]) -> Option<Match> {
    let skeleton: BTreeSet<usize> = binding.iter().copied().collect();
    let mut words = skeleton.clone();
    let mut consumed: BTreeSet<usize> = used.iter().copied().collect();
    loop {
        let before = consumed.len();
        for (i, e) in graph.edges.iter().enumerate() {
            if words.contains(&e.gov) && !words.contains(&e.dep) && label::is_optional(&e.label) {
                consumed.insert(i);
                words.insert(e.dep);
            }
        }
        if consumed.len() == before {
            break;
        }
    }
    let blocked = graph.edges.iter().enumerate().any(|(i, e)| {
        !consumed.contains(&i)
            && !label::is_ignored(&e.label)
            && (words.contains(&e.gov) || words.contains(&e.dep))
    });
    if blocked {
        return None;
    }
    let mut edges: Vec<DepEdge> = used.iter().map(|&i| graph.edges[i].clone()).collect();
    edges.extend(
        consumed
            .iter()
            .filter(|i| !used.contains(i))
            .map(|&i| graph.edges[i].clone()),
    );
    Some(Match { skeleton: skeleton.into_iter().collect(), words: words.into_iter().collect(), edges })
}
