//! Eventuality extraction over the clauses of a sentence.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::hash::digest_id;
use crate::ingest::{Clause, Ner, ParsedSentence, Pos};
use crate::pattern::{match_one, ClauseGraph, Match, PatternTable};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word {
    pub lemma: String,
    pub pos: Pos,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ner: Option<Ner>,
}

/// A dependency edge between two words of an eventuality, by word index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WordEdge {
    pub gov: usize,
    pub label: String,
    pub dep: usize,
}

/// One extracted eventuality instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Eventuality {
    pub eid: String,
    pub pattern: String,
    /// Words in sentence order.
    pub words: Vec<Word>,
    pub surfaces: Vec<String>,
    /// Indices into `words` of the pattern-bound words.
    pub skeleton: Vec<usize>,
    pub edges: Vec<WordEdge>,
    /// Token positions in the source sentence.
    #[serde(skip)]
    pub positions: Vec<usize>,
}

impl Eventuality {
    fn from_match(sentence: &ParsedSentence, pattern: &str, m: &Match) -> Eventuality {
        let index_of = |t: usize| m.words.binary_search(&t).expect("edge endpoint is a word");
        let words: Vec<Word> = m
            .words
            .iter()
            .map(|&t| {
                let tok = &sentence.tokens[t];
                Word { lemma: tok.key(), pos: tok.pos, ner: tok.ner }
            })
            .collect();
        let mut edges: Vec<WordEdge> = m
            .edges
            .iter()
            .map(|e| WordEdge { gov: index_of(e.gov), label: e.label.clone(), dep: index_of(e.dep) })
            .collect();
        edges.sort();
        let mut ev = Eventuality {
            eid: String::new(),
            pattern: pattern.to_string(),
            surfaces: m.words.iter().map(|&t| sentence.tokens[t].surface.clone()).collect(),
            skeleton: m.skeleton.iter().map(|&t| index_of(t)).collect(),
            words,
            edges,
            positions: m.words.clone(),
        };
        ev.eid = digest_id(&ev.canonical());
        ev
    }

    /// `lemma/pos,...|gov,label,dep;...` with edges rendered by lemma and
    /// sorted, so the string does not depend on extraction order.
    pub fn canonical(&self) -> String {
        canonical_string(&self.words, &self.edges)
    }

    pub fn text(&self) -> String {
        self.surfaces.join(" ")
    }

    pub fn lemma_text(&self) -> String {
        self.words.iter().map(|w| w.lemma.as_str()).collect::<Vec<_>>().join(" ")
    }

    pub fn verbs(&self) -> Vec<&str> {
        self.words.iter().filter(|w| w.pos.is_verbal()).map(|w| w.lemma.as_str()).collect()
    }

    /// Lemma set used for argument alignment.
    pub fn token_set(&self) -> BTreeSet<String> {
        self.words.iter().map(|w| w.lemma.clone()).collect()
    }
}

pub fn canonical_string(words: &[Word], edges: &[WordEdge]) -> String {
    let head = words
        .iter()
        .map(|w| format!("{}/{}", w.lemma, w.pos.name()))
        .collect::<Vec<_>>()
        .join(",");
    let mut rendered: Vec<String> = edges
        .iter()
        .map(|e| format!("{},{},{}", words[e.gov].lemma, e.label, words[e.dep].lemma))
        .collect();
    rendered.sort();
    format!("{head}|{}", rendered.join(";"))
}

pub fn eid(ev: &Eventuality) -> String {
    digest_id(&ev.canonical())
}

/// Extracts eventualities clause by clause. Anchors (verbs, forms of
/// "be", and copula governors) are visited outermost first; an anchor
/// already covered by an earlier eventuality is skipped, and the first
/// pattern in table order that matches wins.
pub fn extract_all(sentence: &ParsedSentence, clauses: &[Clause], table: &PatternTable) -> Vec<Eventuality> {
    let mut out = Vec::new();
    for clause in clauses {
        let graph = ClauseGraph::new(sentence, clause);
        out.extend(extract_graph(&graph, &clause.tokens, table));
    }
    out
}

pub fn extract_graph(graph: &ClauseGraph<'_>, tokens: &[usize], table: &PatternTable) -> Vec<Eventuality> {
    let sentence = graph.sentence;
    let copula_govs: BTreeSet<usize> = graph.edges.iter().filter(|e| e.label == "cop").map(|e| e.gov).collect();
    let mut anchors: Vec<usize> = tokens
        .iter()
        .copied()
        .filter(|&t| sentence.tokens[t].pos.is_verbal() || copula_govs.contains(&t))
        .collect();
    anchors.sort_by_key(|&t| (sentence.depth(t), t));

    let mut covered: BTreeSet<usize> = BTreeSet::new();
    let mut out = Vec::new();
    for anchor in anchors {
        if covered.contains(&anchor) {
            continue;
        }
        if let Some((code, m)) = table
            .patterns()
            .iter()
            .find_map(|p| match_one(graph, anchor, p).map(|m| (p.code.as_str(), m)))
        {
            covered.extend(m.words.iter().copied());
            out.push(Eventuality::from_match(sentence, code, &m));
        }
    }
    out.sort_by_key(|e| e.positions.first().copied());
    out
}
