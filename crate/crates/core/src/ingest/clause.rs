//! Clause segmentation over the dependency layer.

use std::collections::{BTreeMap, HashSet};

use super::{DepEdge, ParsedSentence};
use crate::label;
use crate::lexicon::{ConnectiveLexicon, ConnectiveMatch};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub id: usize,
    /// Sorted token indices.
    pub tokens: Vec<usize>,
}

impl Clause {
    pub fn contains(&self, token: usize) -> bool {
        self.tokens.binary_search(&token).is_ok()
    }

    /// Dependency edges with both endpoints inside the clause.
    pub fn edges<'a>(&'a self, sentence: &'a ParsedSentence) -> impl Iterator<Item = &'a DepEdge> {
        sentence.deps.iter().filter(move |d| self.contains(d.gov) && self.contains(d.dep))
    }
}

const CLAUSAL: [&str; 4] = ["advcl", "ccomp", "csubj", "parataxis"];

/// The token of a connective span whose governor lies outside the span.
pub(crate) fn connective_head(sentence: &ParsedSentence, m: &ConnectiveMatch) -> usize {
    m.tokens().rfind(|&t| sentence.governor(t).is_none_or(|e| !m.tokens().contains(&e.gov)))
        .unwrap_or(m.end - 1)
}

fn predicative(sentence: &ParsedSentence, token: usize) -> bool {
    sentence.tokens[token].pos.is_verbal()
        || sentence
            .children(token)
            .any(|d| matches!(label::canonical(&d.label), "cop" | "nsubj" | "nsubjpass"))
}

fn is_clause_head(sentence: &ParsedSentence, token: usize) -> bool {
    match sentence.governor(token) {
        None => true,
        Some(e) => {
            let l = label::canonical(&e.label);
            let base = l.split(':').next().unwrap_or(l);
            CLAUSAL.contains(&base)
                || (base == "conj" && predicative(sentence, e.gov) && predicative(sentence, token))
        }
    }
}

fn excluded(sentence: &ParsedSentence, token: usize) -> bool {
    sentence.tokens[token].is_punct()
        || sentence.governor(token).is_some_and(|e| label::canonical(&e.label) == "punct")
}

/// Splits a sentence into disjoint clauses. Separators are the heads of
/// connective occurrences; clause boundaries are clausal attachments
/// (`advcl`, `ccomp`, `csubj`, `parataxis`, and `conj` between
/// predicates). Each token joins the clause of its nearest ancestor that
/// is a clause head or a separator; separators and punctuation are left out.
pub fn split_clauses(sentence: &ParsedSentence, lexicon: &ConnectiveLexicon) -> Vec<Clause> {
    let separators: HashSet<usize> = lexicon
        .detect(sentence)
        .iter()
        .map(|m| connective_head(sentence, m))
        .collect();
    let n = sentence.tokens.len();
    let heads: Vec<bool> = (0..n).map(|t| is_clause_head(sentence, t)).collect();

    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for t in 0..n {
        if separators.contains(&t) || excluded(sentence, t) {
            continue;
        }
        let mut cur = t;
        let mut steps = 0;
        while !(heads[cur] || separators.contains(&cur)) && steps <= n {
            cur = sentence.governor(cur).map_or(cur, |e| e.gov);
            steps += 1;
        }
        groups.entry(cur).or_default().push(t);
    }
    let mut clauses: Vec<Vec<usize>> = groups.into_values().collect();
    clauses.sort_by_key(|c| c[0]);
    clauses
        .into_iter()
        .enumerate()
        .map(|(id, tokens)| Clause { id, tokens })
        .collect()
}
