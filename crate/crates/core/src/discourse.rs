//! Explicit discourse relations between eventualities, plus sentence-level
//! co-occurrence.

use std::collections::{BTreeSet, HashSet};

use crate::extract::Eventuality;
use crate::ingest::ParsedSentence;
use crate::lexicon::{ConnectiveLexicon, ConnectiveMatch, UnknownConnective};
use crate::relation::RelationType;

/// Minimum overlap for an eventuality to count as lying inside an argument.
pub const SIMPSON_THRESHOLD: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("overlap coefficient of an empty token set")]
pub struct EmptyTokenSet;

/// |A ∩ B| / min(|A|, |B|).
pub fn simpson(a: &BTreeSet<String>, b: &BTreeSet<String>) -> Result<f64, EmptyTokenSet> {
    let denom = a.len().min(b.len());
    if denom == 0 {
        return Err(EmptyTokenSet);
    }
    Ok(a.intersection(b).count() as f64 / denom as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Previous,
    Current,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span {
    pub side: Side,
    /// Sorted token indices.
    pub tokens: Vec<usize>,
}

impl Span {
    fn of<'a>(&self, previous: Option<&'a ParsedSentence>, current: &'a ParsedSentence) -> &'a ParsedSentence {
        match self.side {
            Side::Current => current,
            Side::Previous => previous.expect("previous-sentence span has a sentence"),
        }
    }

    /// Lowercased lemmas of the non-punctuation tokens.
    pub fn keys(&self, sentence: &ParsedSentence) -> BTreeSet<String> {
        self.tokens
            .iter()
            .map(|&t| &sentence.tokens[t])
            .filter(|t| !t.is_punct())
            .map(|t| t.key())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arguments {
    pub arg1: Span,
    pub arg2: Span,
}

/// Connectives in the current sentence. The previous sentence is not
/// searched; it only ever supplies a first argument.
pub fn detect_connectives(
    current: &ParsedSentence,
    _previous: Option<&ParsedSentence>,
    lexicon: &ConnectiveLexicon,
) -> Vec<ConnectiveMatch> {
    lexicon.detect(current)
}

pub fn classify_relation(m: &ConnectiveMatch, lexicon: &ConnectiveLexicon) -> Result<RelationType, UnknownConnective> {
    lexicon.classify(&m.phrase)
}

fn has_content(sentence: &ParsedSentence, range: std::ops::Range<usize>) -> bool {
    range.into_iter().any(|t| !sentence.tokens[t].is_punct())
}

fn has_predicate(sentence: &ParsedSentence, tokens: &[usize]) -> bool {
    tokens.iter().any(|&t| sentence.tokens[t].pos.is_verbal())
}

/// If the span is headed by a single token with a clausal complement inside
/// the span, the complement is the argument proper ("I'm sure [we could
/// find ...]").
fn narrow(sentence: &ParsedSentence, tokens: Vec<usize>) -> Vec<usize> {
    let inside = |t: usize| tokens.binary_search(&t).is_ok();
    let tops: Vec<usize> = tokens
        .iter()
        .copied()
        .filter(|&t| !sentence.tokens[t].is_punct())
        .filter(|&t| sentence.governor(t).is_none_or(|e| !inside(e.gov)))
        .collect();
    if let [top] = tops[..] {
        let comp = sentence
            .children(top)
            .find(|d| crate::label::canonical(&d.label) == "ccomp" && inside(d.dep))
            .map(|d| d.dep);
        if let Some(c) = comp {
            return sentence.subtree(c).into_iter().filter(|&t| inside(t)).collect();
        }
    }
    tokens
}

/// Locates both arguments of a connective. A medial connective takes the
/// material before it (back to the previous connective) as the first
/// argument and the material after it (up to the next one) as the second.
/// A sentence-initial connective whose clause ends at a comma followed by
/// another clause is resolved inside the sentence, the connective's own
/// clause being the second argument; otherwise the previous sentence is
/// the first argument. Spans without a verb yield `None`.
pub fn extract_arguments(
    m: &ConnectiveMatch,
    current: &ParsedSentence,
    previous: Option<&ParsedSentence>,
    all: &[ConnectiveMatch],
) -> Option<Arguments> {
    let n = current.tokens.len();
    let prev_end = all.iter().filter(|o| o.end <= m.start).map(|o| o.end).max().unwrap_or(0);
    let next_start = all.iter().filter(|o| o.start >= m.end).map(|o| o.start).min().unwrap_or(n);
    let initial = !has_content(current, 0..m.start);

    let (arg1, arg2) = if !initial {
        (
            Span { side: Side::Current, tokens: (prev_end..m.start).collect() },
            Span { side: Side::Current, tokens: (m.end..next_start).collect() },
        )
    } else {
        let comma = (m.end..next_start)
            .find(|&t| current.tokens[t].surface == "," && has_content(current, m.end..t));
        let split = comma.and_then(|c| {
            let own: Vec<usize> = (m.end..c).collect();
            let rest: Vec<usize> = (c + 1..next_start).collect();
            (has_predicate(current, &own) && has_predicate(current, &rest)).then_some((rest, own))
        });
        match split {
            Some((rest, own)) => (Span { side: Side::Current, tokens: rest }, Span { side: Side::Current, tokens: own }),
            None => {
                let prev = previous?;
                (
                    Span { side: Side::Previous, tokens: (0..prev.tokens.len()).collect() },
                    Span { side: Side::Current, tokens: (m.end..next_start).collect() },
                )
            }
        }
    };
    let fix = |s: Span| {
        let sentence = s.of(previous, current);
        let tokens = narrow(sentence, s.tokens);
        has_predicate(sentence, &tokens).then_some(Span { side: s.side, tokens })
    };
    Some(Arguments { arg1: fix(arg1)?, arg2: fix(arg2)? })
}

/// Where a relation instance came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cue {
    Connective { phrase: String, start: usize, end: usize },
    CoOccurrence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub doc: String,
    pub para: usize,
    pub sent: usize,
    pub cue: Cue,
}

/// One observation of a relation. Its weight is `1 / share`, kept as an
/// integer so aggregation can be exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationInstance {
    pub head: String,
    pub tail: String,
    pub relation: RelationType,
    pub share: u64,
    pub provenance: Provenance,
}

impl RelationInstance {
    pub fn weight(&self) -> f64 {
        1.0 / self.share as f64
    }
}

fn aligned<'a>(keys: &BTreeSet<String>, events: &'a [Eventuality]) -> Vec<&'a Eventuality> {
    events
        .iter()
        .filter(|e| simpson(keys, &e.token_set()).is_ok_and(|s| s >= SIMPSON_THRESHOLD))
        .collect()
}

/// Links every eventuality aligned with the first argument to every one
/// aligned with the second, splitting one unit of weight evenly.
pub fn emit_relations(
    arg1: &BTreeSet<String>,
    arg2: &BTreeSet<String>,
    relation: RelationType,
    head_events: &[Eventuality],
    tail_events: &[Eventuality],
    provenance: &Provenance,
) -> Vec<RelationInstance> {
    let heads = aligned(arg1, head_events);
    let tails = aligned(arg2, tail_events);
    let share = (heads.len() * tails.len()) as u64;
    let mut out = Vec::with_capacity(share as usize);
    for h in &heads {
        for t in &tails {
            out.push(RelationInstance {
                head: h.eid.clone(),
                tail: t.eid.clone(),
                relation,
                share,
                provenance: provenance.clone(),
            });
        }
    }
    out
}

/// Pairs of eventualities in one sentence not already joined by a discourse
/// instance, headed by the earlier one.
pub fn emit_cooccurrence(
    events: &[Eventuality],
    linked: &HashSet<(String, String)>,
    provenance: &Provenance,
) -> Vec<RelationInstance> {
    let mut out = Vec::new();
    for (i, a) in events.iter().enumerate() {
        for b in &events[i + 1..] {
            let key = pair_key(&a.eid, &b.eid);
            if linked.contains(&key) {
                continue;
            }
            out.push(RelationInstance {
                head: a.eid.clone(),
                tail: b.eid.clone(),
                relation: RelationType::CoOccurrence,
                share: 1,
                provenance: Provenance { cue: Cue::CoOccurrence, ..provenance.clone() },
            });
        }
    }
    out
}

fn pair_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// All relation instances anchored in `current`: discourse relations for
/// each connective, then co-occurrence among the sentence's own
/// eventualities.
pub fn sentence_relations(
    current: &ParsedSentence,
    current_events: &[Eventuality],
    previous: Option<(&ParsedSentence, &[Eventuality])>,
    lexicon: &ConnectiveLexicon,
) -> Vec<RelationInstance> {
    let prev_sentence = previous.map(|p| p.0);
    let matches = detect_connectives(current, prev_sentence, lexicon);
    let base = Provenance {
        doc: current.doc.clone(),
        para: current.para,
        sent: current.sent,
        cue: Cue::CoOccurrence,
    };
    let mut out = Vec::new();
    let mut linked = HashSet::new();
    for m in &matches {
        let Some(args) = extract_arguments(m, current, prev_sentence, &matches) else {
            continue;
        };
        let relation = m.relation;
        let events_of = |side: Side| match side {
            Side::Current => current_events,
            Side::Previous => previous.map_or(&[][..], |p| p.1),
        };
        let k1 = args.arg1.keys(args.arg1.of(prev_sentence, current));
        let k2 = args.arg2.keys(args.arg2.of(prev_sentence, current));
        let prov = Provenance {
            cue: Cue::Connective { phrase: m.phrase.clone(), start: m.start, end: m.end },
            ..base.clone()
        };
        let found = emit_relations(&k1, &k2, relation, events_of(args.arg1.side), events_of(args.arg2.side), &prov);
        for r in &found {
            linked.insert(pair_key(&r.head, &r.tail));
        }
        out.extend(found);
    }
    out.extend(emit_cooccurrence(current_events, &linked, &base));
    out
}
