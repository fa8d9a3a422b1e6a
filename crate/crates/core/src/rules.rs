//! Closed Horn rules over relation facts, scored by head coverage,
//! standard confidence and PCA confidence.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::relation::RelationType;
use crate::store::{KnowledgeGraph, Layer};

/// How an aggregated weight becomes a fact multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Multiplicity {
    /// Nearest integer, ties to even.
    #[default]
    Round,
    Ceil,
    /// The weight itself.
    WeightExact,
}

impl FromStr for Multiplicity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "round" => Ok(Multiplicity::Round),
            "ceil" => Ok(Multiplicity::Ceil),
            "weight-exact" => Ok(Multiplicity::WeightExact),
            _ => Err(format!("unknown multiplicity mode `{s}` (expected round, ceil or weight-exact)")),
        }
    }
}

impl Multiplicity {
    pub fn apply(self, weight: f64) -> f64 {
        let m = match self {
            Multiplicity::Round => weight.round_ties_even(),
            Multiplicity::Ceil => weight.ceil(),
            Multiplicity::WeightExact => weight,
        };
        m.max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Fact {
    pub head: String,
    pub relation: RelationType,
    pub tail: String,
}

/// Facts with their multiplicities; zero-multiplicity facts are absent.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FactSet {
    facts: BTreeMap<Fact, f64>,
}

impl FactSet {
    pub fn new() -> FactSet {
        FactSet::default()
    }

    pub fn insert(&mut self, head: &str, relation: RelationType, tail: &str, multiplicity: f64) {
        if multiplicity > 0.0 {
            *self
                .facts
                .entry(Fact { head: head.to_string(), relation, tail: tail.to_string() })
                .or_insert(0.0) += multiplicity;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Fact, f64)> {
        self.facts.iter().map(|(f, m)| (f, *m))
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.facts.values().sum()
    }

    pub fn relations(&self) -> BTreeSet<RelationType> {
        self.facts.keys().map(|f| f.relation).collect()
    }
}

/// Turns the relation records of one layer into facts.
pub fn expand_facts(kg: &KnowledgeGraph, layer: Layer, mode: Multiplicity, include_cooccurrence: bool) -> FactSet {
    let mut out = FactSet::new();
    for r in kg.relations().filter(|r| r.layer() == layer) {
        for (t, w) in &r.weights {
            if *t == RelationType::CoOccurrence && !include_cooccurrence {
                continue;
            }
            out.insert(&r.head.id, *t, &r.tail.id, mode.apply(*w));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    A,
    B,
    F,
}

impl Var {
    fn name(self) -> &'static str {
        match self {
            Var::A => "?a",
            Var::B => "?b",
            Var::F => "?f",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub subject: Var,
    pub relation: RelationType,
    pub object: Var,
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{} {} {}⟩", self.subject.name(), self.relation.name(), self.object.name())
    }
}

/// `body ⇒ ⟨?a T ?b⟩` with the body kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HornRule {
    pub body: Vec<Atom>,
    pub head: Atom,
}

impl HornRule {
    pub fn new(mut body: Vec<Atom>, head: RelationType) -> HornRule {
        body.sort();
        HornRule { body, head: Atom { subject: Var::A, relation: head, object: Var::B } }
    }

    fn occurrences(&self, v: Var) -> usize {
        std::iter::once(&self.head)
            .chain(&self.body)
            .map(|a| (a.subject == v) as usize + (a.object == v) as usize)
            .sum()
    }

    fn vars(&self) -> Vec<Var> {
        [Var::A, Var::B, Var::F].into_iter().filter(|&v| self.occurrences(v) > 0).collect()
    }

    /// Every variable occurs at least twice.
    pub fn is_closed(&self) -> bool {
        self.vars().into_iter().all(|v| self.occurrences(v) >= 2)
    }
}

impl fmt::Display for HornRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.body.iter().map(Atom::to_string).collect();
        write!(f, "{} ⇒ {}", body.join(" ∧ "), self.head)
    }
}

impl Serialize for HornRule {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RuleMetrics {
    pub support: f64,
    pub head_coverage: f64,
    pub std_confidence: f64,
    pub pca_confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredRule {
    pub rule: HornRule,
    #[serde(flatten)]
    pub metrics: RuleMetrics,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MineConfig {
    pub min_head_coverage: f64,
    pub min_pca_confidence: f64,
    /// Smallest body size that is reported.
    pub min_body: usize,
    pub max_body: usize,
}

impl Default for MineConfig {
    fn default() -> Self {
        MineConfig { min_head_coverage: 0.01, min_pca_confidence: 0.1, min_body: 2, max_body: 2 }
    }
}

/// Fact lookups by relation and endpoint.
struct Index<'a> {
    mult: HashMap<(&'a str, RelationType, &'a str), f64>,
    by_type: HashMap<RelationType, Vec<(&'a str, &'a str, f64)>>,
    by_subject: HashMap<(RelationType, &'a str), Vec<&'a str>>,
    by_object: HashMap<(RelationType, &'a str), Vec<&'a str>>,
    size: HashMap<RelationType, f64>,
}

impl<'a> Index<'a> {
    fn new(facts: &'a FactSet) -> Index<'a> {
        let mut ix = Index {
            mult: HashMap::new(),
            by_type: HashMap::new(),
            by_subject: HashMap::new(),
            by_object: HashMap::new(),
            size: HashMap::new(),
        };
        for (f, m) in facts.iter() {
            let (h, t) = (f.head.as_str(), f.tail.as_str());
            ix.mult.insert((h, f.relation, t), m);
            ix.by_type.entry(f.relation).or_default().push((h, t, m));
            ix.by_subject.entry((f.relation, h)).or_default().push(t);
            ix.by_object.entry((f.relation, t)).or_default().push(h);
            *ix.size.entry(f.relation).or_insert(0.0) += m;
        }
        ix
    }

    fn has(&self, s: &str, t: RelationType, o: &str) -> bool {
        self.mult.contains_key(&(s, t, o))
    }

    /// Whether the body holds for some binding of `?f` given `?a`, `?b`.
    fn satisfiable(&self, body: &[Atom], a: &'a str, b: &'a str) -> bool {
        let bound = |v: Var| match v {
            Var::A => Some(a),
            Var::B => Some(b),
            Var::F => None,
        };
        let (with_f, without_f): (Vec<&Atom>, Vec<&Atom>) =
            body.iter().partition(|x| x.subject == Var::F || x.object == Var::F);
        if !without_f.iter().all(|x| self.has(bound(x.subject).unwrap(), x.relation, bound(x.object).unwrap())) {
            return false;
        }
        let Some(first) = with_f.first() else {
            return true;
        };
        let candidates = self.f_candidates(first, a, b);
        candidates.iter().any(|&f| {
            with_f[1..].iter().all(|x| {
                let s = bound(x.subject).unwrap_or(f);
                let o = bound(x.object).unwrap_or(f);
                self.has(s, x.relation, o)
            })
        })
    }

    fn f_candidates(&self, atom: &Atom, a: &'a str, b: &'a str) -> Vec<&'a str> {
        let other = |v: Var| if v == Var::A { a } else { b };
        let list = if atom.subject == Var::F {
            self.by_object.get(&(atom.relation, other(atom.object)))
        } else {
            self.by_subject.get(&(atom.relation, other(atom.subject)))
        };
        list.cloned().unwrap_or_default()
    }

    /// Σ multiplicities of head facts whose pair satisfies the body.
    fn support(&self, rule: &HornRule) -> f64 {
        self.by_type
            .get(&rule.head.relation)
            .into_iter()
            .flatten()
            .filter(|(a, b, _)| self.satisfiable(&rule.body, a, b))
            .map(|(_, _, m)| m)
            .sum()
    }

    /// Distinct (?a, ?b) pairs for which the body of a closed rule holds.
    fn body_pairs(&self, body: &[Atom]) -> BTreeSet<(&'a str, &'a str)> {
        let mut out = BTreeSet::new();
        let first = &body[0];
        for &(s, o, _) in self.by_type.get(&first.relation).into_iter().flatten() {
            let mut binding: [Option<&str>; 3] = [None; 3];
            binding[first.subject as usize] = Some(s);
            binding[first.object as usize] = Some(o);
            self.extend(&body[1..], binding, &mut out);
        }
        out
    }

    fn extend(&self, rest: &[Atom], binding: [Option<&'a str>; 3], out: &mut BTreeSet<(&'a str, &'a str)>) {
        let Some(atom) = rest.first() else {
            if let (Some(a), Some(b)) = (binding[Var::A as usize], binding[Var::B as usize]) {
                out.insert((a, b));
            }
            return;
        };
        let (s, o) = (binding[atom.subject as usize], binding[atom.object as usize]);
        let mut next = |s: &'a str, o: &'a str| {
            let mut b = binding;
            b[atom.subject as usize] = Some(s);
            b[atom.object as usize] = Some(o);
            self.extend(&rest[1..], b, out);
        };
        match (s, o) {
            (Some(s), Some(o)) => {
                if self.has(s, atom.relation, o) {
                    next(s, o);
                }
            }
            (Some(s), None) => {
                for &o in self.by_subject.get(&(atom.relation, s)).into_iter().flatten() {
                    next(s, o);
                }
            }
            (None, Some(o)) => {
                for &s in self.by_object.get(&(atom.relation, o)).into_iter().flatten() {
                    next(s, o);
                }
            }
            (None, None) => {
                for &(s, o, _) in self.by_type.get(&atom.relation).into_iter().flatten() {
                    next(s, o);
                }
            }
        }
    }

    fn score(&self, rule: &HornRule) -> RuleMetrics {
        let t = rule.head.relation;
        let size = self.size.get(&t).copied().unwrap_or(0.0);
        let mut support = 0.0;
        let mut body = 0.0;
        let mut pca = 0.0;
        for (a, b) in self.body_pairs(&rule.body) {
            match self.mult.get(&(a, t, b)) {
                Some(m) => {
                    support += m;
                    body += m;
                    pca += m;
                }
                None => {
                    body += 1.0;
                    if self.by_subject.contains_key(&(t, a)) {
                        pca += 1.0;
                    }
                }
            }
        }
        metrics(support, size, body, pca)
    }
}

pub(crate) fn metrics(support: f64, size: f64, body: f64, pca: f64) -> RuleMetrics {
    let ratio = |n: f64, d: f64| if d > 0.0 { n / d } else { 0.0 };
    RuleMetrics {
        support,
        head_coverage: ratio(support, size),
        std_confidence: ratio(support, body),
        pca_confidence: ratio(support, pca),
    }
}

/// Metrics of one rule. The support is the multiplicity mass of head facts
/// predicted by the body; the confidence denominators count each predicted
/// pair once, or with its multiplicity when it is a known fact. The PCA
/// denominator keeps only pairs whose `?a` has some fact of the head
/// relation.
pub fn score_rule(rule: &HornRule, facts: &FactSet) -> RuleMetrics {
    Index::new(facts).score(rule)
}

fn sort_rules(rules: &mut [ScoredRule]) {
    rules.sort_by(|x, y| {
        y.metrics
            .pca_confidence
            .total_cmp(&x.metrics.pca_confidence)
            .then_with(|| y.metrics.head_coverage.total_cmp(&x.metrics.head_coverage))
            .then_with(|| x.rule.to_string().cmp(&y.rule.to_string()))
    });
}

/// Breadth-first refinement from head-only rules. Each step adds a closing
/// atom (between variables already present) or a dangling atom (introducing
/// `?f`). Rules below the head-coverage threshold are never refined, which
/// is safe because refinement cannot raise support. Closed rules meeting
/// both thresholds and at least `min_body` atoms are returned, best first.
pub fn mine(facts: &FactSet, config: &MineConfig) -> Vec<ScoredRule> {
    let ix = Index::new(facts);
    let types: Vec<RelationType> = facts.relations().into_iter().collect();
    let mut queue: VecDeque<HornRule> = types.iter().map(|&t| HornRule::new(vec![], t)).collect();
    let mut seen: HashSet<HornRule> = HashSet::new();
    let mut out = Vec::new();
    while let Some(rule) = queue.pop_front() {
        if rule.body.len() >= config.max_body {
            continue;
        }
        let vars = rule.vars();
        let mut pairs: Vec<(Var, Var)> = Vec::new();
        for &s in &vars {
            for &o in &vars {
                if s != o {
                    pairs.push((s, o));
                }
            }
        }
        if !vars.contains(&Var::F) {
            for &v in &vars {
                pairs.push((v, Var::F));
                pairs.push((Var::F, v));
            }
        }
        for &(s, o) in &pairs {
            for &t in &types {
                let atom = Atom { subject: s, relation: t, object: o };
                if atom == rule.head || rule.body.contains(&atom) {
                    continue;
                }
                let mut body = rule.body.clone();
                body.push(atom);
                let next = HornRule::new(body, rule.head.relation);
                if !seen.insert(next.clone()) {
                    continue;
                }
                let support = ix.support(&next);
                let size = ix.size.get(&next.head.relation).copied().unwrap_or(0.0);
                if support <= 0.0 || support / size < config.min_head_coverage {
                    continue;
                }
                if next.is_closed() && next.body.len() >= config.min_body {
                    let m = ix.score(&next);
                    if m.pca_confidence >= config.min_pca_confidence {
                        out.push(ScoredRule { rule: next.clone(), metrics: m });
                    }
                }
                queue.push_back(next);
            }
        }
    }
    sort_rules(&mut out);
    out
}
