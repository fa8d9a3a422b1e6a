//! Brute-force reference implementations.

use std::collections::{BTreeMap, BTreeSet};

use eventkg::rules::{Atom, FactSet, HornRule, RuleMetrics, Var};
use eventkg::store::NodeRef;
use eventkg::RelationType;

/// Unique `(head, type, tail, weight)` edges.
pub type EdgeList = Vec<(NodeRef, RelationType, NodeRef, f64)>;

/// Σ over middle nodes of Pr(m | head, t1)·Pr(tail | m, t2), each
/// probability normalized by scanning the sorted edge list. The result holds
/// every tail reachable by some path.
pub fn two_hop_tails(edges: &EdgeList, head: &NodeRef, t1: RelationType, t2: RelationType) -> BTreeMap<NodeRef, f64> {
    let mut sorted = edges.clone();
    sorted.sort_by(|a, b| (&a.0, &a.2, a.1).cmp(&(&b.0, &b.2, b.1)));
    let leg = |from: &NodeRef, t: RelationType| -> Vec<(NodeRef, f64)> {
        let out: Vec<(NodeRef, f64)> =
            sorted.iter().filter(|e| &e.0 == from && e.1 == t).map(|e| (e.2.clone(), e.3)).collect();
        let total: f64 = out.iter().map(|x| x.1).sum();
        out.into_iter().map(|(n, w)| (n, w / total)).collect()
    };
    let mut acc: BTreeMap<NodeRef, f64> = BTreeMap::new();
    for (m, p1) in leg(head, t1) {
        for (tail, p2) in leg(&m, t2) {
            *acc.entry(tail).or_insert(0.0) += p1 * p2;
        }
    }
    acc
}

fn vars_of(a: &Atom) -> [Var; 2] {
    [a.subject, a.object]
}

fn closed(body: &[Atom]) -> bool {
    let mut n: BTreeMap<Var, usize> = BTreeMap::new();
    *n.entry(Var::A).or_insert(0) += 1;
    *n.entry(Var::B).or_insert(0) += 1;
    for a in body {
        for v in vars_of(a) {
            *n.entry(v).or_insert(0) += 1;
        }
    }
    n.values().all(|&c| c >= 2)
}

fn slot(v: Var) -> usize {
    match v {
        Var::A => 0,
        Var::B => 1,
        Var::F => 2,
    }
}

/// Scores a rule by materializing every pair of facts matching the body.
pub fn score(rule: &HornRule, facts: &FactSet) -> RuleMetrics {
    let list: Vec<(String, RelationType, String, f64)> =
        facts.iter().map(|(f, m)| (f.head.clone(), f.relation, f.tail.clone(), m)).collect();
    let head = rule.head.relation;
    let mult = |a: &str, b: &str| list.iter().find(|f| f.0 == a && f.1 == head && f.2 == b).map(|f| f.3);
    let has_head = |a: &str| list.iter().any(|f| f.0 == a && f.1 == head);

    let mut pairs: BTreeSet<(String, String)> = BTreeSet::new();
    let (x, y) = (&rule.body[0], &rule.body[1]);
    for f1 in list.iter().filter(|f| f.1 == x.relation) {
        for f2 in list.iter().filter(|f| f.1 == y.relation) {
            let mut bind: [Option<&str>; 3] = [None; 3];
            let mut ok = true;
            for (v, val) in [(x.subject, &f1.0), (x.object, &f1.2), (y.subject, &f2.0), (y.object, &f2.2)] {
                match bind[slot(v)] {
                    None => bind[slot(v)] = Some(val),
                    Some(prev) if prev == val => {}
                    Some(_) => ok = false,
                }
            }
            if ok {
                pairs.insert((bind[0].unwrap().to_string(), bind[1].unwrap().to_string()));
            }
        }
    }
    let size: f64 = list.iter().filter(|f| f.1 == head).map(|f| f.3).sum();
    let (mut support, mut body, mut pca) = (0.0, 0.0, 0.0);
    for (a, b) in &pairs {
        match mult(a, b) {
            Some(m) => {
                support += m;
                body += m;
                pca += m;
            }
            None => {
                body += 1.0;
                if has_head(a) {
                    pca += 1.0;
                }
            }
        }
    }
    let ratio = |n: f64, d: f64| if d > 0.0 { n / d } else { 0.0 };
    RuleMetrics {
        support,
        head_coverage: ratio(support, size),
        std_confidence: ratio(support, body),
        pca_confidence: ratio(support, pca),
    }
}

/// Every closed two-atom rule over the relation types present, scored
/// exhaustively and kept when it meets both thresholds.
pub fn enumerate_rules(facts: &FactSet, min_hc: f64, min_pca: f64) -> BTreeMap<String, RuleMetrics> {
    let types: Vec<RelationType> = facts.relations().into_iter().collect();
    let vars = [Var::A, Var::B, Var::F];
    let mut atoms = Vec::new();
    for &s in &vars {
        for &o in &vars {
            if s != o {
                for &t in &types {
                    atoms.push(Atom { subject: s, relation: t, object: o });
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for &head in &types {
        let head_atom = Atom { subject: Var::A, relation: head, object: Var::B };
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                let body = vec![atoms[i], atoms[j]];
                if body.contains(&head_atom) || !closed(&body) {
                    continue;
                }
                let rule = HornRule::new(body, head);
                let m = score(&rule, facts);
                if m.support > 0.0 && m.head_coverage >= min_hc && m.pca_confidence >= min_pca {
                    out.insert(rule.to_string(), m);
                }
            }
        }
    }
    out
}
