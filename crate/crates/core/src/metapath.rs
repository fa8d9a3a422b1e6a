//! Random walks over the hybrid event/concept graph and their abstraction
//! into meta-paths.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::relation::RelationType;
use crate::store::{KnowledgeGraph, NodeKind, NodeRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeLabel {
    Relation(RelationType),
    /// Event to one of its concepts.
    Conceptualization,
    /// Concept to one of its instances.
    ConceptInstantiation,
}

impl EdgeLabel {
    pub fn name(self) -> &'static str {
        match self {
            EdgeLabel::Relation(t) => t.name(),
            EdgeLabel::Conceptualization => "Conceptualization",
            EdgeLabel::ConceptInstantiation => "ConceptInstantiation",
        }
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EdgeLabel {
    type Err = MetaPathError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Conceptualization" => Ok(EdgeLabel::Conceptualization),
            "ConceptInstantiation" => Ok(EdgeLabel::ConceptInstantiation),
            other => other
                .parse()
                .map(EdgeLabel::Relation)
                .map_err(|_| MetaPathError(format!("unknown edge label `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed meta-path: {0}")]
pub struct MetaPathError(pub String);

#[derive(Debug, Clone, PartialEq)]
pub struct HybridEdge {
    pub target: usize,
    pub label: EdgeLabel,
    pub weight: f64,
}

/// All nodes of a graph with relation edges from every layer plus
/// conceptualization edges in both directions.
///
/// An event `e` with frequency `f` and concept probability `p` gets an edge
/// to the concept of weight `p·f`; the concept gets the same mass back to
/// `e`. Normalized per node this gives `Pr(c|e)` out of events and the
/// Bayes-flipped `Pr(e|c)` out of concepts, on the same count scale as the
/// relation weights.
#[derive(Debug, Clone, Default)]
pub struct HybridGraph {
    nodes: Vec<NodeRef>,
    index: HashMap<NodeRef, usize>,
    out: Vec<Vec<HybridEdge>>,
}

impl HybridGraph {
    pub fn from_kg(kg: &KnowledgeGraph, include_cooccurrence: bool) -> HybridGraph {
        let mut g = HybridGraph::default();
        for e in kg.events() {
            g.add_node(NodeRef::event(&e.eid));
        }
        for c in kg.concepts() {
            g.add_node(NodeRef::concept(&c.cid));
        }
        for r in kg.relations() {
            for (t, w) in &r.weights {
                if *t == RelationType::CoOccurrence && !include_cooccurrence {
                    continue;
                }
                g.add_edge(&r.head, &r.tail, EdgeLabel::Relation(*t), *w);
            }
        }
        for c in kg.concepts() {
            let cref = NodeRef::concept(&c.cid);
            for inst in &c.instances {
                let Ok(e) = kg.event(&inst.eid) else { continue };
                let mass = inst.probability * e.frequency;
                let eref = NodeRef::event(&e.eid);
                g.add_edge(&eref, &cref, EdgeLabel::Conceptualization, mass);
                g.add_edge(&cref, &eref, EdgeLabel::ConceptInstantiation, mass);
            }
        }
        g.finish();
        g
    }

    /// Builds from explicit nodes and `(head, tail, label, weight)` edges.
    pub fn from_edges(nodes: impl IntoIterator<Item = NodeRef>, edges: impl IntoIterator<Item = (NodeRef, NodeRef, EdgeLabel, f64)>) -> HybridGraph {
        let mut g = HybridGraph::default();
        for n in nodes {
            g.add_node(n);
        }
        for (h, t, l, w) in edges {
            g.add_node(h.clone());
            g.add_node(t.clone());
            g.add_edge(&h, &t, l, w);
        }
        g.finish();
        g
    }

    fn add_node(&mut self, n: NodeRef) {
        if !self.index.contains_key(&n) {
            self.index.insert(n.clone(), self.nodes.len());
            self.nodes.push(n);
            self.out.push(Vec::new());
        }
    }

    fn add_edge(&mut self, h: &NodeRef, t: &NodeRef, label: EdgeLabel, weight: f64) {
        if weight <= 0.0 {
            return;
        }
        let (Some(&hi), Some(&ti)) = (self.index.get(h), self.index.get(t)) else { return };
        self.out[hi].push(HybridEdge { target: ti, label, weight });
    }

    fn finish(&mut self) {
        // Sort nodes so that indices do not depend on insertion order.
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        order.sort_by(|&a, &b| self.nodes[a].cmp(&self.nodes[b]));
        let mut remap = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new;
        }
        let nodes: Vec<NodeRef> = order.iter().map(|&i| self.nodes[i].clone()).collect();
        let mut out: Vec<Vec<HybridEdge>> = order.iter().map(|&i| std::mem::take(&mut self.out[i])).collect();
        for edges in &mut out {
            for e in edges.iter_mut() {
                e.target = remap[e.target];
            }
            edges.sort_by(|a, b| a.target.cmp(&b.target).then(a.label.cmp(&b.label)));
        }
        self.index = nodes.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        self.nodes = nodes;
        self.out = out;
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> &NodeRef {
        &self.nodes[i]
    }

    pub fn index_of(&self, n: &NodeRef) -> Option<usize> {
        self.index.get(n).copied()
    }

    pub fn edges(&self, i: usize) -> &[HybridEdge] {
        &self.out[i]
    }

    /// `Pr(target | node, label)`: the edge weight over all same-label
    /// weights out of the node.
    fn leg_probability(&self, i: usize, edge: &HybridEdge) -> f64 {
        let total: f64 = self.out[i].iter().filter(|e| e.label == edge.label).map(|e| e.weight).sum();
        edge.weight / total
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transition {
    #[default]
    Weighted,
    Uniform,
}

impl FromStr for Transition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "weighted" => Ok(Transition::Weighted),
            "uniform" => Ok(Transition::Uniform),
            _ => Err(format!("unknown transition mode `{s}` (expected weighted or uniform)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkConfig {
    pub num_seeds: usize,
    pub walks_per_seed: usize,
    /// Maximum number of edges per walk.
    pub length: usize,
    pub rng_seed: u64,
    pub transition: Transition,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig { num_seeds: 50_000, walks_per_seed: 50, length: 4, rng_seed: 0, transition: Transition::Weighted }
    }
}

/// A concrete walk: `nodes.len() == labels.len() + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Walk {
    pub nodes: Vec<usize>,
    pub labels: Vec<EdgeLabel>,
}

impl Walk {
    pub fn hops(&self) -> usize {
        self.labels.len()
    }

    pub fn metapath(&self, g: &HybridGraph) -> MetaPath {
        MetaPath {
            kinds: self.nodes.iter().map(|&i| g.node(i).kind).collect(),
            labels: self.labels.clone(),
        }
    }
}

/// One walk of at most `length` edges, stopping early at a sink.
pub fn walk_from(g: &HybridGraph, start: usize, length: usize, transition: Transition, rng: &mut impl Rng) -> Walk {
    let mut walk = Walk { nodes: vec![start], labels: Vec::new() };
    let mut at = start;
    for _ in 0..length {
        let edges = g.edges(at);
        if edges.is_empty() {
            break;
        }
        let pick = match transition {
            Transition::Uniform => rng.gen_range(0..edges.len()),
            Transition::Weighted => {
                let total: f64 = edges.iter().map(|e| e.weight).sum();
                let mut x = rng.gen::<f64>() * total;
                let mut chosen = edges.len() - 1;
                for (i, e) in edges.iter().enumerate() {
                    if x < e.weight {
                        chosen = i;
                        break;
                    }
                    x -= e.weight;
                }
                chosen
            }
        };
        let edge = &edges[pick];
        walk.labels.push(edge.label);
        walk.nodes.push(edge.target);
        at = edge.target;
    }
    walk
}

/// Walks from uniformly drawn seeds. Seed `i` draws its start node and all
/// of its walks from a ChaCha8 stream `i` keyed by the master seed, so the
/// output is identical for any thread count. Walks are returned seed by
/// seed.
pub fn random_walks(g: &HybridGraph, config: &WalkConfig) -> Vec<Walk> {
    if g.is_empty() {
        return Vec::new();
    }
    (0..config.num_seeds)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
            rng.set_stream(i as u64);
            let start = rng.gen_range(0..g.len());
            (0..config.walks_per_seed)
                .map(|_| walk_from(g, start, config.length, config.transition, &mut rng))
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Alternating node kinds and edge labels, rendered as `E-Reason-E-Result-E`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MetaPath {
    pub kinds: Vec<NodeKind>,
    pub labels: Vec<EdgeLabel>,
}

impl MetaPath {
    pub fn hops(&self) -> usize {
        self.labels.len()
    }

    /// Conceptualization edges must run E→C and instantiation edges C→E.
    pub fn is_well_formed(&self) -> bool {
        self.kinds.len() == self.labels.len() + 1
            && self.labels.iter().enumerate().all(|(i, l)| match l {
                EdgeLabel::Conceptualization => self.kinds[i] == NodeKind::Event && self.kinds[i + 1] == NodeKind::Concept,
                EdgeLabel::ConceptInstantiation => self.kinds[i] == NodeKind::Concept && self.kinds[i + 1] == NodeKind::Event,
                EdgeLabel::Relation(_) => true,
            })
    }

    fn window(walk: &MetaPath, start: usize, hops: usize) -> MetaPath {
        MetaPath {
            kinds: walk.kinds[start..=start + hops].to_vec(),
            labels: walk.labels[start..start + hops].to_vec(),
        }
    }
}

impl fmt::Display for MetaPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, k) in self.kinds.iter().enumerate() {
            if i > 0 {
                write!(f, "-{}-", self.labels[i - 1])?;
            }
            f.write_str(k.letter())?;
        }
        Ok(())
    }
}

impl Serialize for MetaPath {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for MetaPath {
    type Err = MetaPathError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split('-').collect();
        let mut kinds = Vec::new();
        let mut labels = Vec::new();
        let kind = |p: &str| match p {
            "E" => Ok(NodeKind::Event),
            "C" => Ok(NodeKind::Concept),
            other => Err(MetaPathError(format!("unknown node kind `{other}`"))),
        };
        let mut i = 0;
        kinds.push(kind(parts.first().copied().unwrap_or(""))?);
        i += 1;
        while i < parts.len() {
            // "Co-Occurrence" contains the separator.
            let (label, used) = if parts[i] == "Co" && parts.get(i + 1) == Some(&"Occurrence") {
                ("Co-Occurrence".to_string(), 2)
            } else {
                (parts[i].to_string(), 1)
            };
            i += used;
            labels.push(label.parse()?);
            let Some(k) = parts.get(i) else {
                return Err(MetaPathError(format!("`{s}` ends with an edge")));
            };
            kinds.push(kind(k)?);
            i += 1;
        }
        let path = MetaPath { kinds, labels };
        if !path.is_well_formed() {
            return Err(MetaPathError(format!("`{s}` has a conceptualization edge between the wrong kinds")));
        }
        Ok(path)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetaPathCount {
    pub metapath: MetaPath,
    pub hops: usize,
    pub count: u64,
}

/// Counts every contiguous 2- and 3-edge window. Sorted by count
/// descending, then by rendered string.
pub fn count_metapaths(paths: &[MetaPath]) -> Vec<MetaPathCount> {
    let mut counts: BTreeMap<MetaPath, u64> = BTreeMap::new();
    for p in paths {
        for hops in [2, 3] {
            for start in 0..(p.hops() + 1).saturating_sub(hops) {
                *counts.entry(MetaPath::window(p, start, hops)).or_insert(0) += 1;
            }
        }
    }
    let mut rows: Vec<MetaPathCount> = counts
        .into_iter()
        .map(|(metapath, count)| MetaPathCount { hops: metapath.hops(), metapath, count })
        .collect();
    rows.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.metapath.to_string().cmp(&b.metapath.to_string())));
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathInstance {
    pub nodes: Vec<NodeRef>,
    pub score: f64,
}

/// The `k` best concrete paths following `metapath`, scored by the product
/// of per-leg conditional probabilities. Ties break on the node sequence.
pub fn instantiate(metapath: &MetaPath, g: &HybridGraph, k: usize) -> Vec<PathInstance> {
    let mut found: Vec<(Vec<usize>, f64)> = Vec::new();
    if !metapath.is_well_formed() {
        return Vec::new();
    }
    let mut stack = Vec::new();
    for start in (0..g.len()).filter(|&i| g.node(i).kind == metapath.kinds[0]) {
        stack.push(start);
        extend(metapath, g, &mut stack, 1.0, &mut found);
        stack.pop();
    }
    let mut out: Vec<PathInstance> = found
        .into_iter()
        .map(|(nodes, score)| PathInstance { nodes: nodes.into_iter().map(|i| g.node(i).clone()).collect(), score })
        .collect();
    out.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.nodes.cmp(&b.nodes)));
    out.truncate(k);
    out
}

fn extend(mp: &MetaPath, g: &HybridGraph, stack: &mut Vec<usize>, score: f64, found: &mut Vec<(Vec<usize>, f64)>) {
    let leg = stack.len() - 1;
    if leg == mp.hops() {
        found.push((stack.clone(), score));
        return;
    }
    let at = *stack.last().unwrap();
    for e in g.edges(at) {
        if e.label != mp.labels[leg] || g.node(e.target).kind != mp.kinds[leg + 1] {
            continue;
        }
        let p = g.leg_probability(at, e);
        stack.push(e.target);
        extend(mp, g, stack, score * p, found);
        stack.pop();
    }
}
