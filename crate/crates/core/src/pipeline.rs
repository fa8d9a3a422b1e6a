//! End-to-end build and conceptualization runs driven by one config.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::concept::{conceptualize, ConceptConfig, IsaError, IsaTable};
use crate::discourse::sentence_relations;
use crate::extract::{extract_all, Eventuality};
use crate::ingest::{load_documents, normalize, split_clauses, Format, IngestError, Paragraph, ParsedSentence};
use crate::lexicon::{ConnectiveLexicon, LexiconError};
use crate::pattern::PatternTable;
use crate::store::{load_sqlite, save_sqlite, BuildSummary, GraphBuilder, KnowledgeGraph, Stats, StoreError};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Isa(#[from] IsaError),
    #[error("{doc} paragraph {para} sentence {sent}: {reason}")]
    Sentence { doc: String, para: usize, sent: usize, reason: String },
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub inputs: Vec<PathBuf>,
    pub format: Format,
    /// SQLite store written by `build` and read by later stages.
    pub store: PathBuf,
    /// Keep only the core graph after building.
    pub core: bool,
    /// Core graph: minimum eventuality frequency.
    pub min_event_freq: f64,
    /// Core graph: relations whose summed weight is at most this are dropped.
    pub relation_threshold: f64,
    /// Minimum frequency for an eventuality to be conceptualized.
    pub concept_gate: f64,
    /// Connective lexicon TSV; the built-in table when absent.
    pub lexicon: Option<PathBuf>,
    pub isa: Option<PathBuf>,
    /// Worker threads; all available cores when absent.
    pub workers: Option<usize>,
    pub rng_seed: u64,
    pub beam: usize,
    pub min_concept_prob: f64,
    pub cross_layer_edges: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            inputs: Vec::new(),
            format: Format::ParsedJsonl,
            store: PathBuf::from("eventkg.db"),
            core: false,
            min_event_freq: 2.0,
            relation_threshold: 1.0,
            concept_gate: 5.0,
            lexicon: None,
            isa: None,
            workers: None,
            rng_seed: 0,
            beam: 100,
            min_concept_prob: 0.0,
            cross_layer_edges: true,
        }
    }
}

fn require_file(what: &str, p: &Path) -> Result<(), PipelineError> {
    if p.is_file() {
        Ok(())
    } else {
        Err(PipelineError::Config(format!("{what} `{}` is not a readable file", p.display())))
    }
}

impl PipelineConfig {
    fn check_common(&self) -> Result<(), PipelineError> {
        for (name, v) in [
            ("min_event_freq", self.min_event_freq),
            ("relation_threshold", self.relation_threshold),
            ("concept_gate", self.concept_gate),
            ("min_concept_prob", self.min_concept_prob),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(PipelineError::Config(format!("{name} must be a finite number ≥ 0, got {v}")));
            }
        }
        if self.workers == Some(0) {
            return Err(PipelineError::Config("workers must be positive".into()));
        }
        if self.beam == 0 {
            return Err(PipelineError::Config("beam must be positive".into()));
        }
        Ok(())
    }

    /// Checks everything `build` reads before any work starts.
    pub fn validate_build(&self) -> Result<(), PipelineError> {
        self.check_common()?;
        for p in &self.inputs {
            require_file("input", p)?;
        }
        if let Some(p) = &self.lexicon {
            require_file("lexicon", p)?;
        }
        Ok(())
    }

    pub fn validate_conceptualize(&self) -> Result<(), PipelineError> {
        self.check_common()?;
        match &self.isa {
            Some(p) => require_file("IsA table", p),
            None => Err(PipelineError::Config("conceptualization needs an IsA table (`isa`)".into())),
        }
    }

    pub fn concept_config(&self) -> ConceptConfig {
        ConceptConfig { beam: self.beam, min_prob: self.min_concept_prob, cross_layer_edges: self.cross_layer_edges }
    }

    pub fn lexicon(&self) -> Result<ConnectiveLexicon, PipelineError> {
        Ok(match &self.lexicon {
            Some(p) => ConnectiveLexicon::load(p)?,
            None => ConnectiveLexicon::builtin(),
        })
    }

    pub fn pool(&self) -> Result<rayon::ThreadPool, PipelineError> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.workers {
            b = b.num_threads(n);
        }
        Ok(b.build()?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuildReport {
    pub paragraphs: usize,
    pub sentences: usize,
    pub aggregation: BuildSummary,
    pub stats: Stats,
}

/// Extraction for one paragraph. Discourse arguments may reach into the
/// previous sentence, never further, so paragraphs are independent.
pub fn process_paragraph(
    paragraph: &Paragraph,
    lexicon: &ConnectiveLexicon,
    table: &PatternTable,
) -> Result<GraphBuilder, PipelineError> {
    let mut builder = GraphBuilder::new();
    let mut previous: Option<(ParsedSentence, Vec<Eventuality>)> = None;
    for s in &paragraph.sentences {
        s.validate().map_err(|reason| PipelineError::Sentence {
            doc: s.doc.clone(),
            para: s.para,
            sent: s.sent,
            reason,
        })?;
        let s = normalize(s.clone());
        let clauses = split_clauses(&s, lexicon);
        let events = extract_all(&s, &clauses, table);
        let relations = sentence_relations(&s, &events, previous.as_ref().map(|(p, e)| (p, e.as_slice())), lexicon);
        builder.extend(&events, &relations)?;
        previous = Some((s, events));
    }
    Ok(builder)
}

/// Builds a graph from parsed paragraphs. Each paragraph is processed on
/// the pool and the partial aggregates are merged in input order; merging
/// is order-insensitive, so the result does not depend on the worker count.
pub fn build_graph(
    paragraphs: &[Paragraph],
    config: &PipelineConfig,
) -> Result<(KnowledgeGraph, BuildReport), PipelineError> {
    config.check_common()?;
    let lexicon = config.lexicon()?;
    let table = PatternTable::builtin();
    let pool = config.pool()?;
    let parts: Vec<GraphBuilder> = pool.install(|| {
        paragraphs
            .par_iter()
            .map(|p| process_paragraph(p, &lexicon, &table))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let mut builder = GraphBuilder::new();
    for part in parts {
        builder.merge(part)?;
    }
    let aggregation = builder.summary();
    let mut graph = builder.finish()?;
    if config.core {
        graph = graph.filter_core(config.min_event_freq, config.relation_threshold);
    }
    log::info!(
        "built {} eventualities and {} relations from {} paragraphs",
        graph.event_count(),
        graph.relation_count(),
        paragraphs.len()
    );
    let report = BuildReport {
        paragraphs: paragraphs.len(),
        sentences: paragraphs.iter().map(|p| p.sentences.len()).sum(),
        aggregation,
        stats: graph.stats(),
    };
    Ok((graph, report))
}

/// Reads every input and builds the graph.
pub fn build_from_inputs(config: &PipelineConfig) -> Result<(KnowledgeGraph, BuildReport), PipelineError> {
    config.validate_build()?;
    let mut paragraphs = Vec::new();
    for p in &config.inputs {
        paragraphs.extend(load_documents(p, config.format)?);
    }
    build_graph(&paragraphs, config)
}

/// `build`: inputs to the configured store.
pub fn run_build(config: &PipelineConfig) -> Result<BuildReport, PipelineError> {
    let (graph, report) = build_from_inputs(config)?;
    save_sqlite(&graph, &config.store)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConceptReport {
    pub conceptualized_eventualities: usize,
    pub concepts: usize,
    pub concept_relations: usize,
    pub stats: Stats,
}

/// Replaces any existing concept layer of `graph` with a fresh one built
/// from eventualities at or above the gate.
pub fn conceptualize_graph(
    graph: &KnowledgeGraph,
    isa: &IsaTable,
    config: &PipelineConfig,
) -> Result<(KnowledgeGraph, ConceptReport), PipelineError> {
    config.check_common()?;
    let view = graph.conceptualization_view(config.concept_gate);
    let layer = config.pool()?.install(|| conceptualize(&view, isa, &config.concept_config()));
    let mut out = graph.without_concepts();
    layer.apply_to(&mut out);
    let report = ConceptReport {
        conceptualized_eventualities: view.event_count(),
        concepts: layer.concepts.len(),
        concept_relations: layer.relations.len(),
        stats: out.stats(),
    };
    Ok((out, report))
}

/// `conceptualize`: adds the concept layer to the configured store in place.
pub fn run_conceptualize(config: &PipelineConfig) -> Result<ConceptReport, PipelineError> {
    config.validate_conceptualize()?;
    let isa = IsaTable::load(config.isa.as_deref().expect("validated"))?;
    let graph = load_sqlite(&config.store)?;
    let (graph, report) = conceptualize_graph(&graph, &isa, config)?;
    save_sqlite(&graph, &config.store)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_corpus() {
        let (g, report) = build_graph(&[], &PipelineConfig::default()).unwrap();
        assert_eq!(g.event_count(), 0);
        assert_eq!(report.sentences, 0);
        assert!(report.stats.patterns.iter().all(|r| r.eventualities == 0));
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = PipelineConfig { concept_gate: -1.0, ..PipelineConfig::default() };
        assert!(matches!(cfg.validate_build(), Err(PipelineError::Config(_))));
        let cfg = PipelineConfig { inputs: vec!["/nonexistent/x.jsonl".into()], ..PipelineConfig::default() };
        assert!(matches!(cfg.validate_build(), Err(PipelineError::Config(_))));
        assert!(matches!(PipelineConfig::default().validate_conceptualize(), Err(PipelineError::Config(_))));
    }

    #[test]
    fn config_from_json_defaults() {
        let cfg: PipelineConfig = serde_json::from_str(r#"{"format":"conllu","workers":2}"#).unwrap();
        assert_eq!(cfg.format, Format::Conllu);
        assert_eq!(cfg.concept_gate, 5.0);
        assert!(serde_json::from_str::<PipelineConfig>(r#"{"bogus":1}"#).is_err());
    }
}
