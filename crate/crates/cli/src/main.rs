use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use eventkg::hash::looks_like_id;
use eventkg::infer::{InferenceGraph, QueryLayer, Ranking, Scored};
use eventkg::ingest::Format;
use eventkg::metapath::{count_metapaths, instantiate, random_walks, HybridGraph, MetaPath, Transition, WalkConfig};
use eventkg::pipeline::{run_build, run_conceptualize, PipelineConfig};
use eventkg::rules::{expand_facts, mine, MineConfig, Multiplicity};
use eventkg::store::{export_jsonl, import_jsonl, load_sqlite, save_sqlite, KnowledgeGraph, Layer, NodeKind, NodeRef};
use eventkg::RelationType;

/// A bad flag combination; exits with status 2 like parse errors.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

#[derive(Parser)]
#[command(name = "eventkg", version, about = "Build and query weighted eventuality knowledge graphs")]
struct Cli {
    /// TOML file with pipeline settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// SQLite store.
    #[arg(long, global = true)]
    store: Option<PathBuf>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract eventualities and relations from parsed text into the store.
    Build(BuildArgs),
    /// Add the concept layer to the store.
    Conceptualize(ConceptArgs),
    /// Per-pattern and per-relation counts.
    Stats(StatsArgs),
    /// Probabilistic retrieval.
    Query(QueryArgs),
    /// Mine Horn rules over relation facts.
    MineRules(RuleArgs),
    /// Count meta-paths over random walks.
    MineMetapaths(MetapathArgs),
    /// Write the store as JSONL files.
    Export(ExportArgs),
    /// Load JSONL files into the store.
    Import(ImportArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// Parsed input files (repeatable).
    #[arg(long = "input", short)]
    inputs: Vec<PathBuf>,
    /// parsed-jsonl or conllu.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Keep only the core graph.
    #[arg(long)]
    core: bool,
    #[arg(long)]
    min_event_freq: Option<f64>,
    #[arg(long)]
    relation_threshold: Option<f64>,
}

#[derive(Args)]
struct ConceptArgs {
    #[arg(long)]
    isa: Option<PathBuf>,
    #[arg(long)]
    concept_gate: Option<f64>,
    #[arg(long)]
    beam: Option<usize>,
    #[arg(long)]
    min_concept_prob: Option<f64>,
    /// Skip concept-to-event and event-to-concept edges.
    #[arg(long)]
    no_cross_layer: bool,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum QueryKind {
    /// Ranked tails given a head and one or two relation types.
    Tails,
    /// Ranked relation types (or type pairs) between a head and a tail.
    Rels,
    /// Relation type prior of a head.
    Prior,
}

#[derive(Args)]
struct QueryArgs {
    kind: QueryKind,
    /// Head node: id or exact text.
    #[arg(long)]
    head: String,
    /// Tail node: id or exact text.
    #[arg(long)]
    tail: Option<String>,
    /// Comma-separated relation types.
    #[arg(long, value_delimiter = ',')]
    types: Vec<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value = "event")]
    layer: String,
    #[arg(long)]
    no_cooccurrence: bool,
    /// 1 or 2; defaults to the number of types for tails and 1 for rels.
    #[arg(long)]
    hops: Option<usize>,
}

#[derive(Args)]
struct RuleArgs {
    #[arg(long, default_value_t = 0.01)]
    min_hc: f64,
    #[arg(long, default_value_t = 0.1)]
    min_pca: f64,
    #[arg(long, default_value = "event")]
    layer: String,
    /// round, ceil or weight-exact.
    #[arg(long, default_value = "round")]
    multiplicity_mode: String,
    #[arg(long)]
    include_cooccurrence: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MetapathArgs {
    #[arg(long, default_value_t = 50_000)]
    seeds: usize,
    #[arg(long, default_value_t = 50)]
    walks: usize,
    #[arg(long, default_value_t = 4)]
    len: usize,
    #[arg(long)]
    rng_seed: Option<u64>,
    /// weighted or uniform.
    #[arg(long, default_value = "weighted")]
    transition: String,
    #[arg(long)]
    no_cooccurrence: bool,
    /// Print the best instances of this meta-path instead of counting.
    #[arg(long)]
    instantiate: Option<String>,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ImportArgs {
    #[arg(long)]
    dir: PathBuf,
}

fn load_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            toml::from_str(&text).map_err(|e| UsageError(format!("{}: {e}", p.display())))?
        }
        None => PipelineConfig::default(),
    };
    if let Some(s) = &cli.store {
        cfg.store = s.clone();
    }
    if cli.workers.is_some() {
        cfg.workers = cli.workers;
    }
    Ok(cfg)
}

fn parse_flag<T: std::str::FromStr>(flag: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| UsageError(format!("--{flag}: {e}")).into())
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_json(v: &impl Serialize) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn open_store(cfg: &PipelineConfig) -> Result<KnowledgeGraph> {
    load_sqlite(&cfg.store).with_context(|| format!("opening store {}", cfg.store.display()))
}

fn node_text(kg: &KnowledgeGraph, n: &NodeRef) -> String {
    match n.kind {
        NodeKind::Event => kg.event(&n.id).map(|e| e.text.clone()).unwrap_or_default(),
        NodeKind::Concept => kg.concept(&n.id).map(|c| c.text()).unwrap_or_default(),
    }
}

fn resolve(kg: &KnowledgeGraph, key: &str) -> Result<NodeRef> {
    if looks_like_id(key) {
        if let Ok(n) = kg.resolve(key) {
            return Ok(n);
        }
    }
    kg.find_by_text(key).with_context(|| format!("no eventuality or concept matches `{key}`"))
}

fn node_json(kg: &KnowledgeGraph, n: &NodeRef) -> Value {
    json!({ "id": n.id, "kind": n.kind, "text": node_text(kg, n) })
}

fn scored_nodes(kg: &KnowledgeGraph, rows: Vec<Scored<NodeRef>>) -> Value {
    rows.into_iter()
        .map(|s| {
            let mut v = node_json(kg, &s.target);
            v["probability"] = json!(s.probability);
            if !s.witnesses.is_empty() {
                v["via"] = s
                    .witnesses
                    .iter()
                    .map(|w| json!({ "middle": node_json(kg, &w.middle), "probability": w.probability }))
                    .collect();
            }
            v
        })
        .collect()
}

fn scored_types(kg: &KnowledgeGraph, rows: Vec<Scored<Vec<RelationType>>>) -> Value {
    rows.into_iter()
        .map(|s| {
            let mut v = json!({ "relations": s.target, "probability": s.probability });
            if !s.witnesses.is_empty() {
                v["via"] = s
                    .witnesses
                    .iter()
                    .map(|w| json!({ "middle": node_json(kg, &w.middle), "probability": w.probability }))
                    .collect();
            }
            v
        })
        .collect()
}

fn cmd_build(cli: &Cli, a: &BuildArgs) -> Result<()> {
    let mut cfg = load_config(cli)?;
    if !a.inputs.is_empty() {
        cfg.inputs = a.inputs.clone();
    }
    if let Some(f) = &a.format {
        cfg.format = parse_flag::<Format>("format", f)?;
    }
    if a.lexicon.is_some() {
        cfg.lexicon = a.lexicon.clone();
    }
    cfg.core |= a.core;
    if let Some(v) = a.min_event_freq {
        cfg.min_event_freq = v;
    }
    if let Some(v) = a.relation_threshold {
        cfg.relation_threshold = v;
    }
    print_json(&run_build(&cfg)?)
}

fn cmd_conceptualize(cli: &Cli, a: &ConceptArgs) -> Result<()> {
    let mut cfg = load_config(cli)?;
    if a.isa.is_some() {
        cfg.isa = a.isa.clone();
    }
    if let Some(v) = a.concept_gate {
        cfg.concept_gate = v;
    }
    if let Some(v) = a.beam {
        cfg.beam = v;
    }
    if let Some(v) = a.min_concept_prob {
        cfg.min_concept_prob = v;
    }
    if a.no_cross_layer {
        cfg.cross_layer_edges = false;
    }
    print_json(&run_conceptualize(&cfg)?)
}

fn cmd_stats(cli: &Cli, a: &StatsArgs) -> Result<()> {
    let cfg = load_config(cli)?;
    let stats = open_store(&cfg)?.stats();
    if a.json {
        print_json(&stats)
    } else {
        print!("{stats}");
        Ok(())
    }
}

fn relation_types(raw: &[String]) -> Result<Vec<RelationType>> {
    raw.iter().map(|s| parse_flag("types", s.trim())).collect()
}

fn cmd_query(cli: &Cli, a: &QueryArgs) -> Result<()> {
    let cfg = load_config(cli)?;
    let layer: QueryLayer = parse_flag("layer", &a.layer)?;
    let types = relation_types(&a.types)?;
    if let Some(h) = a.hops {
        if !(1..=2).contains(&h) {
            return usage("--hops must be 1 or 2");
        }
    }
    let rank = Ranking { k: a.k, min_prob: 0.0 };
    // Validate the flag combination before touching the store.
    match a.kind {
        QueryKind::Tails => {
            if types.is_empty() || types.len() > 2 {
                return usage("tails needs one or two --types");
            }
            if a.hops.is_some_and(|h| h != types.len()) {
                return usage(format!("--hops {} needs {} relation types", a.hops.unwrap(), a.hops.unwrap()));
            }
            if a.tail.is_some() {
                return usage("tails takes no --tail");
            }
        }
        QueryKind::Rels => {
            let hops = a.hops.unwrap_or(1);
            if a.tail.is_none() {
                return usage("rels needs --tail");
            }
            if types.len() > hops {
                return usage(format!("rels with {hops} hop(s) accepts at most {hops} relation type(s)"));
            }
        }
        QueryKind::Prior => {
            if !types.is_empty() || a.tail.is_some() || a.hops.is_some() {
                return usage("prior takes only --head");
            }
        }
    }
    let kg = open_store(&cfg)?;
    let graph = InferenceGraph::from_kg(&kg, layer, !a.no_cooccurrence);
    let head = resolve(&kg, &a.head)?;
    let result = match a.kind {
        QueryKind::Tails => {
            let rows = if types.len() == 1 {
                graph.tails_1hop(&head, types[0], rank)?
            } else {
                graph.tails_2hop(&head, types[0], types[1], rank)?
            };
            scored_nodes(&kg, rows)
        }
        QueryKind::Rels => {
            let tail = resolve(&kg, a.tail.as_deref().expect("checked"))?;
            let mut rows = if a.hops.unwrap_or(1) == 1 {
                graph.relations_1hop(&head, &tail, Ranking::default())?
            } else {
                graph.relations_2hop(&head, &tail, Ranking::default())?
            };
            if !types.is_empty() {
                rows.retain(|s| s.target.starts_with(&types));
            }
            if let Some(k) = rank.k {
                rows.truncate(k);
            }
            scored_types(&kg, rows)
        }
        QueryKind::Prior => scored_types(&kg, graph.type_prior(&head)?),
    };
    print_json(&json!({ "head": node_json(&kg, &head), "results": result }))
}

fn cmd_mine_rules(cli: &Cli, a: &RuleArgs) -> Result<()> {
    let cfg = load_config(cli)?;
    let layer = match a.layer.as_str() {
        "event" => Layer::Event,
        "concept" => Layer::Concept,
        other => return usage(format!("--layer: unknown layer `{other}` (expected event or concept)")),
    };
    let mode: Multiplicity = parse_flag("multiplicity-mode", &a.multiplicity_mode)?;
    for (flag, v) in [("min-hc", a.min_hc), ("min-pca", a.min_pca)] {
        if !(0.0..=1.0).contains(&v) {
            return usage(format!("--{flag} must lie in [0, 1]"));
        }
    }
    let kg = open_store(&cfg)?;
    let facts = expand_facts(&kg, layer, mode, a.include_cooccurrence);
    let config = MineConfig { min_head_coverage: a.min_hc, min_pca_confidence: a.min_pca, ..MineConfig::default() };
    let rules = mine(&facts, &config);
    log::info!("{} facts, {} rules", facts.len(), rules.len());
    let mut out = output(a.out.as_deref())?;
    for r in &rules {
        serde_json::to_writer(&mut out, r)?;
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_mine_metapaths(cli: &Cli, a: &MetapathArgs) -> Result<()> {
    let cfg = load_config(cli)?;
    let transition: Transition = parse_flag("transition", &a.transition)?;
    if a.seeds == 0 || a.walks == 0 || a.len == 0 {
        return usage("--seeds, --walks and --len must be positive");
    }
    let target = a.instantiate.as_deref().map(|s| parse_flag::<MetaPath>("instantiate", s)).transpose()?;
    let kg = open_store(&cfg)?;
    let graph = HybridGraph::from_kg(&kg, !a.no_cooccurrence);
    let mut out = output(a.out.as_deref())?;
    if let Some(mp) = target {
        for inst in instantiate(&mp, &graph, a.k) {
            let nodes: Vec<Value> = inst.nodes.iter().map(|n| node_json(&kg, n)).collect();
            serde_json::to_writer(&mut out, &json!({ "nodes": nodes, "score": inst.score }))?;
            writeln!(out)?;
        }
    } else {
        let config = WalkConfig {
            num_seeds: a.seeds,
            walks_per_seed: a.walks,
            length: a.len,
            rng_seed: a.rng_seed.unwrap_or(cfg.rng_seed),
            transition,
        };
        let walks = cfg.pool()?.install(|| random_walks(&graph, &config));
        let paths: Vec<MetaPath> = walks.iter().map(|w| w.metapath(&graph)).collect();
        writeln!(out, "metapath\thops\tcount")?;
        for row in count_metapaths(&paths) {
            writeln!(out, "{}\t{}\t{}", row.metapath, row.hops, row.count)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_export(cli: &Cli, a: &ExportArgs) -> Result<()> {
    let cfg = load_config(cli)?;
    let kg = open_store(&cfg)?;
    export_jsonl(&kg, &a.out)?;
    Ok(())
}

fn cmd_import(cli: &Cli, a: &ImportArgs) -> Result<()> {
    let cfg = load_config(cli)?;
    if !a.dir.is_dir() {
        bail!("{} is not a directory", a.dir.display());
    }
    let kg = import_jsonl(&a.dir)?;
    save_sqlite(&kg, &cfg.store)?;
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Build(a) => cmd_build(cli, a),
        Command::Conceptualize(a) => cmd_conceptualize(cli, a),
        Command::Stats(a) => cmd_stats(cli, a),
        Command::Query(a) => cmd_query(cli, a),
        Command::MineRules(a) => cmd_mine_rules(cli, a),
        Command::MineMetapaths(a) => cmd_mine_metapaths(cli, a),
        Command::Export(a) => cmd_export(cli, a),
        Command::Import(a) => cmd_import(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
