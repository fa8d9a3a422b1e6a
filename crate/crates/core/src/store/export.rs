//! JSON-lines interchange: one file per table, records in id order.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{io_err, KnowledgeGraph, Layer, NodeKind, NodeRef, RelationRecord, StoreError};
use crate::relation::RelationType;

pub const EVENTUALITIES_FILE: &str = "eventualities.jsonl";
pub const CONCEPTS_FILE: &str = "concepts.jsonl";
pub const RELATIONS_FILE: &str = "relations.jsonl";

#[derive(Serialize, Deserialize)]
struct RelationLine {
    rid: String,
    head: String,
    head_kind: NodeKind,
    tail: String,
    tail_kind: NodeKind,
    layer: Layer,
    weights: BTreeMap<RelationType, f64>,
}

fn write_lines<T: Serialize>(path: &Path, items: impl Iterator<Item = T>) -> Result<(), StoreError> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    for item in items {
        let line = serde_json::to_string(&item).expect("record serializes");
        writeln!(w, "{line}").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn export_jsonl(graph: &KnowledgeGraph, dir: &Path) -> Result<(), StoreError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_lines(&dir.join(EVENTUALITIES_FILE), graph.events())?;
    write_lines(&dir.join(CONCEPTS_FILE), graph.concepts())?;
    write_lines(
        &dir.join(RELATIONS_FILE),
        graph.relations().map(|r| RelationLine {
            rid: r.rid.clone(),
            head: r.head.id.clone(),
            head_kind: r.head.kind,
            tail: r.tail.id.clone(),
            tail_kind: r.tail.kind,
            layer: r.layer(),
            weights: r.weights.clone(),
        }),
    )
}

fn read_lines<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, StoreError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let reader = BufReader::new(File::open(path).map_err(io_err(path))?);
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line).map_err(|e| StoreError::Parse {
            file: path.display().to_string(),
            line: n + 1,
            reason: e.to_string(),
        })?;
        out.push(item);
    }
    Ok(out)
}

/// Reads a directory written by [`export_jsonl`]. Missing files count as
/// empty tables.
pub fn import_jsonl(dir: &Path) -> Result<KnowledgeGraph, StoreError> {
    let mut g = KnowledgeGraph::new();
    for e in read_lines(&dir.join(EVENTUALITIES_FILE))? {
        g.insert_event(e);
    }
    for c in read_lines(&dir.join(CONCEPTS_FILE))? {
        g.insert_concept(c);
    }
    let rel_path = dir.join(RELATIONS_FILE);
    for (n, r) in read_lines::<RelationLine>(&rel_path)?.into_iter().enumerate() {
        let mut rec = RelationRecord::new(
            NodeRef { kind: r.head_kind, id: r.head },
            NodeRef { kind: r.tail_kind, id: r.tail },
        );
        if rec.rid != r.rid {
            return Err(StoreError::Parse {
                file: rel_path.display().to_string(),
                line: n + 1,
                reason: format!("rid {} does not match its endpoints", r.rid),
            });
        }
        rec.weights = r.weights;
        g.insert_relation(rec);
    }
    Ok(g)
}
