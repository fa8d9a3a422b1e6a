//! Single-file SQLite persistence mirroring the three tables.

use std::path::{Path, PathBuf};

use rusqlite::{params, Connection};

use super::{io_err, ConceptRecord, EventualityRecord, KnowledgeGraph, NodeKind, NodeRef, RelationRecord, StoreError};
use crate::relation::RelationType;

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("field serializes")
}

fn unjson<T: for<'de> serde::Deserialize<'de>>(s: &str, col: usize) -> rusqlite::Result<T> {
    serde_json::from_str(s).map_err(|e| rusqlite::Error::FromSqlConversionFailure(col, rusqlite::types::Type::Text, Box::new(e)))
}

fn temp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".partial");
    path.with_file_name(name)
}

/// Writes the graph to `path`. The file is built under a temporary name
/// and renamed into place, so readers never observe a partial store.
pub fn save_sqlite(graph: &KnowledgeGraph, path: &Path) -> Result<(), StoreError> {
    let tmp = temp_path(path);
    if tmp.exists() {
        std::fs::remove_file(&tmp).map_err(io_err(&tmp))?;
    }
    {
        let mut conn = Connection::open(&tmp)?;
        let columns: Vec<String> = RelationType::ALL.iter().map(|t| format!("{} REAL NOT NULL DEFAULT 0", t.column())).collect();
        conn.execute_batch(&format!(
            "CREATE TABLE eventualities (
                eid TEXT PRIMARY KEY, pattern TEXT NOT NULL, verbs TEXT NOT NULL,
                skeleton TEXT NOT NULL, words TEXT NOT NULL, pos TEXT NOT NULL,
                edges TEXT NOT NULL, text TEXT NOT NULL, frequency REAL NOT NULL);
             CREATE TABLE concepts (
                cid TEXT PRIMARY KEY, pattern TEXT NOT NULL, words TEXT NOT NULL,
                weight REAL NOT NULL, instances TEXT NOT NULL);
             CREATE TABLE relations (
                rid TEXT PRIMARY KEY, head TEXT NOT NULL, head_kind TEXT NOT NULL,
                tail TEXT NOT NULL, tail_kind TEXT NOT NULL, layer TEXT NOT NULL, {});",
            columns.join(", ")
        ))?;
        let tx = conn.transaction()?;
        {
            let mut st = tx.prepare("INSERT INTO eventualities VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9)")?;
            for e in graph.events() {
                let pos: Vec<&str> = e.words.iter().map(|w| w.pos.name()).collect();
                st.execute(params![
                    e.eid,
                    e.pattern,
                    json(&e.verbs),
                    json(&e.skeleton),
                    json(&e.words),
                    pos.join(" "),
                    json(&e.edges),
                    e.text,
                    e.frequency
                ])?;
            }
            let mut st = tx.prepare("INSERT INTO concepts VALUES (?1, ?2, ?3, ?4, ?5)")?;
            for c in graph.concepts() {
                st.execute(params![c.cid, c.pattern, json(&c.words), c.weight, json(&c.instances)])?;
            }
            let placeholders: Vec<String> = (7..7 + RelationType::ALL.len()).map(|i| format!("?{i}")).collect();
            let mut st = tx.prepare(&format!(
                "INSERT INTO relations VALUES (?1, ?2, ?3, ?4, ?5, ?6, {})",
                placeholders.join(", ")
            ))?;
            for r in graph.relations() {
                let mut values: Vec<Box<dyn rusqlite::ToSql>> = vec![
                    Box::new(r.rid.clone()),
                    Box::new(r.head.id.clone()),
                    Box::new(r.head.kind.name()),
                    Box::new(r.tail.id.clone()),
                    Box::new(r.tail.kind.name()),
                    Box::new(r.layer().name()),
                ];
                values.extend(RelationType::ALL.iter().map(|&t| Box::new(r.weight(t)) as Box<dyn rusqlite::ToSql>));
                st.execute(rusqlite::params_from_iter(values.iter()))?;
            }
        }
        tx.commit()?;
    }
    std::fs::rename(&tmp, path).map_err(io_err(path))
}

pub fn load_sqlite(path: &Path) -> Result<KnowledgeGraph, StoreError> {
    if !path.exists() {
        return Err(StoreError::Io {
            path: path.display().to_string(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "store does not exist"),
        });
    }
    let conn = Connection::open_with_flags(path, rusqlite::OpenFlags::SQLITE_OPEN_READ_ONLY)?;
    let mut g = KnowledgeGraph::new();
    let mut st = conn.prepare("SELECT eid, pattern, verbs, skeleton, words, edges, text, frequency FROM eventualities ORDER BY eid")?;
    let rows = st.query_map([], |row| {
        Ok(EventualityRecord {
            eid: row.get(0)?,
            pattern: row.get(1)?,
            verbs: unjson(&row.get::<_, String>(2)?, 2)?,
            skeleton: unjson(&row.get::<_, String>(3)?, 3)?,
            words: unjson(&row.get::<_, String>(4)?, 4)?,
            edges: unjson(&row.get::<_, String>(5)?, 5)?,
            text: row.get(6)?,
            frequency: row.get(7)?,
        })
    })?;
    for r in rows {
        g.insert_event(r?);
    }
    let mut st = conn.prepare("SELECT cid, pattern, words, weight, instances FROM concepts ORDER BY cid")?;
    let rows = st.query_map([], |row| {
        Ok(ConceptRecord {
            cid: row.get(0)?,
            pattern: row.get(1)?,
            words: unjson(&row.get::<_, String>(2)?, 2)?,
            weight: row.get(3)?,
            instances: unjson(&row.get::<_, String>(4)?, 4)?,
        })
    })?;
    for r in rows {
        g.insert_concept(r?);
    }
    let cols: Vec<&str> = RelationType::ALL.iter().map(|t| t.column()).collect();
    let mut st = conn.prepare(&format!(
        "SELECT head, head_kind, tail, tail_kind, {} FROM relations ORDER BY rid",
        cols.join(", ")
    ))?;
    let kind = |s: String, col: usize| {
        NodeKind::parse(&s).ok_or_else(|| {
            rusqlite::Error::FromSqlConversionFailure(col, rusqlite::types::Type::Text, format!("bad node kind `{s}`").into())
        })
    };
    let rows = st.query_map([], |row| {
        let mut rec = RelationRecord::new(
            NodeRef { kind: kind(row.get(1)?, 1)?, id: row.get(0)? },
            NodeRef { kind: kind(row.get(3)?, 3)?, id: row.get(2)? },
        );
        for (i, t) in RelationType::ALL.iter().enumerate() {
            let w: f64 = row.get(4 + i)?;
            if w > 0.0 {
                rec.weights.insert(*t, w);
            }
        }
        Ok(rec)
    })?;
    for r in rows {
        g.insert_relation(r?);
    }
    Ok(g)
}
