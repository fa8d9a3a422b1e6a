//! Hypernym table: term -> ranked (concept, probability).

use std::collections::HashMap;
use std::path::Path;

/// Hypernyms kept per term.
pub const TOP_K: usize = 5;

#[derive(Debug, thiserror::Error)]
pub enum IsaError {
    #[error("IsA table line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("cannot read IsA table {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hypernym {
    pub concept: String,
    pub probability: f64,
}

#[derive(Debug, Clone, Default)]
pub struct IsaTable {
    entries: HashMap<String, Vec<Hypernym>>,
}

impl IsaTable {
    pub fn load(path: &Path) -> Result<IsaTable, IsaError> {
        let text = std::fs::read_to_string(path).map_err(|source| IsaError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Rows are `child<TAB>concept<TAB>value`. If any value exceeds 1 the
    /// whole file is read as raw counts and normalized per child; otherwise
    /// values are probabilities in (0, 1].
    pub fn parse(text: &str) -> Result<IsaTable, IsaError> {
        let mut raw: HashMap<String, Vec<(String, f64)>> = HashMap::new();
        let mut counts = false;
        for (n, row) in text.lines().enumerate() {
            let line = n + 1;
            if row.trim().is_empty() || row.starts_with('#') {
                continue;
            }
            let err = |reason: String| IsaError::Parse { line, reason };
            let cols: Vec<&str> = row.split('\t').collect();
            if cols.len() != 3 {
                return Err(err(format!("expected 3 columns, found {}", cols.len())));
            }
            let value: f64 = cols[2].trim().parse().map_err(|_| err(format!("bad value `{}`", cols[2])))?;
            if !(value.is_finite() && value > 0.0) {
                return Err(err(format!("value must be positive, got {value}")));
            }
            counts |= value > 1.0;
            let child = normalize_term(cols[0]);
            let concept = cols[1].trim().to_string();
            if child.is_empty() || concept.is_empty() {
                return Err(err("empty term".into()));
            }
            raw.entry(child).or_default().push((concept, value));
        }
        let entries = raw
            .into_iter()
            .map(|(child, mut list)| {
                if counts {
                    let total: f64 = list.iter().map(|(_, v)| v).sum();
                    for (_, v) in &mut list {
                        *v /= total;
                    }
                }
                list.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
                list.dedup_by(|a, b| a.0 == b.0);
                list.truncate(TOP_K);
                let hypernyms = list.into_iter().map(|(concept, probability)| Hypernym { concept, probability }).collect();
                (child, hypernyms)
            })
            .collect();
        Ok(IsaTable { entries })
    }

    pub fn lookup(&self, term: &str) -> &[Hypernym] {
        self.entries.get(&normalize_term(term)).map_or(&[], Vec::as_slice)
    }

    pub fn contains(&self, term: &str) -> bool {
        self.entries.contains_key(&normalize_term(term))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn normalize_term(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}
