//! Discourse connective lexicon.

use std::collections::HashMap;
use std::path::Path;

use crate::ingest::ParsedSentence;
use crate::relation::RelationType;

const DEFAULT_TSV: &str = include_str!("../data/connectives.tsv");

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("connective lexicon line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("cannot read connective lexicon {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown connective `{0}`")]
pub struct UnknownConnective(pub String);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sense {
    pub relation: RelationType,
    pub rank: u32,
}

/// A connective found in a sentence. `start..end` is a token range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectiveMatch {
    pub start: usize,
    pub end: usize,
    pub phrase: String,
    pub relation: RelationType,
}

impl ConnectiveMatch {
    pub fn tokens(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }
}

#[derive(Debug, Clone)]
pub struct ConnectiveLexicon {
    entries: HashMap<Vec<String>, Vec<Sense>>,
    max_len: usize,
}

impl ConnectiveLexicon {
    /// The shipped lexicon.
    pub fn builtin() -> ConnectiveLexicon {
        Self::parse(DEFAULT_TSV).expect("builtin lexicon parses")
    }

    pub fn load(path: &Path) -> Result<ConnectiveLexicon, LexiconError> {
        let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Parses `phrase<TAB>relation<TAB>rank` rows; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<ConnectiveLexicon, LexiconError> {
        let mut entries: HashMap<Vec<String>, Vec<Sense>> = HashMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let err = |reason: String| LexiconError::Parse { line, reason };
            let cols: Vec<&str> = raw.split('\t').collect();
            if cols.len() != 3 {
                return Err(err(format!("expected 3 columns, found {}", cols.len())));
            }
            let words: Vec<String> = cols[0].split_whitespace().map(str::to_lowercase).collect();
            if words.is_empty() {
                return Err(err("empty phrase".into()));
            }
            let relation: RelationType = cols[1].trim().parse().map_err(|e| err(format!("{e}")))?;
            if !relation.is_discourse() {
                return Err(err("Co-Occurrence is not a connective sense".into()));
            }
            let rank: u32 = cols[2]
                .trim()
                .parse()
                .map_err(|_| err(format!("bad rank `{}`", cols[2])))?;
            entries.entry(words).or_default().push(Sense { relation, rank });
        }
        for senses in entries.values_mut() {
            senses.sort_by_key(|s| (s.rank, s.relation));
        }
        let max_len = entries.keys().map(Vec::len).max().unwrap_or(0);
        Ok(ConnectiveLexicon { entries, max_len })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn senses(&self, phrase: &str) -> Option<&[Sense]> {
        let key: Vec<String> = phrase.split_whitespace().map(str::to_lowercase).collect();
        self.entries.get(&key).map(Vec::as_slice)
    }

    /// Default (lowest-rank) sense of a phrase.
    pub fn classify(&self, phrase: &str) -> Result<RelationType, UnknownConnective> {
        self.senses(phrase)
            .and_then(|s| s.first())
            .map(|s| s.relation)
            .ok_or_else(|| UnknownConnective(phrase.to_string()))
    }

    /// Left-to-right scan over lowercased lemmas taking the longest phrase
    /// at each position; matches never overlap.
    pub fn detect(&self, sentence: &ParsedSentence) -> Vec<ConnectiveMatch> {
        let keys: Vec<String> = sentence.tokens.iter().map(|t| t.key()).collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < keys.len() {
            let longest = (1..=self.max_len.min(keys.len() - i))
                .rev()
                .find_map(|len| self.entries.get(&keys[i..i + len]).map(|s| (len, s)));
            match longest {
                Some((len, senses)) => {
                    out.push(ConnectiveMatch {
                        start: i,
                        end: i + len,
                        phrase: keys[i..i + len].join(" "),
                        relation: senses[0].relation,
                    });
                    i += len;
                }
                None => i += 1,
            }
        }
        out
    }
}
