//! Parsed-corpus ingestion: token and sentence types, the two on-disk
//! readers, URL normalization and clause segmentation.

mod clause;
mod conllu;
mod jsonl;
mod normalize;

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use clause::{split_clauses, Clause};
pub use conllu::{write_conllu, ConlluReader};
pub use jsonl::{sentence_to_jsonl, JsonlReader};
pub use normalize::{is_url, normalize, URL_TOKEN};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("line {line}: malformed record: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("unknown input format `{0}` (expected parsed-jsonl or conllu)")]
    UnknownFormat(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl IngestError {
    pub(crate) fn malformed(line: usize, reason: impl Into<String>) -> Self {
        IngestError::Malformed { line, reason: reason.into() }
    }
}

/// Coarse part-of-speech classes the eventuality patterns are stated over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pos {
    Noun,
    Verb,
    BeVerb,
    Adjective,
    Preposition,
    Pronoun,
    Other,
}

impl Pos {
    pub fn name(self) -> &'static str {
        match self {
            Pos::Noun => "noun",
            Pos::Verb => "verb",
            Pos::BeVerb => "be-verb",
            Pos::Adjective => "adjective",
            Pos::Preposition => "preposition",
            Pos::Pronoun => "pronoun",
            Pos::Other => "other",
        }
    }

    /// Maps a Penn Treebank tag, a UPOS tag, or one of the coarse names to a
    /// coarse class. `be` is the only lemma that yields [`Pos::BeVerb`].
    pub fn from_tag(tag: &str, lemma: &str) -> Pos {
        let is_be = lemma.eq_ignore_ascii_case("be");
        let verbal = |is_be: bool| if is_be { Pos::BeVerb } else { Pos::Verb };
        match tag {
            "noun" => return Pos::Noun,
            "verb" | "be-verb" => return verbal(is_be),
            "adjective" => return Pos::Adjective,
            "preposition" => return Pos::Preposition,
            "pronoun" => return Pos::Pronoun,
            "other" => return Pos::Other,
            // UPOS
            "NOUN" | "PROPN" => return Pos::Noun,
            "VERB" => return verbal(is_be),
            "AUX" => return if is_be { Pos::BeVerb } else { Pos::Other },
            "ADJ" => return Pos::Adjective,
            "ADP" => return Pos::Preposition,
            "PRON" => return Pos::Pronoun,
            _ => {}
        }
        if tag.starts_with("NN") {
            Pos::Noun
        } else if tag.starts_with("VB") {
            verbal(is_be)
        } else if tag.starts_with("JJ") {
            Pos::Adjective
        } else if tag == "IN" || tag == "TO" {
            Pos::Preposition
        } else if tag == "PRP" || tag == "PRP$" {
            Pos::Pronoun
        } else {
            Pos::Other
        }
    }

    pub fn is_nominal(self) -> bool {
        matches!(self, Pos::Noun | Pos::Pronoun)
    }

    pub fn is_verbal(self) -> bool {
        matches!(self, Pos::Verb | Pos::BeVerb)
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The thirteen named-entity types that conceptualize by rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Ner {
    Time,
    Date,
    Duration,
    Money,
    Percent,
    Number,
    Country,
    StateOrProvince,
    City,
    Nationality,
    Person,
    Religion,
    Url,
}

impl Ner {
    pub const ALL: [Ner; 13] = [
        Ner::Time,
        Ner::Date,
        Ner::Duration,
        Ner::Money,
        Ner::Percent,
        Ner::Number,
        Ner::Country,
        Ner::StateOrProvince,
        Ner::City,
        Ner::Nationality,
        Ner::Person,
        Ner::Religion,
        Ner::Url,
    ];

    /// CoreNLP-style label, used on disk.
    pub fn label(self) -> &'static str {
        match self {
            Ner::Time => "TIME",
            Ner::Date => "DATE",
            Ner::Duration => "DURATION",
            Ner::Money => "MONEY",
            Ner::Percent => "PERCENT",
            Ner::Number => "NUMBER",
            Ner::Country => "COUNTRY",
            Ner::StateOrProvince => "STATE_OR_PROVINCE",
            Ner::City => "CITY",
            Ner::Nationality => "NATIONALITY",
            Ner::Person => "PERSON",
            Ner::Religion => "RELIGION",
            Ner::Url => "URL",
        }
    }

    /// Concept token the entity conceptualizes to.
    pub fn concept(self) -> &'static str {
        match self {
            Ner::Time => "Time",
            Ner::Date => "Date",
            Ner::Duration => "Duration",
            Ner::Money => "Money",
            Ner::Percent => "Percent",
            Ner::Number => "Number",
            Ner::Country => "Country",
            Ner::StateOrProvince => "State-or-Province",
            Ner::City => "City",
            Ner::Nationality => "Nationality",
            Ner::Person => "Person",
            Ner::Religion => "Religion",
            Ner::Url => "URL",
        }
    }

    /// Parses a label; anything outside the thirteen types (including `O`,
    /// `none` and CoreNLP's ORGANIZATION/LOCATION/MISC) is `None`.
    pub fn parse_label(s: &str) -> Option<Ner> {
        let key: String = s
            .trim()
            .chars()
            .map(|c| if c == ' ' || c == '-' { '_' } else { c.to_ascii_uppercase() })
            .collect();
        Ner::ALL.into_iter().find(|n| n.label() == key)
    }

    pub fn label_or_none(ner: Option<Ner>) -> &'static str {
        ner.map_or("O", Ner::label)
    }
}

/// One token of a parsed sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub index: usize,
    pub surface: String,
    pub lemma: String,
    /// Tag as it appeared on disk (Penn, UPOS or coarse name).
    pub tag: String,
    pub pos: Pos,
    pub ner: Option<Ner>,
}

impl Token {
    pub fn new(index: usize, surface: &str, lemma: &str, tag: &str, ner: Option<Ner>) -> Token {
        Token {
            index,
            surface: surface.to_string(),
            lemma: lemma.to_string(),
            tag: tag.to_string(),
            pos: Pos::from_tag(tag, lemma),
            ner,
        }
    }

    pub fn is_punct(&self) -> bool {
        !self.surface.is_empty() && self.surface.chars().all(|c| c.is_ascii_punctuation())
            && self.surface != URL_TOKEN
    }

    /// Lowercased lemma, the key for every lexical comparison.
    pub fn key(&self) -> String {
        self.lemma.to_lowercase()
    }
}

/// A labeled dependency `governor --label--> dependent`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DepEdge {
    pub gov: usize,
    pub label: String,
    pub dep: usize,
}

impl DepEdge {
    pub fn new(gov: usize, label: &str, dep: usize) -> DepEdge {
        DepEdge { gov, label: label.to_string(), dep }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedSentence {
    pub doc: String,
    pub para: usize,
    pub sent: usize,
    pub tokens: Vec<Token>,
    pub deps: Vec<DepEdge>,
}

impl ParsedSentence {
    /// Checks the structural invariants: contiguous token indices, in-range
    /// dependency endpoints, no self-loops, at most one governor per token
    /// and no cycles.
    pub fn validate(&self) -> Result<(), String> {
        for (pos, tok) in self.tokens.iter().enumerate() {
            if tok.index != pos {
                return Err(format!("token index {} at position {}", tok.index, pos));
            }
        }
        let n = self.tokens.len();
        let mut head: Vec<Option<usize>> = vec![None; n];
        for d in &self.deps {
            if d.gov >= n || d.dep >= n {
                return Err(format!(
                    "dependency ({}, {}, {}) references a token outside 0..{}",
                    d.gov, d.label, d.dep, n
                ));
            }
            if d.gov == d.dep {
                return Err(format!("self-loop on token {}", d.gov));
            }
            if head[d.dep].replace(d.gov).is_some() {
                return Err(format!("token {} has more than one governor", d.dep));
            }
        }
        for start in 0..n {
            let mut cur = start;
            for _ in 0..=n {
                match head[cur] {
                    Some(g) => cur = g,
                    None => break,
                }
                if cur == start {
                    return Err(format!("dependency cycle through token {start}"));
                }
            }
        }
        Ok(())
    }

    pub fn governor(&self, token: usize) -> Option<&DepEdge> {
        self.deps.iter().find(|d| d.dep == token)
    }

    pub fn children(&self, token: usize) -> impl Iterator<Item = &DepEdge> {
        self.deps.iter().filter(move |d| d.gov == token)
    }

    /// Distance to the root of the token's tree.
    pub fn depth(&self, token: usize) -> usize {
        let mut depth = 0;
        let mut cur = token;
        while let Some(e) = self.governor(cur) {
            cur = e.gov;
            depth += 1;
            if depth > self.tokens.len() {
                break;
            }
        }
        depth
    }

    /// Token indices of the subtree rooted at `root`, sorted.
    pub fn subtree(&self, root: usize) -> Vec<usize> {
        let mut out = vec![root];
        let mut i = 0;
        while i < out.len() {
            let t = out[i];
            out.extend(self.children(t).map(|d| d.dep));
            i += 1;
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn text(&self) -> String {
        self.tokens.iter().map(|t| t.surface.as_str()).collect::<Vec<_>>().join(" ")
    }
}

/// Consecutive sentences sharing a (doc, para) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Paragraph {
    pub doc: String,
    pub para: usize,
    pub sentences: Vec<ParsedSentence>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    #[serde(rename = "parsed-jsonl")]
    ParsedJsonl,
    #[serde(rename = "conllu")]
    Conllu,
}

impl FromStr for Format {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "parsed-jsonl" | "jsonl" => Ok(Format::ParsedJsonl),
            "conllu" | "conll-u" => Ok(Format::Conllu),
            other => Err(IngestError::UnknownFormat(other.to_string())),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::ParsedJsonl => "parsed-jsonl",
            Format::Conllu => "conllu",
        })
    }
}

/// Streams sentences from any reader in the given format.
pub fn read_sentences<'a, R: BufRead + 'a>(
    reader: R,
    format: Format,
) -> Box<dyn Iterator<Item = Result<ParsedSentence, IngestError>> + 'a> {
    match format {
        Format::ParsedJsonl => Box::new(JsonlReader::new(reader)),
        Format::Conllu => Box::new(ConlluReader::new(reader)),
    }
}

/// Loads a whole file and groups it into paragraphs in document order.
pub fn load_documents(path: &Path, format: Format) -> Result<Vec<Paragraph>, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let sentences = read_sentences(BufReader::new(file), format).collect::<Result<Vec<_>, _>>()?;
    Ok(group_paragraphs(sentences))
}

pub fn group_paragraphs(sentences: impl IntoIterator<Item = ParsedSentence>) -> Vec<Paragraph> {
    let mut out: Vec<Paragraph> = Vec::new();
    for s in sentences {
        match out.last_mut() {
            Some(p) if p.doc == s.doc && p.para == s.para => p.sentences.push(s),
            _ => out.push(Paragraph { doc: s.doc.clone(), para: s.para, sentences: vec![s] }),
        }
    }
    out
}
