//! One JSON object per sentence.

use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::{DepEdge, IngestError, Ner, ParsedSentence, Token};

#[derive(Serialize, Deserialize)]
struct RawToken {
    i: usize,
    w: String,
    l: String,
    p: String,
    #[serde(default)]
    n: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct RawSentence {
    doc: String,
    para: usize,
    sent: usize,
    tokens: Vec<RawToken>,
    #[serde(default)]
    deps: Vec<(i64, String, i64)>,
}

pub struct JsonlReader<R> {
    inner: R,
    line: usize,
    buf: String,
}

impl<R: BufRead> JsonlReader<R> {
    pub fn new(inner: R) -> Self {
        JsonlReader { inner, line: 0, buf: String::new() }
    }
}

impl<R: BufRead> Iterator for JsonlReader<R> {
    type Item = Result<ParsedSentence, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            self.line += 1;
            match self.inner.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => return Some(Err(IngestError::malformed(self.line, e.to_string()))),
            }
            if self.buf.trim().is_empty() {
                continue;
            }
            return Some(parse_line(self.buf.trim(), self.line));
        }
    }
}

fn parse_line(text: &str, line: usize) -> Result<ParsedSentence, IngestError> {
    let raw: RawSentence =
        serde_json::from_str(text).map_err(|e| IngestError::malformed(line, e.to_string()))?;
    let tokens = raw
        .tokens
        .iter()
        .map(|t| Token::new(t.i, &t.w, &t.l, &t.p, t.n.as_deref().and_then(Ner::parse_label)))
        .collect::<Vec<_>>();
    let n = tokens.len() as i64;
    let mut deps = Vec::with_capacity(raw.deps.len());
    for (g, label, d) in raw.deps {
        if g < 0 {
            continue;
        }
        if d < 0 || g >= n || d >= n {
            return Err(IngestError::malformed(
                line,
                format!("dependency ({g}, {label}, {d}) references a token outside 0..{n}"),
            ));
        }
        deps.push(DepEdge { gov: g as usize, label, dep: d as usize });
    }
    let sentence = ParsedSentence { doc: raw.doc, para: raw.para, sent: raw.sent, tokens, deps };
    sentence.validate().map_err(|r| IngestError::malformed(line, r))?;
    Ok(sentence)
}

/// Serializes a sentence back to its single-line form.
pub fn sentence_to_jsonl(s: &ParsedSentence) -> String {
    let raw = RawSentence {
        doc: s.doc.clone(),
        para: s.para,
        sent: s.sent,
        tokens: s
            .tokens
            .iter()
            .map(|t| RawToken {
                i: t.index,
                w: t.surface.clone(),
                l: t.lemma.clone(),
                p: t.tag.clone(),
                n: Some(Ner::label_or_none(t.ner).to_string()),
            })
            .collect(),
        deps: s.deps.iter().map(|d| (d.gov as i64, d.label.clone(), d.dep as i64)).collect(),
    };
    serde_json::to_string(&raw).expect("sentence serializes")
}
