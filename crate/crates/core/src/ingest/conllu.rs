//! Ten-column CoNLL-U. Paragraph and document boundaries come from the
//! `# newdoc id = ...` and `# newpar` comments; NER from `NER=` in MISC.

use std::io::{BufRead, Write};

use super::{DepEdge, IngestError, Ner, ParsedSentence, Token};

pub struct ConlluReader<R> {
    inner: R,
    line: usize,
    doc: String,
    para: usize,
    next_sent: usize,
    para_used: bool,
    done: bool,
}

impl<R: BufRead> ConlluReader<R> {
    pub fn new(inner: R) -> Self {
        ConlluReader {
            inner,
            line: 0,
            doc: String::new(),
            para: 0,
            next_sent: 0,
            para_used: false,
            done: false,
        }
    }

    fn comment(&mut self, text: &str) {
        let body = text.trim_start_matches('#').trim();
        if let Some(rest) = body.strip_prefix("newdoc") {
            let id = rest.trim_start().strip_prefix("id").map(|r| r.trim_start().trim_start_matches('=').trim());
            self.doc = id.unwrap_or("").to_string();
            self.para = 0;
            self.next_sent = 0;
            self.para_used = false;
        } else if body.starts_with("newpar") && self.para_used {
            self.para += 1;
            self.next_sent = 0;
            self.para_used = false;
        }
    }

    fn read_sentence(&mut self) -> Result<Option<ParsedSentence>, IngestError> {
        let mut rows: Vec<(usize, Vec<String>)> = Vec::new();
        let mut buf = String::new();
        loop {
            buf.clear();
            let n = self
                .inner
                .read_line(&mut buf)
                .map_err(|e| IngestError::malformed(self.line + 1, e.to_string()))?;
            if n == 0 {
                self.done = true;
                break;
            }
            self.line += 1;
            let text = buf.trim_end_matches(['\n', '\r']);
            if text.trim().is_empty() {
                if rows.is_empty() {
                    continue;
                }
                break;
            }
            if text.starts_with('#') {
                if rows.is_empty() {
                    self.comment(text);
                }
                continue;
            }
            let cols: Vec<String> = text.split('\t').map(str::to_string).collect();
            if cols.len() != 10 {
                return Err(IngestError::malformed(
                    self.line,
                    format!("expected 10 tab-separated columns, found {}", cols.len()),
                ));
            }
            if cols[0].contains('-') || cols[0].contains('.') {
                continue;
            }
            rows.push((self.line, cols));
        }
        if rows.is_empty() {
            return Ok(None);
        }
        let first_line = rows[0].0;
        let mut tokens = Vec::with_capacity(rows.len());
        let mut deps = Vec::new();
        for (pos, (line, cols)) in rows.iter().enumerate() {
            let id: usize = cols[0]
                .parse()
                .map_err(|_| IngestError::malformed(*line, format!("bad token id `{}`", cols[0])))?;
            if id != pos + 1 {
                return Err(IngestError::malformed(*line, format!("token id {id} out of sequence")));
            }
            let tag = if cols[4] != "_" { &cols[4] } else { &cols[3] };
            let ner = cols[9]
                .split('|')
                .find_map(|kv| kv.strip_prefix("NER="))
                .and_then(Ner::parse_label);
            tokens.push(Token::new(pos, &cols[1], &cols[2], tag, ner));
            if cols[6] == "_" {
                continue;
            }
            let head: usize = cols[6]
                .parse()
                .map_err(|_| IngestError::malformed(*line, format!("bad head `{}`", cols[6])))?;
            if head == 0 {
                continue;
            }
            if head > rows.len() {
                return Err(IngestError::malformed(
                    *line,
                    format!("head {head} references a token outside 1..={}", rows.len()),
                ));
            }
            deps.push(DepEdge::new(head - 1, &cols[7], pos));
        }
        let sentence = ParsedSentence {
            doc: self.doc.clone(),
            para: self.para,
            sent: self.next_sent,
            tokens,
            deps,
        };
        sentence.validate().map_err(|r| IngestError::malformed(first_line, r))?;
        self.next_sent += 1;
        self.para_used = true;
        Ok(Some(sentence))
    }
}

impl<R: BufRead> Iterator for ConlluReader<R> {
    type Item = Result<ParsedSentence, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.read_sentence() {
            Ok(Some(s)) => Some(Ok(s)),
            Ok(None) => None,
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// Writes sentences as CoNLL-U, emitting `newdoc`/`newpar` comments at
/// boundaries. Tokens without a governor are written as roots.
pub fn write_conllu<W: Write>(out: &mut W, sentences: &[ParsedSentence]) -> std::io::Result<()> {
    let mut prev: Option<(&str, usize)> = None;
    for s in sentences {
        match prev {
            Some((d, _)) if d == s.doc => {}
            _ => writeln!(out, "# newdoc id = {}", s.doc)?,
        }
        if prev != Some((s.doc.as_str(), s.para)) {
            writeln!(out, "# newpar")?;
        }
        prev = Some((s.doc.as_str(), s.para));
        writeln!(out, "# text = {}", s.text())?;
        for t in &s.tokens {
            let (head, label) = match s.governor(t.index) {
                Some(e) => ((e.gov + 1).to_string(), e.label.as_str()),
                None => ("0".to_string(), "root"),
            };
            let misc = t.ner.map_or("_".to_string(), |n| format!("NER={}", n.label()));
            writeln!(
                out,
                "{}\t{}\t{}\t_\t{}\t_\t{}\t{}\t_\t{}",
                t.index + 1,
                t.surface,
                t.lemma,
                t.tag,
                head,
                label,
                misc
            )?;
        }
        writeln!(out)?;
    }
    Ok(())
}
