use once_cell::sync::Lazy;
use regex::Regex;

use super::{ParsedSentence, Pos};

pub const URL_TOKEN: &str = "<URL>";

static URL: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"(?i)^(?:[a-z][a-z0-9+.\-]*://\S+|www\.\S+)$").unwrap());

/// A token surface counts as a URL when it is `scheme://...` or `www....`.
pub fn is_url(surface: &str) -> bool {
    URL.is_match(surface)
}

/// Replaces every URL token with the `<URL>` placeholder (pos `other`).
pub fn normalize(mut sentence: ParsedSentence) -> ParsedSentence {
    for tok in &mut sentence.tokens {
        if is_url(&tok.surface) {
            tok.surface = URL_TOKEN.to_string();
            tok.lemma = URL_TOKEN.to_string();
            tok.tag = "URL".to_string();
            tok.pos = Pos::Other;
        }
    }
    sentence
}
