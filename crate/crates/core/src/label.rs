//! Dependency label normalization across schemes.

/// Labels whose edges may be absorbed into an eventuality.
pub const OPTIONAL: [&str; 6] = ["advmod", "amod", "nummod", "aux", "compound", "neg"];

/// Labels that neither extend an eventuality nor block a match.
pub const IGNORED: [&str; 7] = ["det", "predet", "punct", "case", "mark", "cc", "poss"];

/// Maps a label onto the names the pattern table is written in. UD
/// names (`obj`, `nsubj:pass`, `aux:pass`, `compound:prt`) fold onto their
/// Stanford counterparts; other subtypes fold onto their base when the
/// base is optional or ignored.
pub fn canonical(label: &str) -> &str {
    match label {
        "obj" => "dobj",
        "nsubj:pass" => "nsubjpass",
        "aux:pass" | "auxpass" => "aux",
        "compound:prt" | "prt" => "compound",
        "nmod:poss" => "poss",
        "det:predet" => "predet",
        _ => match label.split_once(':') {
            Some((base, _)) if OPTIONAL.contains(&base) || IGNORED.contains(&base) => base,
            _ => label,
        },
    }
}

pub fn is_optional(label: &str) -> bool {
    OPTIONAL.contains(&canonical(label))
}

pub fn is_ignored(label: &str) -> bool {
    IGNORED.contains(&canonical(label))
}
