mod common;

use std::io::Cursor;

use eventkg::ingest::{
    group_paragraphs, normalize, read_sentences, sentence_to_jsonl, split_clauses, write_conllu, Format, IngestError, ParsedSentence,
};
use eventkg::lexicon::ConnectiveLexicon;
use proptest::prelude::*;

fn sentences(seed: u64, n: usize) -> Vec<ParsedSentence> {
    common::synthetic_corpus(n, seed).into_iter().flat_map(|p| p.sentences).collect()
}

fn read_all(text: &str, format: Format) -> Vec<ParsedSentence> {
    read_sentences(Cursor::new(text.as_bytes()), format).collect::<Result<Vec<_>, _>>().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jsonl_round_trip(seed in any::<u64>()) {
        let original = sentences(seed, 12);
        let text: String = original.iter().map(|s| sentence_to_jsonl(s) + "\n").collect();
        prop_assert_eq!(read_all(&text, Format::ParsedJsonl), original);
    }

    #[test]
    fn conllu_round_trip(seed in any::<u64>()) {
        let original = sentences(seed, 12);
        let mut buf = Vec::new();
        write_conllu(&mut buf, &original).unwrap();
        let back = read_all(std::str::from_utf8(&buf).unwrap(), Format::Conllu);
        prop_assert_eq!(group_paragraphs(back).len(), group_paragraphs(original.clone()).len());
        // CoNLL-U lists edges by dependent.
        let strip = |v: &[ParsedSentence]| {
            v.iter()
                .map(|s| {
                    let mut deps = s.deps.clone();
                    deps.sort_by_key(|d| (d.dep, d.gov));
                    (s.tokens.clone(), deps)
                })
                .collect::<Vec<_>>()
        };
        prop_assert_eq!(strip(&read_all(std::str::from_utf8(&buf).unwrap(), Format::Conllu)), strip(&original));
    }

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>(), url in "(https?://|www\\.)[a-z]{1,8}\\.[a-z]{2,3}") {
        for mut s in sentences(seed, 3) {
            s.tokens[0].surface = url.clone();
            let once = normalize(s);
            prop_assert_eq!(&once.tokens[0].surface, "<URL>");
            prop_assert_eq!(normalize(once.clone()), once);
        }
    }

    #[test]
    fn clauses_partition_tokens(seed in any::<u64>()) {
        let lexicon = ConnectiveLexicon::builtin();
        for s in sentences(seed, 10) {
            let clauses = split_clauses(&s, &lexicon);
            let connective_tokens: Vec<usize> = lexicon.detect(&s).iter().flat_map(|m| m.tokens()).collect();
            let mut owner = vec![0usize; s.tokens.len()];
            for c in &clauses {
                prop_assert!(c.tokens.windows(2).all(|w| w[0] < w[1]));
                for &t in &c.tokens {
                    owner[t] += 1;
                }
            }
            for (t, &n) in owner.iter().enumerate() {
                prop_assert!(n <= 1, "token {} in {} clauses", t, n);
                if n == 0 {
                    prop_assert!(s.tokens[t].is_punct() || connective_tokens.contains(&t), "token `{}` dropped", s.tokens[t].surface);
                }
            }
        }
    }
}

#[test]
fn parsed_reader_reports_line() {
    let good = sentence_to_jsonl(&common::have_a_book());
    let text = format!("{good}\n\n{{\"doc\": 1}}\n");
    let err = read_sentences(Cursor::new(text.into_bytes()), Format::ParsedJsonl)
        .find_map(Result::err)
        .unwrap();
    assert!(matches!(err, IngestError::Malformed { line: 3, .. }), "{err}");
}

#[test]
fn conllu_paragraph_markers() {
    let text = "# newdoc id = d1\n# newpar\n1\tDogs\tdog\tNOUN\tNNS\t_\t2\tnsubj\t_\t_\n2\tbark\tbark\tVERB\tVBP\t_\t0\troot\t_\t_\n\n\
# newpar\n1\tCats\tcat\tNOUN\tNNS\t_\t2\tnsubj\t_\tNER=O\n2\tsleep\tsleep\tVERB\tVBP\t_\t0\troot\t_\t_\n\n";
    let all = read_all(text, Format::Conllu);
    assert_eq!(all.len(), 2);
    assert_eq!(group_paragraphs(all).len(), 2);
}

#[test]
fn format_names() {
    assert_eq!("conllu".parse::<Format>().unwrap(), Format::Conllu);
    assert_eq!("parsed-jsonl".parse::<Format>().unwrap(), Format::ParsedJsonl);
    assert!("xml".parse::<Format>().is_err());
}
