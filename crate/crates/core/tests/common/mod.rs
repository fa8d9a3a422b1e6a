#![allow(dead_code)]

pub mod oracle;

use eventkg::extract::{canonical_string, Word, WordEdge};
use eventkg::hash::digest_id;
use eventkg::ingest::{DepEdge, Paragraph, ParsedSentence, Pos, Token};
use eventkg::store::{EventualityRecord, KnowledgeGraph, NodeRef};
use eventkg::RelationType;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Tokens are `(surface, lemma, tag)`; deps are `(governor, label, dependent)`.
pub fn sentence(doc: &str, para: usize, sent: usize, words: &[(&str, &str, &str)], deps: &[(usize, &str, usize)]) -> ParsedSentence {
    ParsedSentence {
        doc: doc.to_string(),
        para,
        sent,
        tokens: words.iter().enumerate().map(|(i, (w, l, t))| Token::new(i, w, l, t, None)).collect(),
        deps: deps.iter().map(|&(g, l, d)| DepEdge::new(g, l, d)).collect(),
    }
}

fn one(words: &[(&str, &str, &str)], deps: &[(usize, &str, usize)]) -> ParsedSentence {
    sentence("t3", 0, 0, words, deps)
}

/// One dependency fixture per eventuality pattern, keyed by code.
pub fn pattern_examples() -> Vec<(&'static str, ParsedSentence)> {
    vec![
        ("s-v", one(&[("The", "the", "DT"), ("dog", "dog", "NN"), ("barks", "bark", "VBZ")], &[(1, "det", 0), (2, "nsubj", 1)])),
        ("s-v-o", one(&[("I", "i", "PRP"), ("love", "love", "VBP"), ("you", "you", "PRP")], &[(1, "nsubj", 0), (1, "dobj", 2)])),
        ("s-v-a", one(&[("He", "he", "PRP"), ("felt", "feel", "VBD"), ("ill", "ill", "JJ")], &[(1, "nsubj", 0), (1, "xcomp", 2)])),
        (
            "s-v-v",
            one(
                &[("I", "i", "PRP"), ("want", "want", "VBP"), ("to", "to", "TO"), ("go", "go", "VB")],
                &[(1, "nsubj", 0), (1, "xcomp", 3), (3, "mark", 2)],
            ),
        ),
        (
            "s-v-o-o",
            one(
                &[("You", "you", "PRP"), ("give", "give", "VBP"), ("me", "i", "PRP"), ("the", "the", "DT"), ("book", "book", "NN")],
                &[(1, "nsubj", 0), (1, "iobj", 2), (1, "dobj", 4), (4, "det", 3)],
            ),
        ),
        (
            "s-v-v-o",
            one(
                &[("I", "i", "PRP"), ("want", "want", "VBP"), ("to", "to", "TO"), ("eat", "eat", "VB"), ("the", "the", "DT"), ("apple", "apple", "NN")],
                &[(1, "nsubj", 0), (1, "xcomp", 3), (3, "mark", 2), (3, "dobj", 5), (5, "det", 4)],
            ),
        ),
        (
            "s-v-o-v-o",
            one(
                &[("I", "i", "PRP"), ("ask", "ask", "VBP"), ("you", "you", "PRP"), ("to", "to", "TO"), ("help", "help", "VB"), ("us", "we", "PRP")],
                &[(1, "nsubj", 0), (1, "dobj", 2), (1, "xcomp", 4), (4, "mark", 3), (4, "dobj", 5)],
            ),
        ),
        (
            "s-v-o-v-o-o",
            one(
                &[
                    ("president", "president", "NN"),
                    ("urges", "urge", "VBZ"),
                    ("the", "the", "DT"),
                    ("congress", "congress", "NN"),
                    ("to", "to", "TO"),
                    ("make", "make", "VB"),
                    ("her", "she", "PRP"),
                    ("citizen", "citizen", "NN"),
                ],
                &[(1, "nsubj", 0), (1, "dobj", 3), (3, "det", 2), (1, "xcomp", 5), (5, "mark", 4), (5, "iobj", 6), (5, "dobj", 7)],
            ),
        ),
        (
            "s-be-a",
            one(
                &[("The", "the", "DT"), ("dog", "dog", "NN"), ("is", "be", "VBZ"), ("cute", "cute", "JJ")],
                &[(1, "det", 0), (3, "nsubj", 1), (3, "cop", 2)],
            ),
        ),
        (
            "s-be-o",
            one(
                &[("He", "he", "PRP"), ("is", "be", "VBZ"), ("a", "a", "DT"), ("boy", "boy", "NN")],
                &[(3, "nsubj", 0), (3, "cop", 1), (3, "det", 2)],
            ),
        ),
        (
            "s-v-be-o",
            one(
                &[("I", "i", "PRP"), ("want", "want", "VBP"), ("to", "to", "TO"), ("be", "be", "VB"), ("a", "a", "DT"), ("hero", "hero", "NN")],
                &[(1, "nsubj", 0), (1, "xcomp", 5), (5, "mark", 2), (5, "cop", 3), (5, "det", 4)],
            ),
        ),
        (
            "s-v-be-a",
            one(
                &[("I", "i", "PRP"), ("want", "want", "VBP"), ("to", "to", "TO"), ("be", "be", "VB"), ("slim", "slim", "JJ")],
                &[(1, "nsubj", 0), (1, "xcomp", 4), (4, "mark", 2), (4, "cop", 3)],
            ),
        ),
        (
            "s-v-o-be-o",
            one(
                &[("I", "i", "PRP"), ("want", "want", "VBP"), ("her", "she", "PRP"), ("to", "to", "TO"), ("be", "be", "VB"), ("hero", "hero", "NN")],
                &[(1, "nsubj", 0), (1, "iobj", 2), (1, "xcomp", 5), (5, "mark", 3), (5, "cop", 4)],
            ),
        ),
        (
            "s-v-o-be-a",
            one(
                &[("I", "i", "PRP"), ("want", "want", "VBP"), ("her", "she", "PRP"), ("to", "to", "TO"), ("be", "be", "VB"), ("happy", "happy", "JJ")],
                &[(1, "nsubj", 0), (1, "iobj", 2), (1, "xcomp", 5), (5, "mark", 3), (5, "cop", 4)],
            ),
        ),
        (
            "there-be-o",
            one(
                &[("There", "there", "EX"), ("is", "be", "VBZ"), ("an", "a", "DT"), ("apple", "apple", "NN")],
                &[(1, "expl", 0), (1, "nsubj", 3), (3, "det", 2)],
            ),
        ),
        (
            "spass-v",
            one(
                &[("The", "the", "DT"), ("bill", "bill", "NN"), ("is", "be", "VBZ"), ("paid", "pay", "VBN")],
                &[(1, "det", 0), (3, "nsubjpass", 1), (3, "auxpass", 2)],
            ),
        ),
        (
            "spass-v-o",
            one(
                &[("He", "he", "PRP"), ("is", "be", "VBZ"), ("served", "serve", "VBN"), ("water", "water", "NN")],
                &[(2, "nsubjpass", 0), (2, "auxpass", 1), (2, "dobj", 3)],
            ),
        ),
        (
            "spass-v-v-o",
            one(
                &[("He", "he", "PRP"), ("is", "be", "VBZ"), ("asked", "ask", "VBN"), ("to", "to", "TO"), ("help", "help", "VB"), ("us", "we", "PRP")],
                &[(2, "nsubjpass", 0), (2, "auxpass", 1), (2, "xcomp", 4), (4, "mark", 3), (4, "dobj", 5)],
            ),
        ),
    ]
}

pub fn have_a_book() -> ParsedSentence {
    one(
        &[("I", "i", "PRP"), ("have", "have", "VBP"), ("a", "a", "DT"), ("book", "book", "NN")],
        &[(1, "nsubj", 0), (1, "dobj", 3), (3, "det", 2)],
    )
}

/// "My army will find your boat." / "In the meantime, I'm sure we could
/// find you suitable accommodations."
pub fn meantime_pair() -> Vec<ParsedSentence> {
    let first = sentence(
        "meantime",
        0,
        0,
        &[
            ("My", "my", "PRP$"),
            ("army", "army", "NN"),
            ("will", "will", "MD"),
            ("find", "find", "VB"),
            ("your", "your", "PRP$"),
            ("boat", "boat", "NN"),
            (".", ".", "."),
        ],
        &[(1, "poss", 0), (3, "nsubj", 1), (3, "aux", 2), (3, "dobj", 5), (5, "poss", 4), (3, "punct", 6)],
    );
    let second = sentence(
        "meantime",
        0,
        1,
        &[
            ("In", "in", "IN"),
            ("the", "the", "DT"),
            ("meantime", "meantime", "NN"),
            (",", ",", ","),
            ("I", "i", "PRP"),
            ("'m", "be", "VBP"),
            ("sure", "sure", "JJ"),
            ("we", "we", "PRP"),
            ("could", "could", "MD"),
            ("find", "find", "VB"),
            ("you", "you", "PRP"),
            ("suitable", "suitable", "JJ"),
            ("accommodations", "accommodation", "NNS"),
            (".", ".", "."),
        ],
        &[
            (2, "case", 0),
            (2, "det", 1),
            (6, "nmod", 2),
            (6, "punct", 3),
            (6, "nsubj", 4),
            (6, "cop", 5),
            (6, "ccomp", 9),
            (9, "nsubj", 7),
            (9, "aux", 8),
            (9, "iobj", 10),
            (9, "dobj", 12),
            (12, "amod", 11),
            (6, "punct", 13),
        ],
    );
    vec![first, second]
}

pub const MEANTIME_ISA: &str = "army\tInstitution\t0.058\narmy\tOrganization\t0.038\n\
boat\tVehicle\t0.059\nboat\tItem\t0.049\n\
accommodation\tService\t0.056\naccommodation\tFacility\t0.019\n";

pub fn word(lemma: &str, pos: Pos) -> Word {
    Word { lemma: lemma.to_string(), pos, ner: None }
}

pub fn record(pattern: &str, words: Vec<Word>, skeleton: Vec<usize>, edges: Vec<WordEdge>, text: &str, freq: f64) -> EventualityRecord {
    EventualityRecord {
        eid: digest_id(&canonical_string(&words, &edges)),
        pattern: pattern.to_string(),
        verbs: words.iter().filter(|w| w.pos.is_verbal()).map(|w| w.lemma.clone()).collect(),
        skeleton,
        words,
        edges,
        text: text.to_string(),
        frequency: freq,
    }
}

fn svo(subject: &str, verb: &str, object: &[&str], freq: f64) -> EventualityRecord {
    let mut words = vec![word(subject, Pos::Pronoun), word(verb, Pos::Verb)];
    let mut edges = vec![WordEdge { gov: 1, label: "nsubj".into(), dep: 0 }];
    for w in object {
        words.push(word(w, Pos::Noun));
    }
    let head = words.len() - 1;
    edges.push(WordEdge { gov: 1, label: "dobj".into(), dep: head });
    if object.len() == 2 {
        edges.push(WordEdge { gov: head, label: "compound".into(), dep: 2 });
    }
    let skeleton = vec![0, 1, head];
    let text = format!("{subject} {verb} {}", object.join(" "));
    record("s-v-o", words, skeleton, edges, &text, freq)
}

/// Hunger and ordering food: three "X order chicken" eventualities (155 +
/// 5 + 5), "I order pork rib" (136) and "I be hungry" (1389), with Result
/// edges of weight 1 and 0.125 from hunger to two of the chicken orders.
pub fn hungry_graph() -> (KnowledgeGraph, NodeRef, Vec<NodeRef>) {
    let mut kg = KnowledgeGraph::new();
    let chickens = [svo("i", "order", &["chicken"], 155.0), svo("he", "order", &["chicken"], 5.0), svo("she", "order", &["chicken"], 5.0)];
    let rib = svo("i", "order", &["pork", "rib"], 136.0);
    let hungry = record(
        "s-be-a",
        vec![word("i", Pos::Pronoun), word("be", Pos::BeVerb), word("hungry", Pos::Adjective)],
        vec![0, 1, 2],
        vec![WordEdge { gov: 2, label: "nsubj".into(), dep: 0 }, WordEdge { gov: 2, label: "cop".into(), dep: 1 }],
        "I be hungry",
        1389.0,
    );
    let h = NodeRef::event(&hungry.eid);
    let c: Vec<NodeRef> = chickens.iter().map(|e| NodeRef::event(&e.eid)).collect();
    for e in chickens.into_iter().chain([rib, hungry]) {
        kg.insert_event(e);
    }
    kg.add_relation(h.clone(), c[0].clone(), RelationType::Result, 1.0);
    kg.add_relation(h.clone(), c[1].clone(), RelationType::Result, 0.125);
    (kg, h, c)
}

pub const HUNGRY_ISA: &str = "chicken\tMeat\t0.069\npork rib\tMeat\t0.120\n";

const SUBJECTS: [(&str, &str); 6] = [("I", "i"), ("you", "you"), ("he", "he"), ("she", "she"), ("we", "we"), ("they", "they")];
const VERBS: [(&str, &str); 5] = [("ate", "eat"), ("saw", "see"), ("bought", "buy"), ("found", "find"), ("loved", "love")];
const NOUNS: [&str; 7] = ["apple", "book", "dog", "boat", "car", "house", "story"];
const ADJECTIVES: [&str; 4] = ["hungry", "tired", "happy", "sure"];

struct Draft {
    words: Vec<(String, String, String)>,
    deps: Vec<(usize, String, usize)>,
}

impl Draft {
    fn push(&mut self, w: &str, l: &str, t: &str) -> usize {
        self.words.push((w.into(), l.into(), t.into()));
        self.words.len() - 1
    }

    fn dep(&mut self, g: usize, l: &str, d: usize) {
        self.deps.push((g, l.into(), d));
    }

    /// A random clause; returns its head token.
    fn clause(&mut self, rng: &mut ChaCha8Rng) -> usize {
        let (sw, sl) = *SUBJECTS.choose(rng).unwrap();
        let s = self.push(sw, sl, "PRP");
        if rng.gen_bool(0.3) {
            let be = self.push(if sl == "i" { "am" } else { "is" }, "be", "VBP");
            let adj = *ADJECTIVES.choose(rng).unwrap();
            let a = self.push(adj, adj, "JJ");
            self.dep(a, "nsubj", s);
            self.dep(a, "cop", be);
            return a;
        }
        let (vw, vl) = *VERBS.choose(rng).unwrap();
        let v = self.push(vw, vl, "VBD");
        self.dep(v, "nsubj", s);
        let det = self.push("the", "the", "DT");
        let noun = *NOUNS.choose(rng).unwrap();
        let o = self.push(noun, noun, "NN");
        self.dep(o, "det", det);
        self.dep(v, "dobj", o);
        v
    }
}

fn random_sentence(doc: &str, para: usize, sent: usize, rng: &mut ChaCha8Rng) -> ParsedSentence {
    let mut d = Draft { words: Vec::new(), deps: Vec::new() };
    let root = match rng.gen_range(0..5) {
        0 => {
            let then = d.push("Then", "then", "RB");
            let v = d.clause(rng);
            d.dep(v, "advmod", then);
            v
        }
        1 => {
            let a = d.clause(rng);
            let because = d.push("because", "because", "IN");
            let b = d.clause(rng);
            d.dep(b, "mark", because);
            d.dep(a, "advcl", b);
            a
        }
        2 => {
            let a = d.clause(rng);
            let comma = d.push(",", ",", ",");
            let but = d.push("but", "but", "CC");
            let b = d.clause(rng);
            d.dep(a, "punct", comma);
            d.dep(b, "cc", but);
            d.dep(a, "conj", b);
            a
        }
        _ => d.clause(rng),
    };
    let stop = d.push(".", ".", ".");
    d.dep(root, "punct", stop);
    let words: Vec<(&str, &str, &str)> = d.words.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
    let deps: Vec<(usize, &str, usize)> = d.deps.iter().map(|(g, l, x)| (*g, l.as_str(), *x)).collect();
    sentence(doc, para, sent, &words, &deps)
}

/// `n` random sentences in paragraphs of one to five sentences.
pub fn synthetic_corpus(n: usize, seed: u64) -> Vec<Paragraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut made = 0;
    while made < n {
        let len = rng.gen_range(1..=5).min(n - made);
        let para = out.len();
        let doc = format!("doc{}", para / 10);
        let sentences = (0..len).map(|i| random_sentence(&doc, para % 10, i, &mut rng)).collect();
        out.push(Paragraph { doc, para: para % 10, sentences });
        made += len;
    }
    out
}
