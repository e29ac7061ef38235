//! Seeded generators shared by the integration and acceptance tests.
#![allow(dead_code)]

pub mod oracles;

use std::path::PathBuf;

use graphmatch::corpus::{Corpus, CorpusKind, Document};
use graphmatch::graph::{Graph, NodeKind, Origin};
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    graphmatch::seed::rng(seed)
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// Short consonant-vowel-consonant words the stemmer leaves alone.
pub fn word(i: usize) -> String {
    const C: &[u8] = b"bdfgkmnprtvz";
    const V: &[u8] = b"aiou";
    let block = C.len() * V.len() * C.len();
    let mut s = String::new();
    let mut n = i;
    loop {
        let b = n % block;
        s.push(C[b % C.len()] as char);
        s.push(V[(b / C.len()) % V.len()] as char);
        s.push(C[b / (C.len() * V.len())] as char);
        n /= block;
        if n == 0 {
            break;
        }
        n -= 1;
    }
    s
}

const FILLER: &[&str] = &["the", "a", "of", "and", "is", "in", "with", "by"];

fn phrase<R: Rng>(rng: &mut R, vocab: usize, max_words: usize) -> String {
    let n = rng.random_range(1..=max_words);
    (0..n)
        .map(|_| {
            if rng.random_bool(0.2) {
                FILLER.choose(rng).unwrap().to_string()
            } else {
                word(rng.random_range(0..vocab))
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// A table (sometimes with a numeric column) and a text or structured-text corpus
/// drawn from one small vocabulary.
pub fn random_corpus_pair<R: Rng>(rng: &mut R) -> (Corpus, Corpus) {
    let vocab = rng.random_range(5..40);
    let attrs = rng.random_range(1..=4);
    let numeric = rng.random_bool(0.3);
    let rows = (0..rng.random_range(1..=12))
        .map(|i| {
            let mut cells: Vec<(String, String)> = (0..attrs)
                .map(|a| (format!("attr{a}"), phrase(rng, vocab, 4)))
                .collect();
            if numeric {
                cells.push(("year".into(), rng.random_range(1950..2020).to_string()));
            }
            Document::row(format!("r{i}"), cells)
        })
        .collect();
    let table = Corpus::new("table", CorpusKind::Table, rows).unwrap();

    let structured = rng.random_bool(0.5);
    let kind = if structured {
        CorpusKind::StructuredText
    } else {
        CorpusKind::PlainText
    };
    let docs = (0..rng.random_range(1..=12))
        .map(|i| {
            let d = Document::text(format!("d{i}"), phrase(rng, vocab + 10, 12));
            if structured && i > 0 && rng.random_bool(0.7) {
                d.with_parent(format!("d{}", rng.random_range(0..i)))
            } else {
                d
            }
        })
        .collect();
    let text = Corpus::new("text", kind, docs).unwrap();
    (table, text)
}

/// A sparse random graph with document nodes on both sides and Data nodes in
/// between; Data-Data edges are allowed, as after expansion.
pub fn random_graph<R: Rng>(rng: &mut R, max_nodes: usize) -> Graph {
    let n = rng.random_range(4..=max_nodes.max(4));
    let d1 = rng.random_range(1..=(n / 8).max(1));
    let d2 = rng.random_range(1..=(n / 8).max(1));
    let mut g = Graph::new();
    for i in 0..d1 {
        g.add_node(NodeKind::DocMeta, format!("doc1:{i}"), Origin::First);
    }
    for i in 0..d2 {
        g.add_node(NodeKind::DocMeta, format!("doc2:{i}"), Origin::Second);
    }
    for i in 0..n - d1 - d2 {
        g.add_node(NodeKind::Data, format!("t{i}"), Origin::First);
    }
    let ids: Vec<_> = g.ids().collect();
    let m = (n as f64 * rng.random_range(0.8..2.5)) as usize;
    for _ in 0..m {
        let u = *ids.choose(rng).unwrap();
        let v = *ids.choose(rng).unwrap();
        if u != v {
            g.add_edge(u, v);
        }
    }
    g
}

/// The two-tuple, two-review movie example shipped under `data/movies`.
pub fn movies() -> (Corpus, Corpus, graphmatch::eval::GroundTruth) {
    let dir = data_dir().join("movies");
    let first = graphmatch::corpus::load_corpus(&dir.join("movies.csv"), CorpusKind::Table).unwrap();
    let second = graphmatch::corpus::load_corpus(&dir.join("reviews.jsonl"), CorpusKind::PlainText).unwrap();
    let truth = graphmatch::eval::GroundTruth::load(&dir.join("truth.tsv")).unwrap();
    (first, second, truth)
}

pub type LabelEdges = std::collections::BTreeSet<(String, String)>;

pub fn labelled_edges(g: &Graph) -> LabelEdges {
    g.edges()
        .map(|(u, v)| {
            let (a, b) = (g.node(u).label.clone(), g.node(v).label.clone());
            if a <= b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect()
}

fn pair(a: String, b: String) -> (String, String) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Expected Data labels and edges of an intersection-mode graph, found by
/// testing every (document, candidate term) pair for containment.
pub fn containment_oracle(
    first: &Corpus,
    second: &Corpus,
    max_n: usize,
) -> (std::collections::BTreeSet<String>, LabelEdges) {
    use graphmatch::graph::{column_label, doc_label};
    use std::collections::BTreeSet;

    let p1 = first.preprocessor(max_n);
    let p2 = second.preprocessor(max_n);
    let terms1: Vec<Vec<graphmatch::corpus::Term>> = first.documents().iter().map(|d| p1.terms(d)).collect();
    let terms2: Vec<Vec<graphmatch::corpus::Term>> = second.documents().iter().map(|d| p2.terms(d)).collect();
    let universe: BTreeSet<String> = terms1.iter().flatten().map(|t| t.surface.clone()).collect();

    let mut edges = LabelEdges::new();
    for t in &universe {
        for (d, ts) in first.documents().iter().zip(&terms1) {
            for term in ts.iter().filter(|x| &x.surface == t) {
                edges.insert(pair(doc_label(1, &d.id), t.clone()));
                if first.kind == CorpusKind::Table {
                    if let Some(a) = &term.source_attribute {
                        edges.insert(pair(column_label(a), t.clone()));
                    }
                }
            }
        }
        for (d, ts) in second.documents().iter().zip(&terms2) {
            if ts.iter().any(|x| &x.surface == t) {
                edges.insert(pair(doc_label(2, &d.id), t.clone()));
            }
        }
    }
    for (c, side) in [(first, 1u8), (second, 2u8)] {
        if c.kind == CorpusKind::StructuredText {
            for d in c.documents() {
                if let Some(p) = &d.parent_id {
                    edges.insert(pair(doc_label(side, &d.id), doc_label(side, p)));
                }
            }
        }
    }
    (universe, edges)
}
