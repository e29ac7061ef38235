//! Graph creation over two corpora.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{column_label, doc_label, tfidf_filter, Graph, NodeKind, Origin};
use crate::corpus::{Corpus, CorpusKind, Term};
use crate::error::{Error, Result};

/// How second-corpus terms are admitted to the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TermFilter {
    /// Data nodes come from the first corpus only; second-corpus documents
    /// link to the ones that already exist.
    Intersection,
    /// Each document of both corpora keeps its `k` best TF-IDF terms, and
    /// all kept terms become Data nodes.
    TfIdf(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildConfig {
    pub max_n: usize,
    pub filter: TermFilter,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            max_n: 3,
            filter: TermFilter::Intersection,
        }
    }
}

/// True if `a` should seed the graph before `b` (fewer distinct tokens; ties
/// keep the given order).
pub fn seeding_order(a: &Corpus, b: &Corpus) -> bool {
    a.distinct_tokens() <= b.distinct_tokens()
}

/// Terms of each document, optionally narrowed by TF-IDF.
fn document_terms(corpus: &Corpus, cfg: &BuildConfig) -> Vec<Vec<Term>> {
    let pre = corpus.preprocessor(cfg.max_n);
    let terms: Vec<Vec<Term>> = corpus.documents().iter().map(|d| pre.terms(d)).collect();
    match cfg.filter {
        TermFilter::Intersection => terms,
        TermFilter::TfIdf(k) => {
            let kept = tfidf_filter(corpus, &pre, k);
            terms
                .into_iter()
                .zip(kept)
                .map(|(ts, keep)| ts.into_iter().filter(|t| keep.contains(&t.surface)).collect())
                .collect()
        }
    }
}

/// Builds the graph with `first` seeding the Data nodes.
pub fn build_graph(first: &Corpus, second: &Corpus, cfg: &BuildConfig) -> Result<Graph> {
    for c in [first, second] {
        if c.is_empty() {
            return Err(Error::EmptyCorpus(c.name.clone()));
        }
    }
    if cfg.max_n == 0 {
        return Err(Error::Config("n-gram size must be at least 1".into()));
    }
    let mut g = Graph::new();

    let first_terms = document_terms(first, cfg);
    for (doc, terms) in first.documents().iter().zip(&first_terms) {
        let meta = g.add_node(NodeKind::DocMeta, doc_label(1, &doc.id), Origin::First);
        if first.kind == CorpusKind::Table {
            for field in &doc.fields {
                if let Some(attr) = &field.attribute {
                    g.add_node(NodeKind::ColumnMeta, column_label(attr), Origin::First);
                }
            }
        }
        for term in terms {
            let data = g.add_node(NodeKind::Data, term.surface.clone(), Origin::First);
            g.add_edge(meta, data);
            if first.kind == CorpusKind::Table {
                if let Some(attr) = &term.source_attribute {
                    let col = g.find(&column_label(attr)).expect("column node created above");
                    g.add_edge(col, data);
                }
            }
        }
    }
    if first.kind == CorpusKind::StructuredText {
        connect_metadata(&mut g, first, 1)?;
    }

    let second_terms = document_terms(second, cfg);
    for (doc, terms) in second.documents().iter().zip(&second_terms) {
        let meta = g.add_node(NodeKind::DocMeta, doc_label(2, &doc.id), Origin::Second);
        let mut seen = HashSet::new();
        for term in terms {
            if !seen.insert(term.surface.as_str()) {
                continue;
            }
            let data = match cfg.filter {
                TermFilter::Intersection => match g.find(&term.surface) {
                    Some(id) if g.node(id).kind == NodeKind::Data => id,
                    _ => continue,
                },
                TermFilter::TfIdf(_) => g.add_node(NodeKind::Data, term.surface.clone(), Origin::Second),
            };
            g.add_edge(meta, data);
        }
    }
    if second.kind == CorpusKind::StructuredText {
        connect_metadata(&mut g, second, 2)?;
    }
    Ok(g)
}

/// Links every structured-text document node to its parent's node.
/// Idempotent; returns the number of edges added.
pub fn connect_metadata(g: &mut Graph, corpus: &Corpus, side: u8) -> Result<usize> {
    let mut added = 0;
    for doc in corpus.documents() {
        let Some(parent) = &doc.parent_id else {
            continue;
        };
        let child = g.find(&doc_label(side, &doc.id));
        let up = g.find(&doc_label(side, parent));
        match (child, up) {
            (Some(c), Some(p)) => added += usize::from(g.add_edge(c, p)),
            _ => {
                return Err(Error::MissingParent {
                    id: doc.id.clone(),
                    parent: parent.clone(),
                })
            }
        }
    }
    Ok(added)
}
