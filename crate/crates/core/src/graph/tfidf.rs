//! TF-IDF term selection, the alternative to intersection filtering.

use std::collections::{HashMap, HashSet};

use crate::corpus::{Corpus, Preprocessor};

/// `(surface, tf * ln(N / df))` for every distinct term of every document.
pub fn tfidf_scores(corpus: &Corpus, pre: &Preprocessor) -> Vec<Vec<(String, f64)>> {
    let per_doc: Vec<HashMap<String, usize>> = corpus
        .documents()
        .iter()
        .map(|d| {
            let mut tf = HashMap::new();
            for t in pre.terms(d) {
                *tf.entry(t.surface).or_insert(0) += 1;
            }
            tf
        })
        .collect();
    let mut df: HashMap<&str, usize> = HashMap::new();
    for tf in &per_doc {
        for s in tf.keys() {
            *df.entry(s.as_str()).or_insert(0) += 1;
        }
    }
    let n = per_doc.len() as f64;
    per_doc
        .iter()
        .map(|tf| {
            let mut scored: Vec<(String, f64)> = tf
                .iter()
                .map(|(s, &c)| (s.clone(), c as f64 * (n / df[s.as_str()] as f64).ln()))
                .collect();
            scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            scored
        })
        .collect()
}

/// The `k` highest-scoring term surfaces of each document (ties by surface).
pub fn tfidf_filter(corpus: &Corpus, pre: &Preprocessor, k: usize) -> Vec<HashSet<String>> {
    tfidf_scores(corpus, pre)
        .into_iter()
        .map(|scored| scored.into_iter().take(k).map(|(s, _)| s).collect())
        .collect()
}
