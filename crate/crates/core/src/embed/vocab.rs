use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::walks::WalkCorpus;

/// Tokens kept for training, ordered by descending count then label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    pub tokens: Vec<String>,
    pub counts: Vec<u64>,
    /// Corpus label id -> vocab index.
    pub(crate) from_corpus: Vec<Option<u32>>,
}

impl Vocab {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn count(&self, token: &str) -> Option<u64> {
        self.tokens.iter().position(|t| t == token).map(|i| self.counts[i])
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn as_map(&self) -> HashMap<&str, u64> {
        self.tokens
            .iter()
            .map(String::as_str)
            .zip(self.counts.iter().copied())
            .collect()
    }
}

pub fn build_vocab(corpus: &WalkCorpus, min_count: usize) -> Result<Vocab> {
    let mut freq = vec![0u64; corpus.labels.len()];
    for s in &corpus.sentences {
        for &t in s {
            freq[t as usize] += 1;
        }
    }
    let mut kept: Vec<usize> = (0..freq.len())
        .filter(|&i| freq[i] > 0 && freq[i] >= min_count as u64)
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyVocabulary { min_count });
    }
    kept.sort_by(|&a, &b| {
        freq[b]
            .cmp(&freq[a])
            .then_with(|| corpus.labels[a].cmp(&corpus.labels[b]))
    });
    let mut from_corpus = vec![None; corpus.labels.len()];
    for (v, &i) in kept.iter().enumerate() {
        from_corpus[i] = Some(v as u32);
    }
    Ok(Vocab {
        tokens: kept.iter().map(|&i| corpus.labels[i].clone()).collect(),
        counts: kept.iter().map(|&i| freq[i]).collect(),
        from_corpus,
    })
}

/// Draws negatives with probability proportional to `count^0.75`.
#[derive(Debug, Clone)]
pub struct NegativeSampler {
    cumulative: Vec<f64>,
}

impl NegativeSampler {
    pub fn new(counts: &[u64]) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(0.75);
                acc
            })
            .collect();
        NegativeSampler { cumulative }
    }

    pub fn probability(&self, i: usize) -> f64 {
        let total = *self.cumulative.last().unwrap_or(&1.0);
        let prev = if i == 0 { 0.0 } else { self.cumulative[i - 1] };
        (self.cumulative[i] - prev) / total
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> u32 {
        let total = *self.cumulative.last().expect("non-empty vocabulary");
        let u = rng.random::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= u);
        i.min(self.cumulative.len() - 1) as u32
    }
}
