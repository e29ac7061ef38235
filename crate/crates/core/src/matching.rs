//! Cosine top-k matching between document metadata nodes.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::doc_label;
use crate::vectors::{cosine, Vectors};

/// A document to match: its corpus id and its node label in the walk vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub id: String,
    pub label: String,
}

impl Candidate {
    pub fn new(id: impl Into<String>, label: impl Into<String>) -> Self {
        Candidate {
            id: id.into(),
            label: label.into(),
        }
    }
}

/// Candidates for every document of `corpus`, labelled as graph side `side`.
pub fn candidates(corpus: &Corpus, side: u8) -> Vec<Candidate> {
    corpus
        .documents()
        .iter()
        .map(|d| Candidate::new(d.id.clone(), doc_label(side, &d.id)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchRanking {
    pub query_id: String,
    pub candidates: Vec<(String, f64)>,
}

impl MatchRanking {
    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.candidates.iter().map(|(id, _)| id.as_str())
    }
}

/// Score descending, then id ascending. `-inf` scores sort last.
fn rank_order(a: &(String, f64), b: &(String, f64)) -> Ordering {
    b.1.partial_cmp(&a.1)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.0.cmp(&b.0))
}

fn truncate_sorted(mut scored: Vec<(String, f64)>, k: usize) -> Vec<(String, f64)> {
    if k < scored.len() {
        scored.select_nth_unstable_by(k, rank_order);
        scored.truncate(k);
    }
    scored.sort_by(rank_order);
    scored
}

/// Exact top-`k` targets per query by cosine. Zero-norm vectors score `-inf`.
pub fn top_k_match(
    queries: &[Candidate],
    targets: &[Candidate],
    vectors: &Vectors,
    k: usize,
    exec: Exec,
) -> Result<Vec<MatchRanking>> {
    let missing: Vec<String> = queries
        .iter()
        .chain(targets)
        .filter(|c| vectors.get(&c.label).is_none())
        .map(|c| c.id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingVectors(missing));
    }
    let rows: Vec<&[f32]> = targets.iter().map(|t| vectors.get(&t.label).unwrap()).collect();
    Ok(exec.map(queries, |q| {
        let qv = vectors.get(&q.label).unwrap();
        let scored = targets
            .iter()
            .zip(&rows)
            .map(|(t, tv)| (t.id.clone(), cosine(qv, tv).unwrap_or(f64::NEG_INFINITY)))
            .collect();
        MatchRanking {
            query_id: q.id.clone(),
            candidates: truncate_sorted(scored, k),
        }
    }))
}

/// Per-query target scores, e.g. from an external model.
pub type ScoreTable = BTreeMap<String, BTreeMap<String, f64>>;

pub fn score_table(rankings: &[MatchRanking]) -> ScoreTable {
    rankings
        .iter()
        .map(|r| (r.query_id.clone(), r.candidates.iter().cloned().collect()))
        .collect()
}

/// `weight * own + (1 - weight) * external`, re-ranked and cut to `k`.
pub fn combine_rankings(own: &ScoreTable, external: &ScoreTable, weight: f64, k: usize) -> Result<Vec<MatchRanking>> {
    if !(0.0..=1.0).contains(&weight) {
        return Err(Error::Config(format!(
            "ensemble weight must be in [0, 1], got {weight}"
        )));
    }
    let pairs = |t: &ScoreTable| -> BTreeSet<(String, String)> {
        t.iter()
            .flat_map(|(q, ts)| ts.keys().map(move |t| (q.clone(), t.clone())))
            .collect()
    };
    let (a, b) = (pairs(own), pairs(external));
    if a != b {
        let diff: Vec<String> = a
            .symmetric_difference(&b)
            .take(5)
            .map(|(q, t)| format!("({q}, {t})"))
            .collect();
        return Err(Error::CoverageMismatch(diff.join(", ")));
    }
    Ok(own
        .iter()
        .map(|(q, ts)| {
            let ext = &external[q];
            let scored = ts
                .iter()
                .map(|(t, &s)| (t.clone(), weight * s + (1.0 - weight) * ext[t]))
                .collect();
            MatchRanking {
                query_id: q.clone(),
                candidates: truncate_sorted(scored, k),
            }
        })
        .collect())
}

pub fn write_rankings(rankings: &[MatchRanking], path: &Path) -> Result<()> {
    let mut out = String::new();
    for r in rankings {
        for (rank, (t, s)) in r.candidates.iter().enumerate() {
            let _ = writeln!(out, "{}\t{}\t{}\t{:.6}", r.query_id, rank + 1, t, s);
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads the ranking TSV. The rank column is ignored; candidates are
/// re-sorted by score.
pub fn read_rankings(path: &Path) -> Result<Vec<MatchRanking>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut order: Vec<String> = Vec::new();
    let mut by_query: HashMap<String, Vec<(String, f64)>> = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(Error::parse(
                path,
                i + 1,
                format!("expected 4 columns, found {}", cols.len()),
            ));
        }
        let score: f64 = cols[3]
            .parse()
            .map_err(|_| Error::parse(path, i + 1, format!("bad score `{}`", cols[3])))?;
        let entry = by_query.entry(cols[0].to_string()).or_insert_with(|| {
            order.push(cols[0].to_string());
            Vec::new()
        });
        entry.push((cols[2].to_string(), score));
    }
    Ok(order
        .into_iter()
        .map(|q| {
            let mut c = by_query.remove(&q).unwrap();
            c.sort_by(rank_order);
            MatchRanking {
                query_id: q,
                candidates: c,
            }
        })
        .collect())
}
