//! Retrieval and taxonomy-path metrics over match rankings.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::MatchRanking;

/// Relevant targets per query, and optionally root-to-node taxonomy paths per target.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruth {
    pub pairs: BTreeMap<String, BTreeSet<String>>,
    pub paths: HashMap<String, Vec<String>>,
}

impl GroundTruth {
    pub fn from_pairs<I, Q, T>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (Q, T)>,
        Q: Into<String>,
        T: Into<String>,
    {
        let mut g = GroundTruth::default();
        for (q, t) in pairs {
            g.pairs.entry(q.into()).or_default().insert(t.into());
        }
        g
    }

    /// TSV `query_id<TAB>target_id`, one row per relevant pair.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 2 {
                return Err(Error::parse(
                    path,
                    i + 1,
                    format!("expected 2 columns, found {}", cols.len()),
                ));
            }
            rows.push((cols[0].trim().to_string(), cols[1].trim().to_string()));
        }
        Ok(GroundTruth::from_pairs(rows))
    }

    pub fn relevant(&self, query: &str) -> Result<&BTreeSet<String>> {
        self.pairs
            .get(query)
            .ok_or_else(|| Error::MissingTruth(query.to_string()))
    }

    fn path(&self, target: &str) -> Result<&[String]> {
        self.paths
            .get(target)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::MissingPath(target.to_string()))
    }
}

type Evaluable<'a> = Vec<(&'a MatchRanking, &'a BTreeSet<String>)>;

/// Rankings whose query has a non-empty relevant set, plus the number skipped.
fn evaluable<'a>(rankings: &'a [MatchRanking], truth: &'a GroundTruth) -> Result<(Evaluable<'a>, usize)> {
    let mut kept = Vec::with_capacity(rankings.len());
    let mut skipped = 0;
    for r in rankings {
        let rel = truth.relevant(&r.query_id)?;
        if rel.is_empty() {
            skipped += 1;
        } else {
            kept.push((r, rel));
        }
    }
    Ok((kept, skipped))
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

pub fn mrr(rankings: &[MatchRanking], truth: &GroundTruth) -> Result<f64> {
    let (qs, _) = evaluable(rankings, truth)?;
    Ok(mean(qs.iter().map(|(r, rel)| {
        r.ids()
            .position(|t| rel.contains(t))
            .map_or(0.0, |i| 1.0 / (i + 1) as f64)
    })))
}

pub fn average_precision_at_k(ranked: &[&str], relevant: &BTreeSet<String>, k: usize) -> f64 {
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, t) in ranked.iter().take(k).enumerate() {
        if relevant.contains(*t) {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    sum / relevant.len().min(k) as f64
}

pub fn map_at_k(rankings: &[MatchRanking], truth: &GroundTruth, k: usize) -> Result<f64> {
    check_k(k)?;
    let (qs, _) = evaluable(rankings, truth)?;
    Ok(mean(qs.iter().map(|(r, rel)| {
        let ids: Vec<&str> = r.ids().collect();
        average_precision_at_k(&ids, rel, k)
    })))
}

pub fn has_positive_at_k(rankings: &[MatchRanking], truth: &GroundTruth, k: usize) -> Result<f64> {
    check_k(k)?;
    let (qs, _) = evaluable(rankings, truth)?;
    Ok(mean(qs.iter().map(|(r, rel)| {
        if r.ids().take(k).any(|t| rel.contains(t)) {
            1.0
        } else {
            0.0
        }
    })))
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::Config("k must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Overlap of two root-to-node paths after dropping their two most general levels.
pub fn node_score<S: AsRef<str>>(p1: &[S], p2: &[S]) -> Result<f64> {
    if p1.is_empty() || p2.is_empty() {
        return Err(Error::EmptyPath);
    }
    let tail = |p: &[S]| -> HashSet<String> { p.iter().skip(2).map(|s| s.as_ref().to_string()).collect() };
    let (a, b) = (tail(p1), tail(p2));
    Ok(match (a.is_empty(), b.is_empty()) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.0,
        _ => a.intersection(&b).count() as f64 / a.len().max(b.len()) as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
}

impl Prf {
    pub fn new(precision: f64, recall: f64) -> Self {
        let f = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Prf { precision, recall, f }
    }
}

type PathSets<'a> = Vec<(Vec<&'a [String]>, Vec<&'a [String]>)>;

/// Per query: predicted paths (top-k) and ground-truth paths.
fn path_sets<'a>(rankings: &'a [MatchRanking], truth: &'a GroundTruth, k: usize) -> Result<PathSets<'a>> {
    check_k(k)?;
    let (qs, _) = evaluable(rankings, truth)?;
    qs.iter()
        .map(|(r, rel)| {
            let pred = r.ids().take(k).map(|t| truth.path(t)).collect::<Result<Vec<_>>>()?;
            let gt = rel.iter().map(|t| truth.path(t)).collect::<Result<Vec<_>>>()?;
            Ok((pred, gt))
        })
        .collect()
}

/// Full-path equality matching, micro-averaged over queries.
pub fn exact_prf(rankings: &[MatchRanking], truth: &GroundTruth, k: usize) -> Result<Prf> {
    let (mut p_credit, mut p_den, mut r_credit, mut r_den) = (0.0, 0usize, 0.0, 0usize);
    for (pred, gt) in path_sets(rankings, truth, k)? {
        p_credit += pred.iter().filter(|p| gt.contains(p)).count() as f64;
        r_credit += gt.iter().filter(|g| pred.contains(g)).count() as f64;
        p_den += pred.len();
        r_den += gt.len();
    }
    Ok(Prf::new(ratio(p_credit, p_den), ratio(r_credit, r_den)))
}

/// Soft matching with [`node_score`]: each prediction is credited with its best
/// ground-truth overlap and each ground-truth path with its best prediction.
pub fn node_prf(rankings: &[MatchRanking], truth: &GroundTruth, k: usize) -> Result<Prf> {
    let best = |x: &[String], ys: &[&[String]]| -> Result<f64> {
        ys.iter().try_fold(0.0f64, |m, y| Ok(m.max(node_score(x, y)?)))
    };
    let (mut p_credit, mut p_den, mut r_credit, mut r_den) = (0.0, 0usize, 0.0, 0usize);
    for (pred, gt) in path_sets(rankings, truth, k)? {
        for p in &pred {
            p_credit += best(p, &gt)?;
        }
        for g in &gt {
            r_credit += best(g, &pred)?;
        }
        p_den += pred.len();
        r_den += gt.len();
    }
    Ok(Prf::new(ratio(p_credit, p_den), ratio(r_credit, r_den)))
}

fn ratio(a: f64, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a / b as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    #[serde(rename = "MRR")]
    pub mrr: f64,
    #[serde(rename = "MAP@k")]
    pub map_at: BTreeMap<usize, f64>,
    #[serde(rename = "HasPositive@k")]
    pub haspos_at: BTreeMap<usize, f64>,
    #[serde(rename = "Exact@k", skip_serializing_if = "BTreeMap::is_empty", default)]
    pub exact_prf: BTreeMap<usize, Prf>,
    #[serde(rename = "Node@k", skip_serializing_if = "BTreeMap::is_empty", default)]
    pub node_prf: BTreeMap<usize, Prf>,
    pub queries_evaluated: usize,
    pub queries_excluded: usize,
}

/// All metrics for the given cut-offs; path metrics only when `truth.paths` is set.
pub fn evaluate(rankings: &[MatchRanking], truth: &GroundTruth, ks: &[usize]) -> Result<EvalReport> {
    let (qs, excluded) = evaluable(rankings, truth)?;
    let mut report = EvalReport {
        mrr: mrr(rankings, truth)?,
        map_at: BTreeMap::new(),
        haspos_at: BTreeMap::new(),
        exact_prf: BTreeMap::new(),
        node_prf: BTreeMap::new(),
        queries_evaluated: qs.len(),
        queries_excluded: excluded,
    };
    for &k in ks {
        report.map_at.insert(k, map_at_k(rankings, truth, k)?);
        report.haspos_at.insert(k, has_positive_at_k(rankings, truth, k)?);
        if !truth.paths.is_empty() {
            report.exact_prf.insert(k, exact_prf(rankings, truth, k)?);
            report.node_prf.insert(k, node_prf(rankings, truth, k)?);
        }
    }
    Ok(report)
}
