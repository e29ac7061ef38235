//! Definitional metric implementations, written without reference to the library's.

use std::collections::BTreeSet;

use graphmatch::eval::GroundTruth;
use graphmatch::matching::MatchRanking;
use rand::seq::SliceRandom;
use rand::Rng;

fn queries<'a>(r: &'a [MatchRanking], t: &'a GroundTruth) -> Vec<(&'a MatchRanking, &'a BTreeSet<String>)> {
    r.iter()
        .map(|x| (x, &t.pairs[&x.query_id]))
        .filter(|(_, rel)| !rel.is_empty())
        .collect()
}

fn avg(v: Vec<f64>) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

pub fn mrr(r: &[MatchRanking], t: &GroundTruth) -> f64 {
    avg(queries(r, t)
        .into_iter()
        .map(|(x, rel)| {
            for (i, (id, _)) in x.candidates.iter().enumerate() {
                if rel.contains(id) {
                    return 1.0 / (i as f64 + 1.0);
                }
            }
            0.0
        })
        .collect())
}

pub fn map(r: &[MatchRanking], t: &GroundTruth, k: usize) -> f64 {
    avg(queries(r, t)
        .into_iter()
        .map(|(x, rel)| {
            let top: Vec<&String> = x.candidates.iter().take(k).map(|(id, _)| id).collect();
            let mut total = 0.0;
            for i in 1..=top.len() {
                if rel.contains(top[i - 1]) {
                    let hits = top[..i].iter().filter(|id| rel.contains(**id)).count();
                    total += hits as f64 / i as f64;
                }
            }
            total / rel.len().min(k) as f64
        })
        .collect())
}

pub fn has_positive(r: &[MatchRanking], t: &GroundTruth, k: usize) -> f64 {
    avg(queries(r, t)
        .into_iter()
        .map(|(x, rel)| {
            x.candidates
                .iter()
                .take(k)
                .filter(|(id, _)| rel.contains(id))
                .count()
                .min(1) as f64
        })
        .collect())
}

pub fn node_score(p: &[String], q: &[String]) -> f64 {
    let mut a: Vec<&String> = p.iter().skip(2).collect();
    let mut b: Vec<&String> = q.iter().skip(2).collect();
    a.sort();
    a.dedup();
    b.sort();
    b.dedup();
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let common = a.iter().filter(|x| b.contains(x)).count();
    common as f64 / a.len().max(b.len()) as f64
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// (P, R, F) with per-prediction and per-truth credits from `credit`.
fn prf(r: &[MatchRanking], t: &GroundTruth, k: usize, credit: impl Fn(&[String], &[String]) -> f64) -> (f64, f64, f64) {
    let (mut pc, mut pn, mut rc, mut rn) = (0.0, 0.0, 0.0, 0.0);
    for (x, rel) in queries(r, t) {
        let pred: Vec<&Vec<String>> = x.candidates.iter().take(k).map(|(id, _)| &t.paths[id]).collect();
        let gt: Vec<&Vec<String>> = rel.iter().map(|id| &t.paths[id]).collect();
        for p in &pred {
            pc += gt.iter().map(|g| credit(p, g)).fold(0.0, f64::max);
            pn += 1.0;
        }
        for g in &gt {
            rc += pred.iter().map(|p| credit(g, p)).fold(0.0, f64::max);
            rn += 1.0;
        }
    }
    let p = if pn == 0.0 { 0.0 } else { pc / pn };
    let rr = if rn == 0.0 { 0.0 } else { rc / rn };
    (p, rr, f1(p, rr))
}

pub fn exact(r: &[MatchRanking], t: &GroundTruth, k: usize) -> (f64, f64, f64) {
    prf(r, t, k, |a, b| if a == b { 1.0 } else { 0.0 })
}

pub fn node(r: &[MatchRanking], t: &GroundTruth, k: usize) -> (f64, f64, f64) {
    prf(r, t, k, node_score)
}

/// Up to 20 queries over up to 50 targets, with random relevance and
/// taxonomy paths; some queries have no relevant target.
pub fn random_instance<R: Rng>(rng: &mut R) -> (Vec<MatchRanking>, GroundTruth) {
    let nq = rng.random_range(1..=20);
    let nt = rng.random_range(1..=50);
    let targets: Vec<String> = (0..nt).map(|i| format!("t{i}")).collect();
    let mut truth = GroundTruth::default();
    for t in &targets {
        let len = rng.random_range(1..=6);
        let path = (0..len).map(|_| format!("n{}", rng.random_range(0..8))).collect();
        truth.paths.insert(t.clone(), path);
    }
    let mut rankings = Vec::new();
    for q in 0..nq {
        let qid = format!("q{q}");
        let rel: BTreeSet<String> = targets.iter().filter(|_| rng.random_bool(0.15)).cloned().collect();
        truth.pairs.insert(qid.clone(), rel);
        let mut order = targets.clone();
        order.shuffle(rng);
        order.truncate(rng.random_range(1..=nt));
        let candidates = order
            .into_iter()
            .enumerate()
            .map(|(i, t)| (t, 1.0 - i as f64 / 100.0))
            .collect();
        rankings.push(MatchRanking {
            query_id: qid,
            candidates,
        });
    }
    (rankings, truth)
}
