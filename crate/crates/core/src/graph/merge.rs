//! Merging equivalent Data nodes: shared stems, shared numeric buckets, or
//! close external vectors.

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::{Graph, NodeId, NodeKind};
use crate::corpus::{is_numeric_token, stem, Bins, BucketingConfig};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::vectors::{cosine, Vectors};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergePolicy {
    pub use_stemming: bool,
    pub bucketing: BucketingConfig,
    pub vector_file: Option<PathBuf>,
    /// Cosine threshold; required iff `vector_file` is set.
    pub gamma: Option<f64>,
}

impl Default for MergePolicy {
    fn default() -> Self {
        MergePolicy {
            use_stemming: true,
            bucketing: BucketingConfig::default(),
            vector_file: None,
            gamma: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MergeReason {
    Stem,
    Bucket,
    Vector,
}

impl MergeReason {
    pub fn as_str(self) -> &'static str {
        match self {
            MergeReason::Stem => "stem",
            MergeReason::Bucket => "bucket",
            MergeReason::Vector => "vector",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeEntry {
    pub survivor: String,
    pub absorbed: String,
    pub reason: MergeReason,
}

struct UnionFind {
    parent: Vec<usize>,
    reason: Vec<Option<MergeReason>>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            reason: vec![None; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Smallest index becomes the root, so survivors do not depend on the
    /// order unions are applied in.
    fn union(&mut self, a: usize, b: usize, why: MergeReason) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        for x in [a, b] {
            self.reason[x].get_or_insert(why);
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
    }
}

fn stem_key(label: &str) -> String {
    label.split('_').map(stem).collect::<Vec<_>>().join("_")
}

/// Numeric Data nodes grouped by the first table column they belong to.
fn numeric_groups(g: &Graph) -> BTreeMap<Option<NodeId>, Vec<(NodeId, f64)>> {
    let mut groups: BTreeMap<Option<NodeId>, Vec<(NodeId, f64)>> = BTreeMap::new();
    for n in g.nodes() {
        if n.kind != NodeKind::Data || !is_numeric_token(&n.label) {
            continue;
        }
        let Ok(v) = n.label.parse::<f64>() else {
            continue;
        };
        let column = g
            .neighbors(n.id)
            .iter()
            .copied()
            .find(|&m| g.node(m).kind == NodeKind::ColumnMeta);
        groups.entry(column).or_default().push((n.id, v));
    }
    groups
}

/// Pairs of unigram Data nodes whose vectors have cosine >= `gamma`.
pub fn vector_pairs(g: &Graph, vectors: &Vectors, gamma: f64, exec: Exec) -> Vec<(NodeId, NodeId)> {
    let covered: Vec<(NodeId, &[f32])> = g
        .nodes()
        .iter()
        .filter(|n| n.kind == NodeKind::Data && !n.label.contains('_'))
        .filter_map(|n| vectors.get(&n.label).map(|v| (n.id, v)))
        .collect();
    exec.map_range(covered.len(), |i| {
        let (a, va) = covered[i];
        covered[i + 1..]
            .iter()
            .filter(|(_, vb)| cosine(va, vb).is_some_and(|c| c >= gamma))
            .map(|&(b, _)| (a, b))
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Unifies equivalent Data nodes. Survivors are the smallest id of each
/// class and keep their label; metadata nodes never merge.
pub fn merge_nodes(g: &Graph, policy: &MergePolicy) -> Result<(Graph, Vec<MergeEntry>)> {
    let vectors = match (&policy.vector_file, policy.gamma) {
        (Some(path), Some(_)) => Some(Vectors::read_text(path)?),
        (None, None) => None,
        (Some(_), None) => return Err(Error::Config("a vector file needs a gamma threshold".into())),
        (None, Some(_)) => return Err(Error::Config("gamma given without a vector file".into())),
    };
    merge_nodes_with(g, policy, vectors.as_ref(), Exec::default())
}

/// [`merge_nodes`] with vectors already loaded.
pub fn merge_nodes_with(
    g: &Graph,
    policy: &MergePolicy,
    vectors: Option<&Vectors>,
    exec: Exec,
) -> Result<(Graph, Vec<MergeEntry>)> {
    let mut uf = UnionFind::new(g.node_count());

    if policy.use_stemming {
        let mut by_key: HashMap<String, usize> = HashMap::new();
        for n in g.nodes().iter().filter(|n| n.kind == NodeKind::Data) {
            let key = stem_key(&n.label);
            match by_key.get(&key) {
                Some(&first) => uf.union(first, n.id.index(), MergeReason::Stem),
                None => {
                    by_key.insert(key, n.id.index());
                }
            }
        }
    }

    if policy.bucketing.enabled {
        for (_, members) in numeric_groups(g) {
            let values: Vec<f64> = members.iter().map(|(_, v)| *v).collect();
            let bins = Bins::fit(&values, policy.bucketing.width_rule)?;
            let mut first_in_bin: HashMap<usize, usize> = HashMap::new();
            for (id, v) in members {
                let b = bins.index(v);
                match first_in_bin.get(&b) {
                    Some(&f) => uf.union(f, id.index(), MergeReason::Bucket),
                    None => {
                        first_in_bin.insert(b, id.index());
                    }
                }
            }
        }
    }

    if let (Some(vectors), Some(gamma)) = (vectors, policy.gamma) {
        for (a, b) in vector_pairs(g, vectors, gamma, exec) {
            uf.union(a.index(), b.index(), MergeReason::Vector);
        }
    }

    let mut log = Vec::new();
    let mut out = Graph::new();
    let mut map = vec![NodeId(0); g.node_count()];
    for n in g.nodes() {
        let root = uf.find(n.id.index());
        if root == n.id.index() {
            map[root] = out.add_node(n.kind, n.label.clone(), n.corpus);
        } else {
            map[n.id.index()] = map[root];
            log.push(MergeEntry {
                survivor: g.nodes()[root].label.clone(),
                absorbed: n.label.clone(),
                reason: uf.reason[n.id.index()].unwrap_or(MergeReason::Stem),
            });
        }
    }
    for (u, v) in g.edges() {
        out.add_edge(map[u.index()], map[v.index()]);
    }
    Ok((out, log))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaCalibration {
    pub gamma: f64,
    pub covered: usize,
    pub skipped: usize,
}

/// Mean cosine over the synonym pairs covered by `vectors`.
pub fn calibrate_gamma(synonyms: &[(String, String)], vectors: &Vectors) -> Result<GammaCalibration> {
    let lookup = |t: &str| vectors.get(t).or_else(|| vectors.get(&t.to_lowercase()));
    let mut sum = 0.0;
    let mut covered = 0;
    let mut skipped = 0;
    for (a, b) in synonyms {
        match (lookup(a), lookup(b)) {
            (Some(va), Some(vb)) => match cosine(va, vb) {
                Some(c) => {
                    sum += c;
                    covered += 1;
                }
                None => skipped += 1,
            },
            _ => skipped += 1,
        }
    }
    if covered == 0 {
        return Err(Error::NoCoveredPairs { skipped });
    }
    Ok(GammaCalibration {
        gamma: sum / covered as f64,
        covered,
        skipped,
    })
}
