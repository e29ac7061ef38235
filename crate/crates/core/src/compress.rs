//! Metadata-shortest-path (MSP) compression: keep only the nodes and edges
//! lying on shortest paths between document nodes of the two corpora.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::{Graph, NodeId, NodeKind, Origin};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompressionConfig {
    /// Sampling budget as a fraction of the node count.
    pub beta: f64,
    pub seed: u64,
}

impl CompressionConfig {
    /// Number of sampled pairs, `ceil(beta * |nodes|)`.
    pub fn iterations(&self, g: &Graph) -> usize {
        (self.beta * g.node_count() as f64).ceil() as usize
    }
}

#[derive(Debug, Clone)]
pub struct Compression {
    pub graph: Graph,
    /// Sampled (first, second) document pairs, as ids of the input graph.
    pub sampled: Vec<(NodeId, NodeId)>,
    /// Labels of document nodes with no path to the other corpus.
    pub unreachable: Vec<String>,
}

/// Edges on every shortest path from `source` to `target` (empty when
/// unreachable). Walks back over the BFS layers, which covers all shortest
/// paths without enumerating them.
pub fn shortest_path_edges(g: &Graph, source: NodeId, target: NodeId) -> Vec<(NodeId, NodeId)> {
    let dist = g.bfs_distances(source);
    if dist[target.index()] == u32::MAX {
        return Vec::new();
    }
    let mut edges = Vec::new();
    let mut seen = vec![false; g.node_count()];
    let mut stack = vec![target];
    seen[target.index()] = true;
    while let Some(x) = stack.pop() {
        let dx = dist[x.index()];
        if dx == 0 {
            continue;
        }
        for &y in g.neighbors(x) {
            if dist[y.index()] == dx - 1 {
                edges.push((y, x));
                if !seen[y.index()] {
                    seen[y.index()] = true;
                    stack.push(y);
                }
            }
        }
    }
    edges
}

/// One shortest path from `source` to the nearest document node of the
/// other corpus, found by BFS in id order.
fn nearest_other_corpus(g: &Graph, source: NodeId) -> Option<Vec<(NodeId, NodeId)>> {
    let other = match g.node(source).corpus {
        Origin::First => Origin::Second,
        _ => Origin::First,
    };
    let mut parent = vec![None; g.node_count()];
    let mut seen = vec![false; g.node_count()];
    let mut queue = VecDeque::from([source]);
    seen[source.index()] = true;
    while let Some(u) = queue.pop_front() {
        let n = g.node(u);
        if n.kind == NodeKind::DocMeta && n.corpus == other {
            let mut path = Vec::new();
            let mut x = u;
            while let Some(p) = parent[x.index()] {
                path.push((p, x));
                x = p;
            }
            return Some(path);
        }
        for &v in g.neighbors(u) {
            if !seen[v.index()] {
                seen[v.index()] = true;
                parent[v.index()] = Some(u);
                queue.push_back(v);
            }
        }
    }
    None
}

/// Draws the sampled pairs from the seed stream. The first `L` draws are the
/// same for every budget, which makes outputs nested in `beta`.
pub fn sample_pairs(first: &[NodeId], second: &[NodeId], count: usize, seed: u64) -> Vec<(NodeId, NodeId)> {
    let mut rng = seed::rng(seed);
    (0..count)
        .map(|_| {
            let a = first[rng.random_range(0..first.len())];
            let b = second[rng.random_range(0..second.len())];
            (a, b)
        })
        .collect()
}

pub fn msp_compress(g: &Graph, cfg: &CompressionConfig) -> Result<Graph> {
    Ok(msp_compress_traced(g, cfg, Exec::default())?.graph)
}

/// MSP compression, also returning the sampled pairs for replay.
///
/// Every document node of the input is kept. Besides the sampled pairs,
/// each document node contributes one shortest path to its nearest
/// document node in the other corpus, so no document is left disconnected
/// when a path exists.
pub fn msp_compress_traced(g: &Graph, cfg: &CompressionConfig, exec: Exec) -> Result<Compression> {
    if cfg.beta.is_nan() || cfg.beta <= 0.0 {
        return Err(Error::Config(format!("beta must be positive, got {}", cfg.beta)));
    }
    let first = g.doc_nodes(Origin::First);
    let second = g.doc_nodes(Origin::Second);
    if first.is_empty() || second.is_empty() {
        return Err(Error::Config(
            "compression needs document nodes from both corpora".into(),
        ));
    }
    let sampled = sample_pairs(&first, &second, cfg.iterations(g), cfg.seed);

    let mut edges: Vec<(NodeId, NodeId)> = exec
        .map(&sampled, |&(a, b)| shortest_path_edges(g, a, b))
        .into_iter()
        .flatten()
        .collect();

    let docs: Vec<NodeId> = first.iter().chain(&second).copied().collect();
    let guarantees = exec.map(&docs, |&d| nearest_other_corpus(g, d));
    let mut unreachable = Vec::new();
    for (d, path) in docs.iter().zip(guarantees) {
        match path {
            Some(p) => edges.extend(p),
            None => unreachable.push(g.node(*d).label.clone()),
        }
    }
    if !unreachable.is_empty() {
        log::warn!(
            "{} document node(s) cannot reach the other corpus and stay isolated",
            unreachable.len()
        );
    }

    let mut keep = vec![false; g.node_count()];
    for &d in &docs {
        keep[d.index()] = true;
    }
    for &(u, v) in &edges {
        keep[u.index()] = true;
        keep[v.index()] = true;
    }
    Ok(Compression {
        graph: g.subgraph(&keep, &edges),
        sampled,
        unreachable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_graph_is_its_own_compression() {
        let mut g = Graph::new();
        let m1 = g.add_node(NodeKind::DocMeta, "doc1:a", Origin::First);
        let x = g.add_node(NodeKind::Data, "x", Origin::First);
        let m2 = g.add_node(NodeKind::DocMeta, "doc2:b", Origin::Second);
        g.add_edge(m1, x);
        g.add_edge(x, m2);
        for beta in [1.0, 2.5] {
            let out = msp_compress(&g, &CompressionConfig { beta, seed: 3 }).unwrap();
            assert_eq!(out, g);
        }
    }

    #[test]
    fn all_shortest_paths_are_kept() {
        // a - {x, y} - b plus a longer detour a - p - q - b
        let mut g = Graph::new();
        let a = g.add_node(NodeKind::DocMeta, "doc1:a", Origin::First);
        let b = g.add_node(NodeKind::DocMeta, "doc2:b", Origin::Second);
        let ids: Vec<NodeId> = ["x", "y", "p", "q"]
            .iter()
            .map(|l| g.add_node(NodeKind::Data, *l, Origin::First))
            .collect();
        g.add_edge(a, ids[0]);
        g.add_edge(ids[0], b);
        g.add_edge(a, ids[1]);
        g.add_edge(ids[1], b);
        g.add_edge(a, ids[2]);
        g.add_edge(ids[2], ids[3]);
        g.add_edge(ids[3], b);
        let mut e = shortest_path_edges(&g, a, b);
        e.sort();
        assert_eq!(e.len(), 4);
        let out = msp_compress(&g, &CompressionConfig { beta: 1.0, seed: 0 }).unwrap();
        assert_eq!(out.node_count(), 4);
        assert!(out.find("p").is_none());
    }

    #[test]
    fn isolated_document_survives() {
        let mut g = Graph::new();
        let m1 = g.add_node(NodeKind::DocMeta, "doc1:a", Origin::First);
        let x = g.add_node(NodeKind::Data, "x", Origin::First);
        let m2 = g.add_node(NodeKind::DocMeta, "doc2:b", Origin::Second);
        g.add_node(NodeKind::DocMeta, "doc2:lonely", Origin::Second);
        g.add_edge(m1, x);
        g.add_edge(x, m2);
        let c = msp_compress_traced(&g, &CompressionConfig { beta: 1.0, seed: 9 }, Exec::Sequential).unwrap();
        assert_eq!(c.unreachable, ["doc2:lonely"]);
        assert!(c.graph.find("doc2:lonely").is_some());
    }

    #[test]
    fn rejects_bad_input() {
        let mut g = Graph::new();
        g.add_node(NodeKind::DocMeta, "doc1:a", Origin::First);
        assert!(msp_compress(&g, &CompressionConfig { beta: 0.5, seed: 0 }).is_err());
        assert!(msp_compress(&g, &CompressionConfig { beta: 0.0, seed: 0 }).is_err());
    }
}
