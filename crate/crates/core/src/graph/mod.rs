//! The unified corpus graph: Data nodes (terms) connected to metadata nodes
//! (documents and table columns). Undirected, unweighted, no self-loops, no
//! multi-edges.

mod build;
mod io;
mod merge;
mod tfidf;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub use build::{build_graph, connect_metadata, seeding_order, BuildConfig, TermFilter};
pub use io::{read_graph, write_graph};
pub use merge::{
    calibrate_gamma, merge_nodes, merge_nodes_with, vector_pairs, GammaCalibration, MergeEntry, MergePolicy,
    MergeReason,
};
pub use tfidf::{tfidf_filter, tfidf_scores};

/// Dense node handle, stable within one graph instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    Data,
    DocMeta,
    ColumnMeta,
}

impl NodeKind {
    pub fn is_metadata(self) -> bool {
        self != NodeKind::Data
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Data => "data",
            NodeKind::DocMeta => "doc",
            NodeKind::ColumnMeta => "column",
        }
    }
}

/// Which input a node came from. `First` is the corpus that seeds Data nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Origin {
    First,
    Second,
    External,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::First => "first",
            Origin::Second => "second",
            Origin::External => "external",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub label: String,
    pub corpus: Origin,
}

/// Label of the metadata node for document `id` of corpus `side` (1 or 2).
/// Whitespace is replaced so labels can be written space-separated.
pub fn doc_label(side: u8, id: &str) -> String {
    format!("doc{side}:{}", sanitize(id))
}

pub fn column_label(name: &str) -> String {
    format!("col:{}", sanitize(name))
}

fn sanitize(s: &str) -> String {
    s.chars().map(|c| if c.is_whitespace() { '_' } else { c }).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    nodes: Vec<Node>,
    adj: Vec<Vec<NodeId>>,
    by_label: HashMap<String, NodeId>,
    edge_count: usize,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a node, or returns the existing node with the same label.
    pub fn add_node(&mut self, kind: NodeKind, label: impl Into<String>, corpus: Origin) -> NodeId {
        let label = label.into();
        if let Some(&id) = self.by_label.get(&label) {
            return id;
        }
        let id = NodeId(self.nodes.len() as u32);
        self.by_label.insert(label.clone(), id);
        self.nodes.push(Node {
            id,
            kind,
            label,
            corpus,
        });
        self.adj.push(Vec::new());
        id
    }

    /// Inserts an undirected edge. Returns false for self-loops and
    /// existing edges.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> bool {
        if u == v {
            return false;
        }
        let list = &mut self.adj[u.index()];
        let Err(pos) = list.binary_search(&v) else {
            return false;
        };
        list.insert(pos, v);
        let list = &mut self.adj[v.index()];
        let pos = list.binary_search(&u).unwrap_err();
        list.insert(pos, u);
        self.edge_count += 1;
        true
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adj[u.index()].binary_search(&v).is_ok()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn find(&self, label: &str) -> Option<NodeId> {
        self.by_label.get(label).copied()
    }

    /// Neighbors in ascending id order.
    pub fn neighbors(&self, id: NodeId) -> &[NodeId] {
        &self.adj[id.index()]
    }

    pub fn degree(&self, id: NodeId) -> usize {
        self.adj[id.index()].len()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            let u = NodeId(u as u32);
            list.iter().filter(move |&&v| u < v).map(move |&v| (u, v))
        })
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    /// Document metadata nodes of one corpus, in id order.
    pub fn doc_nodes(&self, corpus: Origin) -> Vec<NodeId> {
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::DocMeta && n.corpus == corpus)
            .map(|n| n.id)
            .collect()
    }

    /// Subgraph on the nodes with `keep[id] == true`; ids are compacted in
    /// order. Returns the new graph and the old -> new id map.
    pub fn retain(&self, keep: &[bool]) -> (Graph, Vec<Option<NodeId>>) {
        let mut out = Graph::new();
        let mut map = vec![None; self.nodes.len()];
        for node in &self.nodes {
            if keep[node.id.index()] {
                map[node.id.index()] = Some(out.add_node(node.kind, node.label.clone(), node.corpus));
            }
        }
        for (u, v) in self.edges() {
            if let (Some(a), Some(b)) = (map[u.index()], map[v.index()]) {
                out.add_edge(a, b);
            }
        }
        (out, map)
    }

    /// Subgraph with the given nodes and edges (edges must join kept nodes).
    pub fn subgraph(&self, keep: &[bool], edges: &[(NodeId, NodeId)]) -> Graph {
        let mut out = Graph::new();
        let mut map = vec![None; self.nodes.len()];
        for node in &self.nodes {
            if keep[node.id.index()] {
                map[node.id.index()] = Some(out.add_node(node.kind, node.label.clone(), node.corpus));
            }
        }
        let mut remapped: Vec<(NodeId, NodeId)> = edges
            .iter()
            .filter_map(|&(u, v)| Some((map[u.index()]?, map[v.index()]?)))
            .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
            .collect();
        remapped.sort_unstable();
        remapped.dedup();
        for (a, b) in remapped {
            out.add_edge(a, b);
        }
        out
    }

    /// Unweighted single-source distances (`u32::MAX` = unreachable).
    pub fn bfs_distances(&self, source: NodeId) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.nodes.len()];
        let mut queue = std::collections::VecDeque::new();
        dist[source.index()] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let d = dist[u.index()] + 1;
            for &v in self.neighbors(u) {
                if dist[v.index()] == u32::MAX {
                    dist[v.index()] = d;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn distance(&self, from: NodeId, to: NodeId) -> Option<u32> {
        let d = self.bfs_distances(from)[to.index()];
        (d != u32::MAX).then_some(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edges_are_simple_and_undirected() {
        let mut g = Graph::new();
        let a = g.add_node(NodeKind::DocMeta, "doc1:a", Origin::First);
        let x = g.add_node(NodeKind::Data, "x", Origin::First);
        assert_eq!(g.add_node(NodeKind::Data, "x", Origin::Second), x);
        assert!(g.add_edge(a, x));
        assert!(!g.add_edge(x, a));
        assert!(!g.add_edge(a, a));
        assert_eq!(g.edge_count(), 1);
        assert!(g.has_edge(x, a));
        assert_eq!(g.edges().collect::<Vec<_>>(), [(a, x)]);
    }

    #[test]
    fn retain_compacts_ids() {
        let mut g = Graph::new();
        let ids: Vec<_> = (0..4)
            .map(|i| g.add_node(NodeKind::Data, format!("n{i}"), Origin::First))
            .collect();
        g.add_edge(ids[0], ids[1]);
        g.add_edge(ids[1], ids[2]);
        g.add_edge(ids[2], ids[3]);
        let (h, map) = g.retain(&[true, false, true, true]);
        assert_eq!(h.node_count(), 3);
        assert_eq!(h.edge_count(), 1);
        assert_eq!(map[1], None);
        assert_eq!(h.node(map[3].unwrap()).label, "n3");
        assert_eq!(g.distance(ids[0], ids[3]), Some(3));
        assert_eq!(h.distance(map[0].unwrap(), map[3].unwrap()), None);
    }

    #[test]
    fn labels_are_namespaced() {
        assert_eq!(doc_label(2, "p 1"), "doc2:p_1");
        assert_eq!(column_label("release year"), "col:release_year");
    }
}
