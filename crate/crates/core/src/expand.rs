//! Graph expansion from an external triple resource, followed by sink
//! pruning.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::corpus::normalize_phrase;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeKind, Origin};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub subject: String,
    pub relation: String,
    pub object: String,
}

/// Triples indexed by normalized subject and object. Relation labels are
/// kept for provenance but do not affect expansion.
#[derive(Debug, Clone, Default)]
pub struct ExternalResource {
    triples: Vec<Triple>,
    links: HashMap<String, Vec<String>>,
}

impl ExternalResource {
    pub fn from_triples(triples: impl IntoIterator<Item = Triple>) -> Self {
        let mut r = ExternalResource::default();
        for t in triples {
            r.insert(t);
        }
        r
    }

    fn insert(&mut self, t: Triple) {
        if let (Some(s), Some(o)) = (normalize_phrase(&t.subject), normalize_phrase(&t.object)) {
            if s != o {
                self.links.entry(s.clone()).or_default().push(o.clone());
                self.links.entry(o).or_default().push(s);
            }
        }
        self.triples.push(t);
    }

    /// Reads `subject<TAB>relation<TAB>object` lines.
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = ExternalResource::default();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let [subject, relation, object] = cols[..] else {
                return Err(Error::parse(path, i + 1, "expected subject<TAB>relation<TAB>object"));
            };
            r.insert(Triple {
                subject: subject.to_string(),
                relation: relation.to_string(),
                object: object.to_string(),
            });
        }
        Ok(r)
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    /// Normalized terms related to `term` as subject or object.
    pub fn connections(&self, term: &str) -> &[String] {
        self.links.get(term).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Adds every resource connection of every pre-existing Data node, without
/// pruning. New nodes are tagged [`Origin::External`].
pub fn expand_without_pruning(g: &Graph, e: &ExternalResource) -> Graph {
    let mut out = g.clone();
    let data: Vec<_> = g
        .nodes()
        .iter()
        .filter(|n| n.kind == NodeKind::Data)
        .map(|n| n.id)
        .collect();
    for id in data {
        let label = g.node(id).label.clone();
        for other in e.connections(&label) {
            let m = match out.find(other) {
                Some(m) if out.node(m).kind == NodeKind::Data => m,
                Some(_) => continue,
                None => out.add_node(NodeKind::Data, other.clone(), Origin::External),
            };
            out.add_edge(id, m);
        }
    }
    out
}

/// Expansion followed by [`prune_sinks`].
pub fn expand_graph(g: &Graph, e: &ExternalResource) -> Graph {
    prune_sinks(&expand_without_pruning(g, e)).0
}

/// Removes Data nodes of degree <= 1 until none remain; metadata nodes are
/// never removed. Returns the pruned graph and the removed labels.
pub fn prune_sinks(g: &Graph) -> (Graph, Vec<String>) {
    let n = g.node_count();
    let mut alive = vec![true; n];
    let mut degree: Vec<usize> = g.ids().map(|id| g.degree(id)).collect();
    let mut stack: Vec<usize> = (0..n)
        .filter(|&i| g.nodes()[i].kind == NodeKind::Data && degree[i] <= 1)
        .collect();
    let mut queued: HashSet<usize> = stack.iter().copied().collect();
    while let Some(i) = stack.pop() {
        alive[i] = false;
        for &m in g.neighbors(crate::graph::NodeId(i as u32)) {
            let j = m.index();
            if !alive[j] {
                continue;
            }
            degree[j] -= 1;
            if degree[j] <= 1 && g.nodes()[j].kind == NodeKind::Data && queued.insert(j) {
                stack.push(j);
            }
        }
    }
    let removed = (0..n)
        .filter(|&i| !alive[i])
        .map(|i| g.nodes()[i].label.clone())
        .collect();
    (g.retain(&alive).0, removed)
}
