//! `nodes.tsv` (id, kind, corpus, label) and `edges.tsv` (id, id) persistence.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{Graph, NodeId, NodeKind, Origin};
use crate::error::{Error, Result};

pub fn write_graph(g: &Graph, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let nodes_path = dir.join("nodes.tsv");
    let mut w = BufWriter::new(File::create(&nodes_path).map_err(|e| Error::io(&nodes_path, e))?);
    for n in g.nodes() {
        writeln!(w, "{}\t{}\t{}\t{}", n.id.0, n.kind.as_str(), n.corpus.as_str(), n.label)
            .map_err(|e| Error::io(&nodes_path, e))?;
    }
    w.flush().map_err(|e| Error::io(&nodes_path, e))?;

    let edges_path = dir.join("edges.tsv");
    let mut w = BufWriter::new(File::create(&edges_path).map_err(|e| Error::io(&edges_path, e))?);
    for (u, v) in g.edges() {
        writeln!(w, "{}\t{}", u.0, v.0).map_err(|e| Error::io(&edges_path, e))?;
    }
    w.flush().map_err(|e| Error::io(&edges_path, e))
}

fn parse_kind(s: &str) -> Option<NodeKind> {
    match s {
        "data" => Some(NodeKind::Data),
        "doc" => Some(NodeKind::DocMeta),
        "column" => Some(NodeKind::ColumnMeta),
        _ => None,
    }
}

fn parse_origin(s: &str) -> Option<Origin> {
    match s {
        "first" => Some(Origin::First),
        "second" => Some(Origin::Second),
        "external" => Some(Origin::External),
        _ => None,
    }
}

pub fn read_graph(dir: &Path) -> Result<Graph> {
    let nodes_path = dir.join("nodes.tsv");
    let file = File::open(&nodes_path).map_err(|e| Error::io(&nodes_path, e))?;
    let mut g = Graph::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(&nodes_path, e))?;
        let bad = |msg: &str| Error::parse(&nodes_path, i + 1, msg);
        let mut cols = line.splitn(4, '\t');
        let (Some(id), Some(kind), Some(origin), Some(label)) = (cols.next(), cols.next(), cols.next(), cols.next())
        else {
            return Err(bad("expected 4 tab-separated columns"));
        };
        let id: u32 = id.parse().map_err(|_| bad("bad node id"))?;
        let kind = parse_kind(kind).ok_or_else(|| bad("bad node kind"))?;
        let origin = parse_origin(origin).ok_or_else(|| bad("bad corpus tag"))?;
        if id as usize != g.node_count() {
            return Err(bad("node ids must be dense and sorted"));
        }
        if g.find(label).is_some() {
            return Err(bad("duplicate label"));
        }
        g.add_node(kind, label, origin);
    }

    let edges_path = dir.join("edges.tsv");
    let file = File::open(&edges_path).map_err(|e| Error::io(&edges_path, e))?;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(&edges_path, e))?;
        let bad = |msg: &str| Error::parse(&edges_path, i + 1, msg);
        let (u, v) = line.split_once('\t').ok_or_else(|| bad("expected 2 columns"))?;
        let u: u32 = u.parse().map_err(|_| bad("bad node id"))?;
        let v: u32 = v.parse().map_err(|_| bad("bad node id"))?;
        if u as usize >= g.node_count() || v as usize >= g.node_count() {
            return Err(bad("edge refers to unknown node"));
        }
        if !g.add_edge(NodeId(u), NodeId(v)) {
            return Err(bad("self-loop or duplicate edge"));
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let mut g = Graph::new();
        let t = g.add_node(NodeKind::DocMeta, "doc1:t1", Origin::First);
        let c = g.add_node(NodeKind::ColumnMeta, "col:director", Origin::First);
        let x = g.add_node(NodeKind::Data, "shyamalan", Origin::First);
        let e = g.add_node(NodeKind::Data, "bhavna_vaswani", Origin::External);
        g.add_edge(t, x);
        g.add_edge(c, x);
        g.add_edge(x, e);
        let dir = tempfile::tempdir().unwrap();
        write_graph(&g, dir.path()).unwrap();
        let h = read_graph(dir.path()).unwrap();
        assert_eq!(g, h);
        let text = std::fs::read_to_string(dir.path().join("edges.tsv")).unwrap();
        assert_eq!(text, "0\t2\n1\t2\n2\t3\n");
    }

    #[test]
    fn rejects_dangling_edge() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("nodes.tsv"), "0\tdata\tfirst\ta\n").unwrap();
        std::fs::write(dir.path().join("edges.tsv"), "0\t5\n").unwrap();
        assert!(matches!(read_graph(dir.path()), Err(Error::Parse { line: 1, .. })));
    }
}
