mod common;

use std::collections::BTreeSet;

use common::{labelled_edges, random_graph, rng};
use graphmatch::compress::{msp_compress_traced, CompressionConfig};
use graphmatch::graph::{Graph, NodeKind};
use graphmatch::Exec;
use proptest::prelude::*;

fn labels(g: &Graph) -> BTreeSet<String> {
    g.nodes().iter().map(|n| n.label.clone()).collect()
}

/// BFS distance in an adjacency list built from scratch.
fn reference_distance(g: &Graph, from: &str, to: &str) -> Option<usize> {
    let n = g.node_count();
    let mut adj = vec![Vec::new(); n];
    for (u, v) in g.edges() {
        adj[u.index()].push(v.index());
        adj[v.index()].push(u.index());
    }
    let s = g.find(from)?.index();
    let t = g.find(to)?.index();
    let mut dist = vec![usize::MAX; n];
    dist[s] = 0;
    let mut queue = std::collections::VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    (dist[t] != usize::MAX).then_some(dist[t])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn msp_invariants(seed in any::<u64>(), beta in 0.05f64..1.5) {
        let g = random_graph(&mut rng(seed), 300);
        let cfg = CompressionConfig { beta, seed: seed ^ 1 };
        let c = msp_compress_traced(&g, &cfg, Exec::Sequential).unwrap();
        let h = &c.graph;

        prop_assert!(labels(h).is_subset(&labels(&g)));
        prop_assert!(labelled_edges(h).is_subset(&labelled_edges(&g)));
        let docs = |x: &Graph| -> BTreeSet<String> {
            x.nodes().iter().filter(|n| n.kind == NodeKind::DocMeta).map(|n| n.label.clone()).collect()
        };
        prop_assert_eq!(docs(h), docs(&g));
        for &(a, b) in &c.sampled {
            let (la, lb) = (&g.node(a).label, &g.node(b).label);
            prop_assert_eq!(reference_distance(h, la, lb), reference_distance(&g, la, lb));
        }

        let bigger = CompressionConfig { beta: beta * 1.7, ..cfg };
        let h2 = msp_compress_traced(&g, &bigger, Exec::Sequential).unwrap().graph;
        prop_assert!(labels(h).is_subset(&labels(&h2)));
        prop_assert!(labelled_edges(h).is_subset(&labelled_edges(&h2)));

        let par = msp_compress_traced(&g, &cfg, Exec::Parallel).unwrap().graph;
        prop_assert_eq!(&par, h);
    }
}
