mod common;

use common::{random_graph, rng};
use graphmatch::walks::{generate_walks, WalkConfig, WalkCorpus};
use graphmatch::Exec;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn walks_follow_edges(seed in any::<u64>(), num_walks in 1usize..5, walk_len in 1usize..12) {
        let g = random_graph(&mut rng(seed), 80);
        let cfg = WalkConfig { num_walks, walk_len, seed, literal: false };
        let w = generate_walks(&g, &cfg, Exec::Sequential).unwrap();
        let starts = g.ids().filter(|&id| g.degree(id) > 0).count();
        prop_assert_eq!(w.sentences.len(), starts * num_walks);
        for s in &w.sentences {
            prop_assert_eq!(s.len(), walk_len);
            for pair in s.windows(2) {
                let u = g.find(&w.labels[pair[0] as usize]).unwrap();
                let v = g.find(&w.labels[pair[1] as usize]).unwrap();
                prop_assert!(g.has_edge(u, v));
            }
        }
        prop_assert_eq!(&generate_walks(&g, &cfg, Exec::Parallel).unwrap(), &w);
    }

    #[test]
    fn literal_walks_stay_next_to_the_start(seed in any::<u64>()) {
        let g = random_graph(&mut rng(seed), 60);
        let cfg = WalkConfig { num_walks: 2, walk_len: 6, seed, literal: true };
        let w = generate_walks(&g, &cfg, Exec::Sequential).unwrap();
        for s in &w.sentences {
            let start = g.find(&w.labels[s[0] as usize]).unwrap();
            for &t in &s[1..] {
                prop_assert!(g.has_edge(start, g.find(&w.labels[t as usize]).unwrap()));
            }
        }
    }
}

#[test]
fn text_roundtrip_and_seed_sensitivity() {
    let g = random_graph(&mut rng(11), 100);
    let cfg = WalkConfig {
        num_walks: 3,
        walk_len: 8,
        seed: 5,
        literal: false,
    };
    let w = generate_walks(&g, &cfg, Exec::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("walks.txt");
    w.write_text(&p).unwrap();
    let back = WalkCorpus::read_text(&p).unwrap();
    let text = |c: &WalkCorpus| -> Vec<Vec<String>> {
        (0..c.sentences.len())
            .map(|i| c.sentence_labels(i).map(String::from).collect())
            .collect()
    };
    assert_eq!(text(&back), text(&w));
    let other = generate_walks(&g, &WalkConfig { seed: 6, ..cfg }, Exec::default()).unwrap();
    assert_ne!(other, w);
}
