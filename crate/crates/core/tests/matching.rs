mod common;

use graphmatch::matching::{top_k_match, Candidate, MatchRanking};
use graphmatch::vectors::Vectors;
use graphmatch::Exec;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn instance(seed: u64) -> (Vec<Candidate>, Vec<Candidate>, Vectors) {
    let mut rng = common::rng(seed);
    let dim = rng.random_range(1..8);
    let nq = rng.random_range(1..10);
    let nt = rng.random_range(1..30);
    let mut v = Vectors::new(dim);
    let mut add = |name: String, rng: &mut rand_chacha::ChaCha8Rng| {
        // Small integer grid so exact score ties happen.
        let row: Vec<f32> = (0..dim).map(|_| rng.random_range(-2..=2) as f32).collect();
        v.push(name, &row).unwrap();
    };
    for i in 0..nq {
        add(format!("doc2:q{i}"), &mut rng);
    }
    for i in 0..nt {
        add(format!("doc1:t{i}"), &mut rng);
    }
    let q = (0..nq)
        .map(|i| Candidate::new(format!("q{i}"), format!("doc2:q{i}")))
        .collect();
    let t = (0..nt)
        .map(|i| Candidate::new(format!("t{i}"), format!("doc1:t{i}")))
        .collect();
    (q, t, v)
}

/// Full cosine matrix in f64, sorted by (score desc, id asc).
fn brute_force(q: &[Candidate], t: &[Candidate], v: &Vectors, k: usize) -> Vec<Vec<String>> {
    let cos = |a: &[f32], b: &[f32]| -> f64 {
        let d: f64 = a.iter().zip(b).map(|(x, y)| f64::from(*x) * f64::from(*y)).sum();
        let na: f64 = a.iter().map(|x| f64::from(*x).powi(2)).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|x| f64::from(*x).powi(2)).sum::<f64>().sqrt();
        if na == 0.0 || nb == 0.0 {
            f64::NEG_INFINITY
        } else {
            d / (na * nb)
        }
    };
    q.iter()
        .map(|qq| {
            let mut s: Vec<(f64, &str)> = t
                .iter()
                .map(|tt| {
                    (
                        cos(v.get(&qq.label).unwrap(), v.get(&tt.label).unwrap()),
                        tt.id.as_str(),
                    )
                })
                .collect();
            s.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(b.1)));
            s.into_iter().take(k).map(|(_, id)| id.to_string()).collect()
        })
        .collect()
}

fn ids(r: &[MatchRanking]) -> Vec<Vec<String>> {
    r.iter().map(|x| x.ids().map(String::from).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn equals_dense_all_pairs_sort(seed in any::<u64>(), k in 1usize..40) {
        let (q, t, v) = instance(seed);
        let r = top_k_match(&q, &t, &v, k, Exec::Sequential).unwrap();
        prop_assert_eq!(ids(&r), brute_force(&q, &t, &v, k));
        for x in &r {
            prop_assert_eq!(x.candidates.len(), k.min(t.len()));
            prop_assert!(x.candidates.iter().all(|(_, s)| *s == f64::NEG_INFINITY || (-1.0..=1.0).contains(s)));
        }
        prop_assert_eq!(&top_k_match(&q, &t, &v, k, Exec::Parallel).unwrap(), &r);
    }

    #[test]
    fn target_order_and_scale_do_not_matter(seed in any::<u64>(), k in 1usize..10, exp in -8i32..8) {
        let (q, t, v) = instance(seed);
        let base = ids(&top_k_match(&q, &t, &v, k, Exec::Sequential).unwrap());
        let mut shuffled = t.clone();
        shuffled.shuffle(&mut common::rng(seed ^ 9));
        prop_assert_eq!(&ids(&top_k_match(&q, &shuffled, &v, k, Exec::Sequential).unwrap()), &base);

        // Powers of two scale exactly, so exact score ties survive.
        let scale = 2f32.powi(exp);
        let scaled_rows: Vec<f32> = v.as_slice().iter().map(|x| x * scale).collect();
        let scaled = Vectors::from_rows(v.dim(), v.tokens().to_vec(), scaled_rows);
        prop_assert_eq!(&ids(&top_k_match(&q, &t, &scaled, k, Exec::Sequential).unwrap()), &base);
    }
}

#[test]
fn identical_vector_ranks_first() {
    let mut v = Vectors::new(3);
    v.push("q", &[0.3, -1.0, 2.0]).unwrap();
    v.push("same", &[0.3, -1.0, 2.0]).unwrap();
    v.push("near", &[0.3, -1.0, 1.9]).unwrap();
    let r = top_k_match(
        &[Candidate::new("q", "q")],
        &[Candidate::new("near", "near"), Candidate::new("same", "same")],
        &v,
        2,
        Exec::Sequential,
    )
    .unwrap();
    assert_eq!(r[0].candidates[0].0, "same");
    assert!((r[0].candidates[0].1 - 1.0).abs() < 1e-6);
}
