mod common;

use std::path::Path;

use graphmatch::corpus::{Corpus, CorpusKind, Document};
use graphmatch::eval::GroundTruth;
use graphmatch::pipeline::{pipeline, run, run_stage, sweep, Artifacts, Manifest, PipelineConfig, Stage};
use graphmatch::Error;

fn toy(out: &Path) -> PipelineConfig {
    let dir = common::data_dir().join("movies");
    PipelineConfig {
        first: dir.join("movies.csv"),
        first_kind: CorpusKind::Table,
        second: dir.join("reviews.jsonl"),
        second_kind: CorpusKind::PlainText,
        truth: Some(dir.join("truth.tsv")),
        dim: 24,
        num_walks: 20,
        k: vec![1, 2],
        seed: 3,
        out: out.to_path_buf(),
        ..PipelineConfig::default()
    }
}

#[test]
fn match_before_train_names_the_missing_stage() {
    let dir = tempfile::tempdir().unwrap();
    let err = run_stage(Stage::Match, &toy(dir.path())).unwrap_err();
    assert!(matches!(err, Error::MissingArtifact { run_first: "train", .. }));
    assert!(err.to_string().contains("run train first"), "{err}");
    let err = run_stage(Stage::Walk, &toy(dir.path())).unwrap_err();
    assert!(err.to_string().contains("run build first"), "{err}");
}

#[test]
fn toy_pipeline_ranks_t2_for_p1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = toy(dir.path());
    let (manifests, report) = pipeline(&cfg).unwrap();
    assert_eq!(
        manifests.iter().map(|m| m.stage.as_str()).collect::<Vec<_>>(),
        ["build", "walk", "train", "match", "eval"]
    );
    let rankings = std::fs::read_to_string(Artifacts::new(dir.path()).rankings()).unwrap();
    assert!(rankings.lines().any(|l| l.starts_with("p1\t1\tt2\t")), "{rankings}");
    let report = report.unwrap();
    assert_eq!(report.queries_evaluated, 2);
    assert!(report.mrr > 0.0);
}

fn manifests(dir: &Path) -> Vec<Manifest> {
    Stage::ALL
        .iter()
        .filter_map(|&s| Manifest::read(&Artifacts::new(dir).manifest(s)).ok())
        .collect()
}

#[test]
fn reruns_and_manual_chaining_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg_a = PipelineConfig {
        resource: Some(common::data_dir().join("movies/resource.tsv")),
        beta: Some(0.8),
        ..toy(a.path())
    };
    let cfg_b = PipelineConfig {
        out: b.path().to_path_buf(),
        ..cfg_a.clone()
    };
    pipeline(&cfg_a).unwrap();
    for stage in Stage::ALL {
        run_stage(stage, &cfg_b).unwrap();
    }
    let (ma, mb) = (manifests(a.path()), manifests(b.path()));
    assert_eq!(ma.len(), 7);
    for (x, y) in ma.iter().zip(&mb) {
        assert_eq!(
            (&x.stage, &x.config_hash, &x.outputs),
            (&y.stage, &y.config_hash, &y.outputs)
        );
        let local = |m: &Manifest| -> Vec<(String, String)> {
            m.inputs
                .iter()
                .filter(|(k, _)| !k.starts_with('/'))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect()
        };
        assert_eq!(local(x), local(y));
    }
    let art = Artifacts::new(a.path());
    assert!(art.expanded().join("nodes.tsv").exists());
    assert!(art.compressed().join("edges.tsv").exists());
}

#[test]
fn compression_is_a_no_op_on_a_path_graph() {
    let first = Corpus::new("a", CorpusKind::PlainText, vec![Document::text("x", "beta")]).unwrap();
    let second = Corpus::new("b", CorpusKind::PlainText, vec![Document::text("y", "beta")]).unwrap();
    let truth = GroundTruth::from_pairs([("y", "x")]);
    let cfg = PipelineConfig {
        dim: 8,
        num_walks: 5,
        ..PipelineConfig::default()
    };
    let plain = run(&cfg, &first, &second, Some(&truth)).unwrap();
    let squeezed = run(
        &PipelineConfig {
            beta: Some(1.0),
            ..cfg.clone()
        },
        &first,
        &second,
        Some(&truth),
    )
    .unwrap();
    assert_eq!(plain.graph.node_count(), 3);
    assert_eq!(squeezed.graph, plain.graph);
    assert_eq!(squeezed.rankings, plain.rankings);
    assert_eq!(squeezed.report, plain.report);
}

#[test]
fn walk_length_sweep_writes_one_row_per_setting() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig {
        dim: 8,
        num_walks: 5,
        epochs: 1,
        ..toy(dir.path())
    };
    let rows = sweep(&cfg, &[5, 10, 20, 30]).unwrap();
    assert_eq!(rows.iter().map(|r| r.walk_len).collect::<Vec<_>>(), [5, 10, 20, 30]);
    let table = std::fs::read_to_string(dir.path().join("sweep.tsv")).unwrap();
    assert_eq!(table.lines().count(), 5);
    assert!(table.starts_with("walk_len\tMRR\tMAP@1\tMAP@2\n"));
    assert!(dir.path().join("sweep/walk_len_20/report.json").exists());
}

#[test]
fn multi_worker_pipeline_completes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig {
        workers: 3,
        ..toy(dir.path())
    };
    let (_, report) = pipeline(&cfg).unwrap();
    assert_eq!(report.unwrap().queries_evaluated, 2);
}

#[test]
fn sub_seeds_drive_every_stochastic_stage() {
    let (first, second, truth) = common::movies();
    let cfg = PipelineConfig {
        dim: 8,
        num_walks: 5,
        beta: Some(0.5),
        ..PipelineConfig::default()
    };
    let a = run(&cfg, &first, &second, Some(&truth)).unwrap();
    let b = run(&cfg, &first, &second, Some(&truth)).unwrap();
    assert_eq!(a.walks, b.walks);
    assert_eq!(a.embeddings.input.as_slice(), b.embeddings.input.as_slice());
    let c = run(&PipelineConfig { seed: 1, ..cfg }, &first, &second, Some(&truth)).unwrap();
    assert_ne!(a.walks, c.walks);
}
