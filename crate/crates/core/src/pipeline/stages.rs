use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use log::{info, warn};

use super::config::{PipelineConfig, QuerySide};
use super::manifest::{hashes, Manifest};
use crate::compress::msp_compress_traced;
use crate::corpus::{load_corpus, Corpus, CorpusKind};
use crate::embed::{self, EmbeddingMatrix};
use crate::error::{Error, Result};
use crate::eval::{evaluate, EvalReport, GroundTruth};
use crate::exec::Exec;
use crate::expand::{expand_without_pruning, prune_sinks, ExternalResource};
use crate::graph::{build_graph, merge_nodes_with, read_graph, seeding_order, write_graph, Graph, MergeEntry};
use crate::matching::{
    candidates, combine_rankings, read_rankings, score_table, top_k_match, write_rankings, Candidate, MatchRanking,
};
use crate::vectors::Vectors;
use crate::walks::{generate_walks, WalkCorpus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Build,
    Expand,
    Compress,
    Walk,
    Train,
    Match,
    Eval,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::Build,
        Stage::Expand,
        Stage::Compress,
        Stage::Walk,
        Stage::Train,
        Stage::Match,
        Stage::Eval,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Build => "build",
            Stage::Expand => "expand",
            Stage::Compress => "compress",
            Stage::Walk => "walk",
            Stage::Train => "train",
            Stage::Match => "match",
            Stage::Eval => "eval",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown stage `{s}`")))
    }
}

/// Artifact locations under the output directory.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub root: PathBuf,
}

impl Artifacts {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Artifacts { root: root.into() }
    }

    pub fn graph(&self) -> PathBuf {
        self.root.join("graph")
    }
    pub fn expanded(&self) -> PathBuf {
        self.root.join("graph_expanded")
    }
    pub fn compressed(&self) -> PathBuf {
        self.root.join("graph_compressed")
    }
    pub fn merge_log(&self) -> PathBuf {
        self.root.join("merge_log.tsv")
    }
    pub fn pruned(&self) -> PathBuf {
        self.root.join("pruned.txt")
    }
    pub fn walks(&self) -> PathBuf {
        self.root.join("walks.txt")
    }
    pub fn vectors(&self) -> PathBuf {
        self.root.join("vectors.txt")
    }
    pub fn rankings(&self) -> PathBuf {
        self.root.join("rankings.tsv")
    }
    pub fn report(&self) -> PathBuf {
        self.root.join("report.json")
    }
    pub fn manifest(&self, stage: Stage) -> PathBuf {
        self.root.join("manifests").join(format!("{stage}.json"))
    }
}

fn graph_files(dir: &Path) -> [PathBuf; 2] {
    [dir.join("nodes.tsv"), dir.join("edges.tsv")]
}

/// The built graph and the graph side assigned to the user's first corpus.
#[derive(Debug, Clone)]
pub struct Built {
    pub graph: Graph,
    pub merges: Vec<MergeEntry>,
    /// 1 if the user's first corpus seeds the data nodes, else 2.
    pub first_side: u8,
}

/// Graph side of the user's first and second corpus.
fn sides(first: &Corpus, second: &Corpus) -> (u8, u8) {
    if seeding_order(first, second) {
        (1, 2)
    } else {
        (2, 1)
    }
}

pub fn build(cfg: &PipelineConfig, first: &Corpus, second: &Corpus, external: Option<&Vectors>) -> Result<Built> {
    let (s1, _) = sides(first, second);
    let (a, b) = if s1 == 1 { (first, second) } else { (second, first) };
    let g = build_graph(a, b, &cfg.build_config())?;
    let (graph, merges) = merge_nodes_with(&g, &cfg.merge_policy(), external, Exec::from_workers(cfg.workers))?;
    info!(
        "built graph: {} nodes, {} edges, {} merges",
        graph.node_count(),
        graph.edge_count(),
        merges.len()
    );
    Ok(Built {
        graph,
        merges,
        first_side: s1,
    })
}

/// Expansion followed by sink pruning; returns the pruned labels too.
pub fn expand(g: &Graph, resource: &ExternalResource) -> (Graph, Vec<String>) {
    let expanded = expand_without_pruning(g, resource);
    prune_sinks(&expanded)
}

pub fn compress(cfg: &PipelineConfig, g: &Graph) -> Result<Graph> {
    let c = cfg
        .compression_config()
        .ok_or_else(|| Error::Config("compression needs --beta".into()))?;
    let out = msp_compress_traced(g, &c, Exec::from_workers(cfg.workers))?;
    for label in &out.unreachable {
        warn!("{label} has no path to the other corpus");
    }
    Ok(out.graph)
}

/// True if the user's first corpus supplies the queries.
fn first_queries(cfg: &PipelineConfig, first: &Corpus, second: &Corpus) -> bool {
    match cfg.queries {
        QuerySide::Larger => first.len() > second.len(),
        QuerySide::Smaller => first.len() <= second.len(),
        QuerySide::First => true,
        QuerySide::Second => false,
    }
}

/// Query and target candidates per the configured direction.
pub fn candidates_for(cfg: &PipelineConfig, first: &Corpus, second: &Corpus) -> (Vec<Candidate>, Vec<Candidate>) {
    let (s1, s2) = sides(first, second);
    let c1 = candidates(first, s1);
    let c2 = candidates(second, s2);
    if first_queries(cfg, first, second) {
        (c1, c2)
    } else {
        (c2, c1)
    }
}

pub fn rank(
    cfg: &PipelineConfig,
    first: &Corpus,
    second: &Corpus,
    vectors: &Vectors,
    external: Option<&[MatchRanking]>,
) -> Result<Vec<MatchRanking>> {
    let (queries, targets) = candidates_for(cfg, first, second);
    let k = cfg.k.iter().copied().max().unwrap_or(1);
    let exec = Exec::from_workers(cfg.workers);
    match external {
        None => top_k_match(&queries, &targets, vectors, k, exec),
        Some(ext) => {
            let own = top_k_match(&queries, &targets, vectors, targets.len(), exec)?;
            combine_rankings(&score_table(&own), &score_table(ext), cfg.ensemble_weight, k)
        }
    }
}

/// Ground truth aligned with the rankings' queries: unannotated queries get an
/// empty (excluded) set, a truth file keyed by targets is inverted, and target
/// taxonomy paths are attached when the target corpus is structured.
pub fn truth_for(raw: &GroundTruth, queries_from: &Corpus, targets_from: &Corpus) -> Result<GroundTruth> {
    let is_query = |id: &str| queries_from.get(id).is_some();
    let is_target = |id: &str| targets_from.get(id).is_some();
    let mut truth =
        if !raw.pairs.is_empty() && !raw.pairs.keys().any(|q| is_query(q)) && raw.pairs.keys().all(|q| is_target(q)) {
            warn!("ground truth is keyed by target ids; inverting it");
            GroundTruth::from_pairs(
                raw.pairs
                    .iter()
                    .flat_map(|(t, qs)| qs.iter().map(move |q| (q.clone(), t.clone()))),
            )
        } else {
            raw.clone()
        };
    let unknown: BTreeSet<&String> = truth.pairs.values().flatten().filter(|t| !is_target(t)).collect();
    if !unknown.is_empty() {
        return Err(Error::Config(format!(
            "ground truth names targets missing from the target corpus: {}",
            unknown.into_iter().take(5).cloned().collect::<Vec<_>>().join(", ")
        )));
    }
    let mut missing = 0;
    for d in queries_from.documents() {
        truth.pairs.entry(d.id.clone()).or_insert_with(|| {
            missing += 1;
            BTreeSet::new()
        });
    }
    if missing > 0 {
        info!("{missing} queries have no ground truth and are excluded");
    }
    if targets_from.kind == CorpusKind::StructuredText {
        for d in targets_from.documents() {
            truth.paths.insert(d.id.clone(), targets_from.taxonomy_path(&d.id)?);
        }
    }
    Ok(truth)
}

pub fn query_corpora<'a>(cfg: &PipelineConfig, first: &'a Corpus, second: &'a Corpus) -> (&'a Corpus, &'a Corpus) {
    if first_queries(cfg, first, second) {
        (first, second)
    } else {
        (second, first)
    }
}

/// Everything produced by an in-memory run.
#[derive(Debug, Clone)]
pub struct Run {
    pub built: Built,
    pub graph: Graph,
    pub walks: WalkCorpus,
    pub embeddings: EmbeddingMatrix,
    pub rankings: Vec<MatchRanking>,
    pub report: Option<EvalReport>,
}

/// All stages in memory, without touching the output directory.
pub fn run(cfg: &PipelineConfig, first: &Corpus, second: &Corpus, truth: Option<&GroundTruth>) -> Result<Run> {
    cfg.validate()?;
    let external = load_external_vectors(cfg)?;
    let built = build(cfg, first, second, external.as_ref())?;
    let mut graph = built.graph.clone();
    if let Some(path) = &cfg.resource {
        graph = expand(&graph, &ExternalResource::load(path)?).0;
    }
    if cfg.beta.is_some() {
        graph = compress(cfg, &graph)?;
    }
    let walks = generate_walks(&graph, &cfg.walk_config(), Exec::from_workers(cfg.workers))?;
    let embeddings = embed::train(&walks, &cfg.train_config())?;
    let ext = cfg.external_scores.as_deref().map(read_rankings).transpose()?;
    let rankings = rank(cfg, first, second, embeddings.vectors(), ext.as_deref())?;
    let report = match truth {
        Some(t) => {
            let (q, tg) = query_corpora(cfg, first, second);
            Some(evaluate(&rankings, &truth_for(t, q, tg)?, &cfg.k)?)
        }
        None => None,
    };
    Ok(Run {
        built,
        graph,
        walks,
        embeddings,
        rankings,
        report,
    })
}

fn load_external_vectors(cfg: &PipelineConfig) -> Result<Option<Vectors>> {
    cfg.vectors.as_deref().map(Vectors::read_text).transpose()
}

fn load_corpora(cfg: &PipelineConfig) -> Result<(Corpus, Corpus)> {
    Ok((
        load_corpus(&cfg.first, cfg.first_kind)?,
        load_corpus(&cfg.second, cfg.second_kind)?,
    ))
}

fn require(path: &Path, stage: Stage, needs: &'static str, run_first: &'static str) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(Error::MissingArtifact {
            stage: stage.as_str(),
            artifact: format!("{needs} ({})", path.display()),
            run_first,
        })
    }
}

/// Directory of the graph the walk stage reads, given which optional stages are configured.
pub fn walk_input(cfg: &PipelineConfig) -> (PathBuf, &'static str) {
    let a = Artifacts::new(&cfg.out);
    if cfg.beta.is_some() {
        (a.compressed(), "compress")
    } else if cfg.resource.is_some() {
        (a.expanded(), "expand")
    } else {
        (a.graph(), "build")
    }
}

fn mkdir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_lines(path: &Path, lines: impl IntoIterator<Item = String>) -> Result<()> {
    let mut s = String::new();
    for l in lines {
        s.push_str(&l);
        s.push('\n');
    }
    fs::write(path, s).map_err(|e| Error::io(path, e))
}

/// Runs one stage from the artifacts on disk and writes its outputs and manifest.
pub fn run_stage(stage: Stage, cfg: &PipelineConfig) -> Result<Manifest> {
    cfg.validate()?;
    let a = Artifacts::new(&cfg.out);
    mkdir(&a.root)?;
    let start = Instant::now();
    let mut inputs: Vec<PathBuf> = Vec::new();
    let exec = Exec::from_workers(cfg.workers);

    let outputs: Vec<PathBuf> = match stage {
        Stage::Build => {
            let (first, second) = load_corpora(cfg)?;
            inputs.extend([cfg.first.clone(), cfg.second.clone()]);
            if let Some(v) = &cfg.vectors {
                inputs.push(v.clone());
            }
            let built = build(cfg, &first, &second, load_external_vectors(cfg)?.as_ref())?;
            write_graph(&built.graph, &a.graph())?;
            write_lines(
                &a.merge_log(),
                built
                    .merges
                    .iter()
                    .map(|m| format!("{}\t{}\t{}", m.survivor, m.absorbed, m.reason.as_str())),
            )?;
            [graph_files(&a.graph()).to_vec(), vec![a.merge_log()]].concat()
        }
        Stage::Expand => {
            let resource_path = cfg
                .resource
                .clone()
                .ok_or_else(|| Error::Config("expand needs --resource".into()))?;
            require(&a.graph(), stage, "the graph", "build")?;
            let g = read_graph(&a.graph())?;
            let (expanded, pruned) = expand(&g, &ExternalResource::load(&resource_path)?);
            info!(
                "expanded graph: {} nodes, {} pruned",
                expanded.node_count(),
                pruned.len()
            );
            write_graph(&expanded, &a.expanded())?;
            write_lines(&a.pruned(), pruned)?;
            inputs.extend(graph_files(&a.graph()));
            inputs.push(resource_path);
            [graph_files(&a.expanded()).to_vec(), vec![a.pruned()]].concat()
        }
        Stage::Compress => {
            let (src, prev) = if cfg.resource.is_some() {
                (a.expanded(), "expand")
            } else {
                (a.graph(), "build")
            };
            require(&src, stage, "the graph", prev)?;
            let g = read_graph(&src)?;
            let c = compress(cfg, &g)?;
            info!("compressed graph: {} of {} nodes kept", c.node_count(), g.node_count());
            write_graph(&c, &a.compressed())?;
            inputs.extend(graph_files(&src));
            graph_files(&a.compressed()).to_vec()
        }
        Stage::Walk => {
            let (src, prev) = walk_input(cfg);
            require(&src, stage, "the graph", prev)?;
            let g = read_graph(&src)?;
            let walks = generate_walks(&g, &cfg.walk_config(), exec)?;
            walks.write_text(&a.walks())?;
            inputs.extend(graph_files(&src));
            vec![a.walks()]
        }
        Stage::Train => {
            require(&a.walks(), stage, "the walk corpus", "walk")?;
            let walks = WalkCorpus::read_text(&a.walks())?;
            let report = embed::train_report(&walks, &cfg.train_config())?;
            info!("training loss per epoch: {:?}", report.epoch_loss);
            embed::save_vectors(&report.matrix, &a.vectors())?;
            inputs.push(a.walks());
            vec![a.vectors()]
        }
        Stage::Match => {
            require(&a.vectors(), stage, "trained vectors", "train")?;
            let (first, second) = load_corpora(cfg)?;
            let vectors = embed::load_vectors(&a.vectors())?;
            let ext = cfg.external_scores.as_deref().map(read_rankings).transpose()?;
            let rankings = rank(cfg, &first, &second, &vectors, ext.as_deref())?;
            write_rankings(&rankings, &a.rankings())?;
            inputs.extend([a.vectors(), cfg.first.clone(), cfg.second.clone()]);
            inputs.extend(cfg.external_scores.clone());
            vec![a.rankings()]
        }
        Stage::Eval => {
            require(&a.rankings(), stage, "rankings", "match")?;
            let truth_path = cfg
                .truth
                .clone()
                .ok_or_else(|| Error::Config("eval needs --truth".into()))?;
            let (first, second) = load_corpora(cfg)?;
            let (q, t) = query_corpora(cfg, &first, &second);
            let truth = truth_for(&GroundTruth::load(&truth_path)?, q, t)?;
            let rankings = read_rankings(&a.rankings())?;
            let report = evaluate(&rankings, &truth, &cfg.k)?;
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            fs::write(a.report(), json + "\n").map_err(|e| Error::io(a.report(), e))?;
            inputs.extend([a.rankings(), truth_path, cfg.first.clone(), cfg.second.clone()]);
            vec![a.report()]
        }
    };

    let manifest = Manifest {
        stage: stage.as_str().to_string(),
        config_hash: cfg.hash(),
        inputs: hashes(&a.root, inputs.iter().map(PathBuf::as_path))?,
        outputs: hashes(&a.root, outputs.iter().map(PathBuf::as_path))?,
        seconds: start.elapsed().as_secs_f64(),
    };
    manifest.write(&a.manifest(stage))?;
    Ok(manifest)
}

/// Runs every configured stage in order through the artifact files. Expand
/// and compress are skipped when unset, eval when no truth file is given.
pub fn pipeline(cfg: &PipelineConfig) -> Result<(Vec<Manifest>, Option<EvalReport>)> {
    let mut manifests = Vec::new();
    for stage in Stage::ALL {
        let skip = match stage {
            Stage::Expand => cfg.resource.is_none(),
            Stage::Compress => cfg.beta.is_none(),
            Stage::Eval => cfg.truth.is_none(),
            _ => false,
        };
        if skip {
            continue;
        }
        manifests.push(run_stage(stage, cfg)?);
    }
    let report = if cfg.truth.is_some() {
        let a = Artifacts::new(&cfg.out);
        let text = fs::read_to_string(a.report()).map_err(|e| Error::io(a.report(), e))?;
        Some(serde_json::from_str(&text).map_err(|e| Error::parse(a.report(), e.line(), e.to_string()))?)
    } else {
        None
    };
    Ok((manifests, report))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub walk_len: usize,
    pub report: EvalReport,
}

/// Re-runs walk, train, match and eval for each walk length on the same
/// graph. Each setting writes its artifacts under `sweep/walk_len_<n>`, and a
/// summary table goes to `sweep.tsv`.
pub fn sweep(cfg: &PipelineConfig, walk_lens: &[usize]) -> Result<Vec<SweepRow>> {
    if cfg.truth.is_none() {
        return Err(Error::Config("a sweep needs --truth".into()));
    }
    for stage in [Stage::Build, Stage::Expand, Stage::Compress] {
        let skip =
            (stage == Stage::Expand && cfg.resource.is_none()) || (stage == Stage::Compress && cfg.beta.is_none());
        if !skip {
            run_stage(stage, cfg)?;
        }
    }
    let (src, _) = walk_input(cfg);
    let base = read_graph(&src)?;
    let mut rows = Vec::new();
    for &len in walk_lens {
        let sub = PipelineConfig {
            walk_len: len,
            resource: None,
            beta: None,
            out: cfg.out.join("sweep").join(format!("walk_len_{len}")),
            ..cfg.clone()
        };
        write_graph(&base, &Artifacts::new(&sub.out).graph())?;
        for stage in [Stage::Walk, Stage::Train, Stage::Match, Stage::Eval] {
            run_stage(stage, &sub)?;
        }
        let path = Artifacts::new(&sub.out).report();
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let report: EvalReport =
            serde_json::from_str(&text).map_err(|e| Error::parse(&path, e.line(), e.to_string()))?;
        rows.push(SweepRow { walk_len: len, report });
    }
    let ks = &cfg.k;
    let header = std::iter::once(
        std::iter::once("walk_len".to_string())
            .chain(std::iter::once("MRR".to_string()))
            .chain(ks.iter().map(|k| format!("MAP@{k}")))
            .collect::<Vec<_>>()
            .join("\t"),
    );
    let body = rows.iter().map(|r| {
        std::iter::once(r.walk_len.to_string())
            .chain(std::iter::once(format!("{:.6}", r.report.mrr)))
            .chain(ks.iter().map(|k| format!("{:.6}", r.report.map_at[k])))
            .collect::<Vec<_>>()
            .join("\t")
    });
    write_lines(&cfg.out.join("sweep.tsv"), header.chain(body))?;
    Ok(rows)
}
