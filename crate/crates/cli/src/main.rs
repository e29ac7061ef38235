use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use graphmatch::corpus::CorpusKind;
use graphmatch::embed::Model;
use graphmatch::graph::calibrate_gamma;
use graphmatch::pipeline::{self, PipelineConfig, QuerySide, Stage};
use graphmatch::vectors::Vectors;

#[derive(Parser)]
#[command(
    name = "graphmatch",
    version,
    about = "Match text and structured documents through graph embeddings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the term graph from the two corpora and merge equivalent terms.
    Build(Flags),
    /// Add edges from an external triple resource and prune sinks.
    Expand(Flags),
    /// Keep only shortest paths between sampled cross-corpus documents.
    Compress(Flags),
    /// Generate the random-walk corpus.
    Walk(Flags),
    /// Train embeddings on the walks.
    Train(Flags),
    /// Rank target documents for every query document.
    Match(Flags),
    /// Score the rankings against ground truth.
    Eval(Flags),
    /// Run every configured stage in order.
    Pipeline(Flags),
    /// Compare walk lengths on the same graph.
    Sweep {
        #[command(flatten)]
        flags: Flags,
        #[arg(long, value_delimiter = ',', default_value = "5,10,20,30")]
        walk_lens: Vec<usize>,
    },
    /// Print the mean cosine of a synonym list under a vector file.
    Calibrate {
        /// TSV of synonym pairs.
        #[arg(long)]
        synonyms: PathBuf,
        #[arg(long)]
        vectors: PathBuf,
    },
}

#[derive(Args, Default)]
struct Flags {
    /// TOML file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    first: Option<PathBuf>,
    #[arg(long)]
    first_kind: Option<CorpusKind>,
    #[arg(long)]
    second: Option<PathBuf>,
    #[arg(long)]
    second_kind: Option<CorpusKind>,
    #[arg(long)]
    ngrams: Option<usize>,
    /// Keep each document's top-N TF-IDF terms instead of intersecting vocabularies.
    #[arg(long)]
    tfidf: Option<usize>,
    #[arg(long)]
    no_stemming: bool,
    #[arg(long)]
    no_bucketing: bool,
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    vectors: Option<PathBuf>,
    #[arg(long)]
    resource: Option<PathBuf>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    num_walks: Option<usize>,
    #[arg(long)]
    walk_len: Option<usize>,
    #[arg(long)]
    literal_alg4: bool,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    model: Option<Model>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    negatives: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    min_count: Option<usize>,
    #[arg(long)]
    subsample: Option<f64>,
    /// larger, smaller, first or second.
    #[arg(long)]
    queries: Option<QuerySide>,
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long)]
    external_scores: Option<PathBuf>,
    #[arg(long)]
    ensemble_weight: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

macro_rules! set {
    ($cfg:ident, $flags:ident, $($field:ident),*) => {
        $(if let Some(v) = $flags.$field.clone() { $cfg.$field = v; })*
    };
}

macro_rules! set_opt {
    ($cfg:ident, $flags:ident, $($field:ident),*) => {
        $(if let Some(v) = $flags.$field.clone() { $cfg.$field = Some(v); })*
    };
}

impl Flags {
    fn resolve(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                PipelineConfig::from_toml_str(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => PipelineConfig::default(),
        };
        set!(
            cfg,
            self,
            first,
            first_kind,
            second,
            second_kind,
            ngrams,
            num_walks,
            walk_len,
            dim,
            model
        );
        set!(
            cfg,
            self,
            negatives,
            epochs,
            lr,
            min_count,
            queries,
            k,
            ensemble_weight,
            seed,
            workers,
            out
        );
        set_opt!(
            cfg,
            self,
            tfidf,
            bins,
            gamma,
            vectors,
            resource,
            beta,
            window,
            subsample,
            truth,
            external_scores
        );
        if self.no_stemming {
            cfg.stemming = false;
        }
        if self.no_bucketing {
            cfg.bucketing = false;
        }
        if self.literal_alg4 {
            cfg.literal_alg4 = true;
        }
        for (name, path) in [("--first", &cfg.first), ("--second", &cfg.second)] {
            anyhow::ensure!(!path.as_os_str().is_empty(), "{name} is required");
        }
        Ok(cfg)
    }
}

fn read_synonyms(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| match l.split('\t').collect::<Vec<_>>()[..] {
            [a, b] => Ok((a.trim().to_string(), b.trim().to_string())),
            _ => anyhow::bail!("{}:{}: expected two tab-separated terms", path.display(), i + 1),
        })
        .collect()
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let stage = |s: Stage, flags: &Flags| -> Result<()> {
        let cfg = flags.resolve()?;
        let m = pipeline::run_stage(s, &cfg)?;
        log::info!("{} finished in {:.2}s", m.stage, m.seconds);
        for (name, hash) in &m.outputs {
            println!("{name}\t{hash}");
        }
        Ok(())
    };
    match cli.command {
        Command::Build(f) => stage(Stage::Build, &f),
        Command::Expand(f) => stage(Stage::Expand, &f),
        Command::Compress(f) => stage(Stage::Compress, &f),
        Command::Walk(f) => stage(Stage::Walk, &f),
        Command::Train(f) => stage(Stage::Train, &f),
        Command::Match(f) => stage(Stage::Match, &f),
        Command::Eval(f) => stage(Stage::Eval, &f),
        Command::Pipeline(f) => {
            let cfg = f.resolve()?;
            let (manifests, report) = pipeline::pipeline(&cfg)?;
            let total: f64 = manifests.iter().map(|m| m.seconds).sum();
            log::info!("pipeline finished in {total:.2}s");
            match report {
                Some(r) => print_json(&r),
                None => {
                    println!("{}", pipeline::Artifacts::new(&cfg.out).rankings().display());
                    Ok(())
                }
            }
        }
        Command::Sweep { flags, walk_lens } => {
            let cfg = flags.resolve()?;
            let rows = pipeline::sweep(&cfg, &walk_lens)?;
            for r in rows {
                let maps: Vec<String> = r.report.map_at.iter().map(|(k, v)| format!("MAP@{k}={v:.4}")).collect();
                println!("walk_len={}\tMRR={:.4}\t{}", r.walk_len, r.report.mrr, maps.join("\t"));
            }
            Ok(())
        }
        Command::Calibrate { synonyms, vectors } => {
            let pairs = read_synonyms(&synonyms)?;
            let v = Vectors::read_text(&vectors)?;
            let c = calibrate_gamma(&pairs, &v)?;
            println!("gamma\t{:.6}\ncovered\t{}\nskipped\t{}", c.gamma, c.covered, c.skipped);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
