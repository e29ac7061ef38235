use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::compress::CompressionConfig;
use crate::corpus::{BucketingConfig, CorpusKind, WidthRule};
use crate::embed::{Model, TrainConfig};
use crate::error::{Error, Result};
use crate::graph::{BuildConfig, MergePolicy, TermFilter};
use crate::seed;
use crate::walks::WalkConfig;

/// Which corpus supplies the queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuerySide {
    /// The corpus with more documents; the second corpus on a tie.
    #[default]
    Larger,
    Smaller,
    First,
    Second,
}

impl std::str::FromStr for QuerySide {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "larger" => Ok(QuerySide::Larger),
            "smaller" => Ok(QuerySide::Smaller),
            "first" => Ok(QuerySide::First),
            "second" => Ok(QuerySide::Second),
            other => Err(Error::Config(format!(
                "unknown query side `{other}` (expected larger, smaller, first or second)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub first: PathBuf,
    pub first_kind: CorpusKind,
    pub second: PathBuf,
    pub second_kind: CorpusKind,
    pub ngrams: usize,
    /// Keep each document's top-k TF-IDF terms instead of intersecting vocabularies.
    pub tfidf: Option<usize>,
    pub stemming: bool,
    pub bucketing: bool,
    /// Fixed number of numeric bins; Freedman-Diaconis width when unset.
    pub bins: Option<usize>,
    pub vectors: Option<PathBuf>,
    pub gamma: Option<f64>,
    pub resource: Option<PathBuf>,
    pub beta: Option<f64>,
    pub num_walks: usize,
    pub walk_len: usize,
    pub literal_alg4: bool,
    pub dim: usize,
    pub model: Model,
    /// Defaults to 3 for sg and 15 for cbow.
    pub window: Option<usize>,
    pub negatives: usize,
    pub epochs: usize,
    pub lr: f64,
    pub min_count: usize,
    pub subsample: Option<f64>,
    pub queries: QuerySide,
    pub k: Vec<usize>,
    pub truth: Option<PathBuf>,
    /// Score table (ranking TSV) to average with the cosine scores.
    pub external_scores: Option<PathBuf>,
    pub ensemble_weight: f64,
    pub seed: u64,
    pub workers: usize,
    pub out: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            first: PathBuf::new(),
            first_kind: CorpusKind::Table,
            second: PathBuf::new(),
            second_kind: CorpusKind::PlainText,
            ngrams: 3,
            tfidf: None,
            stemming: true,
            bucketing: true,
            bins: None,
            vectors: None,
            gamma: None,
            resource: None,
            beta: None,
            num_walks: 100,
            walk_len: 30,
            literal_alg4: false,
            dim: 300,
            model: Model::SkipGram,
            window: None,
            negatives: 5,
            epochs: 5,
            lr: 0.025,
            min_count: 1,
            subsample: None,
            queries: QuerySide::Larger,
            k: vec![1, 5, 20],
            truth: None,
            external_scores: None,
            ensemble_weight: 0.5,
            seed: 0,
            workers: 1,
            out: PathBuf::from("out"),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.ngrams == 0 {
            return Err(Error::Config("ngrams must be at least 1".into()));
        }
        if self.vectors.is_some() != self.gamma.is_some() {
            return Err(Error::Config("--vectors and --gamma must be given together".into()));
        }
        if let Some(b) = self.beta {
            if !(b.is_finite() && b > 0.0) {
                return Err(Error::Config(format!("beta must be positive, got {b}")));
            }
        }
        if self.k.is_empty() || self.k.contains(&0) {
            return Err(Error::Config("k must be a non-empty list of positive integers".into()));
        }
        if self.walk_len == 0 || self.num_walks == 0 {
            return Err(Error::Config("num-walks and walk-len must be positive".into()));
        }
        self.train_config().validate()
    }

    pub fn build_config(&self) -> BuildConfig {
        BuildConfig {
            max_n: self.ngrams,
            filter: self.tfidf.map_or(TermFilter::Intersection, TermFilter::TfIdf),
        }
    }

    pub fn merge_policy(&self) -> MergePolicy {
        MergePolicy {
            use_stemming: self.stemming,
            bucketing: BucketingConfig {
                enabled: self.bucketing,
                width_rule: self.bins.map_or(WidthRule::FreedmanDiaconis, WidthRule::FixedCount),
            },
            vector_file: self.vectors.clone(),
            gamma: self.gamma,
        }
    }

    pub fn compression_config(&self) -> Option<CompressionConfig> {
        self.beta.map(|beta| CompressionConfig {
            beta,
            seed: seed::derive(self.seed, "compress"),
        })
    }

    pub fn walk_config(&self) -> WalkConfig {
        WalkConfig {
            num_walks: self.num_walks,
            walk_len: self.walk_len,
            seed: seed::derive(self.seed, "walk"),
            literal: self.literal_alg4,
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            dim: self.dim,
            model: self.model,
            window: self.window.unwrap_or(self.model.default_window()),
            negatives: self.negatives,
            epochs: self.epochs,
            initial_lr: self.lr,
            min_count: self.min_count,
            seed: seed::derive(self.seed, "train"),
            workers: self.workers.max(1),
            subsample: self.subsample,
            shrink_window: true,
        }
    }

    /// Hex SHA-256 of the configuration, excluding the output directory and
    /// worker count, which do not change single-worker results.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = PathBuf::new();
        c.workers = c.workers.min(1);
        super::manifest::sha256_hex(serde_json::to_string(&c).expect("config serializes").as_bytes())
    }
}
