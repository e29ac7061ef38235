//! Skip-gram / CBOW embeddings with negative sampling over walk sentences.

pub mod kernel;
pub mod objective;
mod train;
mod vocab;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vectors::Vectors;

pub use train::{train, train_report, Training};
pub use vocab::{build_vocab, NegativeSampler, Vocab};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    #[serde(rename = "sg")]
    SkipGram,
    #[serde(rename = "cbow")]
    Cbow,
}

impl Model {
    pub fn default_window(self) -> usize {
        match self {
            Model::SkipGram => 3,
            Model::Cbow => 15,
        }
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sg" | "skipgram" => Ok(Model::SkipGram),
            "cbow" => Ok(Model::Cbow),
            other => Err(Error::Config(format!("unknown model `{other}` (expected sg or cbow)"))),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::SkipGram => "sg",
            Model::Cbow => "cbow",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub dim: usize,
    pub model: Model,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub initial_lr: f64,
    pub min_count: usize,
    pub seed: u64,
    /// 1 gives byte-identical output for a fixed seed.
    pub workers: usize,
    /// Frequent-token downsampling threshold; metadata labels are exempt.
    pub subsample: Option<f64>,
    /// Draw the effective window uniformly from `1..=window` per position.
    pub shrink_window: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig::for_model(Model::SkipGram)
    }
}

impl TrainConfig {
    pub fn for_model(model: Model) -> Self {
        TrainConfig {
            dim: 300,
            model,
            window: model.default_window(),
            negatives: 5,
            epochs: 5,
            initial_lr: 0.025,
            min_count: 1,
            seed: 0,
            workers: 1,
            subsample: None,
            shrink_window: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("dim must be positive".into()));
        }
        if self.window == 0 {
            return Err(Error::Config("window must be positive".into()));
        }
        if self.negatives == 0 {
            return Err(Error::Config("negatives must be at least 1".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be positive".into()));
        }
        if !(self.initial_lr.is_finite() && self.initial_lr > 0.0) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.initial_lr
            )));
        }
        Ok(())
    }
}

/// Trained input (token) vectors, output (context) weights and the vocabulary counts.
#[derive(Debug, Clone)]
pub struct EmbeddingMatrix {
    pub input: Vectors,
    pub output: Vec<f32>,
    pub counts: Vec<u64>,
}

impl EmbeddingMatrix {
    pub fn vectors(&self) -> &Vectors {
        &self.input
    }

    pub fn into_vectors(self) -> Vectors {
        self.input
    }
}

pub fn save_vectors(m: &EmbeddingMatrix, path: &Path) -> Result<()> {
    m.input.write_text(path)
}

pub fn load_vectors(path: &Path) -> Result<Vectors> {
    Vectors::read_text(path)
}
