//! Random-walk sentence generation.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::{Graph, NodeId};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub num_walks: usize,
    pub walk_len: usize,
    pub seed: u64,
    /// Sample every step from the start node's neighbors instead of the
    /// current node's (a star sample rather than a walk).
    pub literal: bool,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            num_walks: 100,
            walk_len: 30,
            seed: 0,
            literal: false,
        }
    }
}

/// Sentences of token ids into `labels`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WalkCorpus {
    pub labels: Vec<String>,
    pub sentences: Vec<Vec<u32>>,
}

impl WalkCorpus {
    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }

    pub fn sentence_labels(&self, i: usize) -> impl Iterator<Item = &str> {
        self.sentences[i].iter().map(|&t| self.labels[t as usize].as_str())
    }

    /// One sentence per line, labels separated by single spaces.
    pub fn write_text(&self, path: &Path) -> Result<()> {
        let io = |e| Error::io(path, e);
        let mut w = BufWriter::new(File::create(path).map_err(io)?);
        for s in &self.sentences {
            for (i, &t) in s.iter().enumerate() {
                if i > 0 {
                    w.write_all(b" ").map_err(io)?;
                }
                w.write_all(self.labels[t as usize].as_bytes()).map_err(io)?;
            }
            w.write_all(b"\n").map_err(io)?;
        }
        w.flush().map_err(io)
    }

    /// Reads a sentence file; labels are numbered by first appearance.
    pub fn read_text(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut corpus = WalkCorpus::default();
        let mut ids: HashMap<String, u32> = HashMap::new();
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let sentence = line
                .split_whitespace()
                .map(|tok| {
                    *ids.entry(tok.to_string()).or_insert_with(|| {
                        corpus.labels.push(tok.to_string());
                        (corpus.labels.len() - 1) as u32
                    })
                })
                .collect();
            corpus.sentences.push(sentence);
        }
        Ok(corpus)
    }
}

fn walk_from(g: &Graph, start: NodeId, cfg: &WalkConfig, stream: u64) -> Vec<u32> {
    let mut rng = seed::rng(stream);
    let mut out = Vec::with_capacity(cfg.walk_len);
    out.push(start.0);
    let mut current = start;
    while out.len() < cfg.walk_len {
        let from = if cfg.literal { start } else { current };
        let nbrs = g.neighbors(from);
        current = nbrs[rng.random_range(0..nbrs.len())];
        out.push(current.0);
    }
    out
}

/// `num_walks` rounds; each round starts one walk at every node with at
/// least one neighbor, in id order. Every walk has its own RNG stream keyed
/// by (seed, node, round), so the output does not depend on `exec`.
pub fn generate_walks(g: &Graph, cfg: &WalkConfig, exec: Exec) -> Result<WalkCorpus> {
    if g.node_count() == 0 {
        return Err(Error::Config("cannot walk an empty graph".into()));
    }
    if cfg.num_walks == 0 || cfg.walk_len == 0 {
        return Err(Error::Config("walk count and length must be at least 1".into()));
    }
    let starts: Vec<NodeId> = g.ids().filter(|&id| g.degree(id) > 0).collect();
    let isolated = g.node_count() - starts.len();
    if isolated > 0 {
        log::info!("{isolated} isolated node(s) produce no walks");
    }
    let per_round = starts.len();
    let sentences = exec.map_range(per_round * cfg.num_walks, |i| {
        let round = (i / per_round) as u64;
        let start = starts[i % per_round];
        walk_from(g, start, cfg, seed::derive2(cfg.seed, u64::from(start.0), round))
    });
    Ok(WalkCorpus {
        labels: g.nodes().iter().map(|n| n.label.clone()).collect(),
        sentences,
    })
}
