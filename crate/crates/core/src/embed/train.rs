use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::kernel::{add_scaled, step_target};
use super::vocab::{build_vocab, NegativeSampler, Vocab};
use super::{EmbeddingMatrix, Model, TrainConfig};
use crate::error::{Error, Result};
use crate::seed;
use crate::vectors::Vectors;
use crate::walks::WalkCorpus;

/// Row access to the two weight matrices.
trait Weights {
    fn read(&mut self, input: bool, row: usize, out: &mut [f32]);
    fn write(&mut self, input: bool, row: usize, value: &[f32]);

    /// One negative-sampling target against output row `target`.
    fn step(
        &mut self,
        target: usize,
        hidden: &[f32],
        update: &mut [f32],
        scratch: &mut [f32],
        label: f32,
        lr: f32,
    ) -> f64 {
        self.read(false, target, scratch);
        let loss = step_target(hidden, update, scratch, label, lr);
        self.write(false, target, scratch);
        loss
    }
}

struct Dense<'a> {
    dim: usize,
    input: &'a mut [f32],
    output: &'a mut [f32],
}

impl Weights for Dense<'_> {
    #[inline]
    fn read(&mut self, input: bool, row: usize, out: &mut [f32]) {
        let m = if input { &*self.input } else { &*self.output };
        out.copy_from_slice(&m[row * self.dim..(row + 1) * self.dim]);
    }

    #[inline]
    fn write(&mut self, input: bool, row: usize, value: &[f32]) {
        let m = if input { &mut *self.input } else { &mut *self.output };
        m[row * self.dim..(row + 1) * self.dim].copy_from_slice(value);
    }

    #[inline]
    fn step(&mut self, target: usize, hidden: &[f32], update: &mut [f32], _: &mut [f32], label: f32, lr: f32) -> f64 {
        let row = &mut self.output[target * self.dim..(target + 1) * self.dim];
        step_target(hidden, update, row, label, lr)
    }
}

/// Shared rows for multi-worker training. Loads and stores are relaxed, so
/// concurrent updates to the same row may be lost but never tear a float.
struct Shared<'a> {
    dim: usize,
    input: &'a [AtomicU32],
    output: &'a [AtomicU32],
}

impl Weights for Shared<'_> {
    #[inline]
    fn read(&mut self, input: bool, row: usize, out: &mut [f32]) {
        let m = if input { self.input } else { self.output };
        for (o, a) in out.iter_mut().zip(&m[row * self.dim..(row + 1) * self.dim]) {
            *o = f32::from_bits(a.load(Ordering::Relaxed));
        }
    }

    #[inline]
    fn write(&mut self, input: bool, row: usize, value: &[f32]) {
        let m = if input { self.input } else { self.output };
        for (a, v) in m[row * self.dim..(row + 1) * self.dim].iter().zip(value) {
            a.store(v.to_bits(), Ordering::Relaxed);
        }
    }
}

/// Corpus sentences mapped to vocab ids, out-of-vocab tokens dropped.
fn encode(corpus: &WalkCorpus, vocab: &Vocab) -> Vec<Vec<u32>> {
    corpus
        .sentences
        .iter()
        .map(|s| s.iter().filter_map(|&t| vocab.from_corpus[t as usize]).collect())
        .collect()
}

struct Worker<'a, W: Weights> {
    cfg: &'a TrainConfig,
    sampler: &'a NegativeSampler,
    keep_prob: &'a [f32],
    weights: W,
    rng: ChaCha8Rng,
    hidden: Vec<f32>,
    update: Vec<f32>,
    row: Vec<f32>,
    ctx: Vec<u32>,
    sentence: Vec<u32>,
}

impl<'a, W: Weights> Worker<'a, W> {
    fn new(cfg: &'a TrainConfig, sampler: &'a NegativeSampler, keep_prob: &'a [f32], weights: W, stream: u64) -> Self {
        Worker {
            cfg,
            sampler,
            keep_prob,
            weights,
            rng: seed::rng(stream),
            hidden: vec![0.0; cfg.dim],
            update: vec![0.0; cfg.dim],
            row: vec![0.0; cfg.dim],
            ctx: Vec::new(),
            sentence: Vec::new(),
        }
    }

    /// Positive target plus negatives, then the hidden gradient lands in `update`.
    fn targets(&mut self, positive: u32, lr: f32) -> f64 {
        self.update.iter_mut().for_each(|x| *x = 0.0);
        let mut loss = 0.0;
        for k in 0..=self.cfg.negatives {
            let (target, label) = if k == 0 {
                (positive, 1.0)
            } else {
                let t = self.sampler.sample(&mut self.rng);
                if t == positive {
                    continue;
                }
                (t, 0.0)
            };
            loss += self.weights.step(
                target as usize,
                &self.hidden,
                &mut self.update,
                &mut self.row,
                label,
                lr,
            );
        }
        loss
    }

    /// Trains on one sentence; returns (loss sum, example count).
    fn sentence(&mut self, raw: &[u32], lr: f32) -> (f64, u64) {
        self.sentence.clear();
        for &t in raw {
            let p = self.keep_prob[t as usize];
            if p >= 1.0 || self.rng.random::<f32>() < p {
                self.sentence.push(t);
            }
        }
        let sentence = std::mem::take(&mut self.sentence);
        let (mut loss, mut examples) = (0.0, 0u64);
        let n = sentence.len();
        for i in 0..n {
            let b = if self.cfg.shrink_window {
                self.rng.random_range(1..=self.cfg.window)
            } else {
                self.cfg.window
            };
            let lo = i.saturating_sub(b);
            let hi = (i + b).min(n - 1);
            match self.cfg.model {
                Model::SkipGram => {
                    for j in lo..=hi {
                        if j == i {
                            continue;
                        }
                        let center = sentence[i] as usize;
                        self.weights.read(true, center, &mut self.hidden);
                        loss += self.targets(sentence[j], lr);
                        add_scaled(1.0, &self.update, &mut self.hidden);
                        self.weights.write(true, center, &self.hidden);
                        examples += 1;
                    }
                }
                Model::Cbow => {
                    self.ctx.clear();
                    self.ctx.extend((lo..=hi).filter(|&j| j != i).map(|j| sentence[j]));
                    if self.ctx.is_empty() {
                        continue;
                    }
                    self.hidden.iter_mut().for_each(|x| *x = 0.0);
                    for k in 0..self.ctx.len() {
                        self.weights.read(true, self.ctx[k] as usize, &mut self.row);
                        add_scaled(1.0, &self.row, &mut self.hidden);
                    }
                    let share = 1.0 / self.ctx.len() as f32;
                    self.hidden.iter_mut().for_each(|x| *x *= share);
                    loss += self.targets(sentence[i], lr);
                    // As in word2vec: every context gets the full hidden error.
                    for k in 0..self.ctx.len() {
                        let c = self.ctx[k] as usize;
                        self.weights.read(true, c, &mut self.row);
                        add_scaled(1.0, &self.update, &mut self.row);
                        self.weights.write(true, c, &self.row);
                    }
                    examples += 1;
                }
            }
        }
        self.sentence = sentence;
        (loss, examples)
    }
}

/// Word2vec-style keep probability; metadata labels (containing `:`) are
/// always kept.
fn keep_probabilities(vocab: &Vocab, sample: Option<f64>) -> Vec<f32> {
    let total = vocab.total() as f64;
    vocab
        .tokens
        .iter()
        .zip(&vocab.counts)
        .map(|(t, &c)| match sample {
            Some(s) if s > 0.0 && !t.contains(':') => {
                let f = c as f64 / total;
                (((f / s).sqrt() + 1.0) * s / f).min(1.0) as f32
            }
            _ => 1.0,
        })
        .collect()
}

fn learning_rate(cfg: &TrainConfig, done: u64, total: u64) -> f32 {
    let floor = cfg.initial_lr * 1e-4;
    let lr = cfg.initial_lr * (1.0 - done as f64 / (total as f64 + 1.0));
    lr.max(floor) as f32
}

/// Trained embeddings plus the mean loss per training example of each epoch.
#[derive(Debug, Clone)]
pub struct Training {
    pub matrix: EmbeddingMatrix,
    pub epoch_loss: Vec<f64>,
}

pub fn train(corpus: &WalkCorpus, cfg: &TrainConfig) -> Result<EmbeddingMatrix> {
    Ok(train_report(corpus, cfg)?.matrix)
}

pub fn train_report(corpus: &WalkCorpus, cfg: &TrainConfig) -> Result<Training> {
    cfg.validate()?;
    let vocab = build_vocab(corpus, cfg.min_count)?;
    let sentences = encode(corpus, &vocab);
    let dim = cfg.dim;
    let v = vocab.len();

    let mut init_rng = seed::rng(seed::derive(cfg.seed, "init"));
    let half = 0.5 / dim as f32;
    let mut input: Vec<f32> = (0..v * dim).map(|_| init_rng.random_range(-half..half)).collect();
    let mut output = vec![0f32; v * dim];

    let sampler = NegativeSampler::new(&vocab.counts);
    let keep = keep_probabilities(&vocab, cfg.subsample);
    let tokens_per_epoch: u64 = sentences.iter().map(|s| s.len() as u64).sum();
    let total = tokens_per_epoch * cfg.epochs as u64;

    let epoch_loss = if cfg.workers <= 1 {
        let weights = Dense {
            dim,
            input: &mut input,
            output: &mut output,
        };
        let mut w = Worker::new(cfg, &sampler, &keep, weights, seed::derive2(cfg.seed, 0, 0));
        let mut done = 0u64;
        let mut losses = Vec::with_capacity(cfg.epochs);
        for epoch in 0..cfg.epochs {
            let (mut l, mut n) = (0.0, 0u64);
            for s in &sentences {
                let (sl, sn) = w.sentence(s, learning_rate(cfg, done, total));
                l += sl;
                n += sn;
                done += s.len() as u64;
            }
            losses.push(if n > 0 { l / n as f64 } else { 0.0 });
            check_finite(w.weights.input, dim, &vocab, epoch)?;
        }
        losses
    } else {
        train_shared(cfg, &sampler, &keep, &sentences, &mut input, &mut output, total)
    };
    check_finite(&input, dim, &vocab, cfg.epochs)?;

    Ok(Training {
        matrix: EmbeddingMatrix {
            input: Vectors::from_rows(dim, vocab.tokens.clone(), input),
            output,
            counts: vocab.counts,
        },
        epoch_loss,
    })
}

fn train_shared(
    cfg: &TrainConfig,
    sampler: &NegativeSampler,
    keep: &[f32],
    sentences: &[Vec<u32>],
    input: &mut [f32],
    output: &mut [f32],
    total: u64,
) -> Vec<f64> {
    let to_atomic = |m: &[f32]| m.iter().map(|x| AtomicU32::new(x.to_bits())).collect::<Vec<_>>();
    let shared_in = to_atomic(input);
    let shared_out = to_atomic(output);
    let progress = AtomicU64::new(0);
    let shard_len = sentences.len().div_ceil(cfg.workers).max(1);

    let per_worker: Vec<Vec<(f64, u64)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = sentences
            .chunks(shard_len)
            .enumerate()
            .map(|(k, shard)| {
                let (shared_in, shared_out, progress) = (&shared_in, &shared_out, &progress);
                scope.spawn(move || {
                    let weights = Shared {
                        dim: cfg.dim,
                        input: shared_in,
                        output: shared_out,
                    };
                    let mut w = Worker::new(cfg, sampler, keep, weights, seed::derive2(cfg.seed, k as u64, 0));
                    (0..cfg.epochs)
                        .map(|_| {
                            let (mut l, mut n) = (0.0, 0u64);
                            for s in shard {
                                let done = progress.fetch_add(s.len() as u64, Ordering::Relaxed);
                                let (sl, sn) = w.sentence(s, learning_rate(cfg, done, total));
                                l += sl;
                                n += sn;
                            }
                            (l, n)
                        })
                        .collect()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("training worker panicked"))
            .collect()
    });

    for (dst, src) in input.iter_mut().zip(&shared_in) {
        *dst = f32::from_bits(src.load(Ordering::Relaxed));
    }
    for (dst, src) in output.iter_mut().zip(&shared_out) {
        *dst = f32::from_bits(src.load(Ordering::Relaxed));
    }
    (0..cfg.epochs)
        .map(|e| {
            let (l, n) = per_worker
                .iter()
                .fold((0.0, 0u64), |(l, n), w| (l + w[e].0, n + w[e].1));
            if n > 0 {
                l / n as f64
            } else {
                0.0
            }
        })
        .collect()
}

fn check_finite(input: &[f32], dim: usize, vocab: &Vocab, epoch: usize) -> Result<()> {
    if let Some(pos) = input.iter().position(|x| !x.is_finite()) {
        return Err(Error::Diverged(format!(
            "non-finite component in the vector of `{}` after epoch {epoch}; try a smaller learning rate",
            vocab.tokens[pos / dim]
        )));
    }
    Ok(())
}
