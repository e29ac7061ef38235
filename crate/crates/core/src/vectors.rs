//! Dense token vectors and the plain-text vector file format: a
//! `<count> <dim>` header, then `<token> <f1> ... <fdim>` per line.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Vectors {
    dim: usize,
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f32>,
}

impl Vectors {
    pub fn new(dim: usize) -> Self {
        Vectors {
            dim,
            tokens: Vec::new(),
            index: HashMap::new(),
            data: Vec::new(),
        }
    }

    /// Builds from tokens and a row-major matrix. Panics on shape mismatch
    /// or duplicate tokens.
    pub fn from_rows(dim: usize, tokens: Vec<String>, data: Vec<f32>) -> Self {
        assert_eq!(tokens.len() * dim, data.len(), "matrix shape mismatch");
        let index: HashMap<String, usize> = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        assert_eq!(index.len(), tokens.len(), "duplicate token");
        Vectors {
            dim,
            tokens,
            index,
            data,
        }
    }

    pub fn push(&mut self, token: impl Into<String>, vector: &[f32]) -> Result<()> {
        let token = token.into();
        if vector.len() != self.dim {
            return Err(Error::Config(format!(
                "vector for `{token}` has {} components, expected {}",
                vector.len(),
                self.dim
            )));
        }
        if self.index.contains_key(&token) {
            return Err(Error::DuplicateId(token));
        }
        self.index.insert(token.clone(), self.tokens.len());
        self.tokens.push(token);
        self.data.extend_from_slice(vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn get(&self, token: &str) -> Option<&[f32]> {
        self.index_of(token).map(|i| self.row(i))
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f32] {
        &mut self.data
    }

    /// Writes the text format with 9 significant digits per component.
    pub fn write_text(&self, path: &Path) -> Result<()> {
        let io = |e| Error::io(path, e);
        let mut w = BufWriter::new(File::create(path).map_err(io)?);
        writeln!(w, "{} {}", self.len(), self.dim).map_err(io)?;
        for (i, token) in self.tokens.iter().enumerate() {
            w.write_all(token.as_bytes()).map_err(io)?;
            for x in self.row(i) {
                write!(w, " {x:.8e}").map_err(io)?;
            }
            w.write_all(b"\n").map_err(io)?;
        }
        w.flush().map_err(io)
    }

    pub fn read_text(path: &Path) -> Result<Vectors> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut lines = BufReader::new(file).lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::parse(path, 1, "missing header"))?
            .map_err(|e| Error::io(path, e))?;
        let mut parts = header.split_whitespace();
        let (Some(count), Some(dim), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::parse(path, 1, "header must be `<count> <dim>`"));
        };
        let count: usize = count.parse().map_err(|_| Error::parse(path, 1, "bad count"))?;
        let dim: usize = dim.parse().map_err(|_| Error::parse(path, 1, "bad dimension"))?;
        let mut out = Vectors::new(dim);
        let mut buf = Vec::with_capacity(dim);
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let token = parts.next().expect("non-empty line");
            buf.clear();
            for p in parts {
                let x: f32 = p
                    .parse()
                    .map_err(|_| Error::parse(path, lineno, format!("bad component `{p}`")))?;
                buf.push(x);
            }
            if buf.len() != dim {
                return Err(Error::parse(
                    path,
                    lineno,
                    format!("expected {dim} components, found {}", buf.len()),
                ));
            }
            out.push(token, &buf)
                .map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        }
        if out.len() != count {
            return Err(Error::parse(
                path,
                1,
                format!("header announces {count} vectors, file has {}", out.len()),
            ));
        }
        Ok(out)
    }
}

#[inline]
pub fn dot(a: &[f32], b: &[f32]) -> f32 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0f32; 8];
    let chunks_a = a.chunks_exact(8);
    let chunks_b = b.chunks_exact(8);
    let tail: f32 = chunks_a
        .remainder()
        .iter()
        .zip(chunks_b.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (ca, cb) in chunks_a.zip(chunks_b) {
        for k in 0..8 {
            acc[k] += ca[k] * cb[k];
        }
    }
    acc.iter().sum::<f32>() + tail
}

pub fn norm(a: &[f32]) -> f32 {
    dot(a, a).sqrt()
}

/// Cosine similarity in f64; `None` when either vector has zero norm.
pub fn cosine(a: &[f32], b: &[f32]) -> Option<f64> {
    let (mut ab, mut aa, mut bb) = (0f64, 0f64, 0f64);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (f64::from(x), f64::from(y));
        ab += x * y;
        aa += x * x;
        bb += y * y;
    }
    if aa == 0.0 || bb == 0.0 {
        return None;
    }
    Some((ab / (aa.sqrt() * bb.sqrt())).clamp(-1.0, 1.0))
}
