//! Matching documents across text and structured corpora by embedding a
//! shared term graph.
//!
//! The flow is: load two corpora ([`corpus`]), build a bipartite graph of
//! metadata and data nodes ([`graph`]), optionally expand it with external
//! triples ([`expand`]) and compress it ([`compress`]), turn it into a
//! sentence corpus with random walks ([`walks`]), train embeddings
//! ([`embed`]), and rank cross-corpus documents by cosine ([`matching`]).
//! [`pipeline`] chains the stages with persisted artifacts.

pub mod compress;
pub mod corpus;
pub mod embed;
pub mod error;
pub mod eval;
pub mod exec;
pub mod expand;
pub mod graph;
pub mod matching;
pub mod pipeline;
pub mod seed;
pub mod vectors;
pub mod walks;

pub use error::{Error, Result};
pub use exec::Exec;
