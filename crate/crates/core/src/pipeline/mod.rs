//! Stage orchestration with persisted artifacts and per-stage manifests.

mod config;
mod manifest;
mod stages;

pub use config::{PipelineConfig, QuerySide};
pub use manifest::{hash_file, sha256_hex, Manifest};
pub use stages::{
    build, candidates_for, compress, expand, pipeline, query_corpora, rank, run, run_stage, sweep, truth_for,
    walk_input, Artifacts, Built, Run, Stage, SweepRow,
};
