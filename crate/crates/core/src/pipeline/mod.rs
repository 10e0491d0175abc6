//! End-to-end curation run.
//!
//! Stage order is fixed: url, extract, language, gopher_quality,
//! gopher_repetition, dedup, c4, fineweb_custom, pii, score_gate, then an
//! output check that drops documents left without text. Every stage before
//! dedup is a per-document map; dedup is the one barrier over the whole set;
//! the stages after it are maps again. Disabled stages pass documents through
//! and still appear in the manifest.
//!
//! Output rows are grouped into `shard_count` shards by a hash of the id and
//! sorted by `(dump, id)` within each shard, so the output does not depend
//! on input order or thread scheduling.

mod config;
mod input;
mod manifest;
mod run;
mod score_gate;
mod stages;
mod tokens;

pub use config::{DedupMode, InputFormat, LanguageConfig, PipelineConfig, StageToggles, TokenCounterConfig};
pub use manifest::{DedupStats, OutputStats, RecordIssue, RunManifest, StageStats, STAGE_ORDER};
pub use run::{run, run_with, shard_of, RunOutput};
pub use score_gate::{read_edu_scores, round_half_up, score_gate};
pub use tokens::{count_tokens, BpeModel, TokenCounter, TokenError};

use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("input {path}: {reason}")]
    Input { path: String, reason: String },
    #[error("output {path}: {source}")]
    Output {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Tokens(#[from] TokenError),
    #[error(transparent)]
    Dedup(#[from] crate::dedup::DedupError),
}

impl PipelineError {
    pub(crate) fn input(path: &Path, reason: impl std::fmt::Display) -> Self {
        PipelineError::Input { path: path.display().to_string(), reason: reason.to_string() }
    }
}
