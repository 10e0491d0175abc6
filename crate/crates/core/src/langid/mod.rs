//! Language identification: multinomial logistic regression over hashed
//! character n-gram features, plus the score gate.

mod features;
mod model;
mod train;

pub use features::{featurize, FeatureVector};
pub use model::{Classification, LangModel};
pub use train::{train, TrainConfig, TrainReport};

use std::collections::HashMap;
use std::io::BufRead;

use thiserror::Error;

pub const DEFAULT_THRESHOLD: f64 = 0.65;

#[derive(Debug, Error)]
pub enum LangIdError {
    #[error("text is empty")]
    EmptyText,
    #[error("training needs at least 2 labels, got {0}")]
    TooFewLabels(usize),
    #[error("label {label:?} has {count} samples, need at least {min}")]
    TooFewSamples { label: String, count: usize, min: usize },
    #[error("hash dimension must be a power of two, got {0}")]
    BadHashDim(u32),
    #[error("model file: {0}")]
    Format(String),
    #[error("score file line {line}: {reason}")]
    ScoreFile { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Inclusive gate: `score >= threshold`.
pub fn passes_gate(score: f64, threshold: f64) -> bool {
    score >= threshold
}

/// How the gate is applied to a classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateMode {
    /// The target label's probability must reach the threshold.
    Threshold,
    /// The target label must be the most probable one.
    Argmax,
}

/// One precomputed language prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalScore {
    pub label: String,
    pub score: f64,
}

/// Parse `record_id<TAB>label<TAB>score` lines.
pub fn read_score_file<R: BufRead>(reader: R) -> Result<HashMap<String, ExternalScore>, LangIdError> {
    let mut out = HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |reason: &str| LangIdError::ScoreFile { line: i + 1, reason: reason.to_string() };
        let mut parts = line.split('\t');
        let (Some(id), Some(label), Some(score), None) = (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(bad("expected 3 tab-separated fields"));
        };
        let score: f64 = score.trim().parse().map_err(|_| bad("score is not a number"))?;
        if !(0.0..=1.0).contains(&score) {
            return Err(bad("score outside [0, 1]"));
        }
        out.insert(id.to_string(), ExternalScore { label: label.to_string(), score });
    }
    Ok(out)
}
