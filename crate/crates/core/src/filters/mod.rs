//! Document statistics and the heuristic filter families.
//!
//! Rule evaluation order is fixed; a dropping decision names the first rule
//! that fired. Bound semantics:
//!
//! * Gopher quality: a document is dropped when a value falls strictly outside
//!   its `[min, max]` range.
//! * Gopher repetition: dropped when a fraction is `>=` its maximum.
//! * Custom: dropped when the punctuated-line fraction is `<=` its threshold,
//!   or the duplicated-line character fraction or short-line fraction is `>=`
//!   its threshold.

mod c4;
mod config;
mod gopher;
mod metrics;
mod rules;
mod url_filter;

pub use c4::{c4_doc_rules, c4_line_rules, count_sentences, C4LineOutcome, POLICY_PHRASES};
pub use config::{FilterConfig, Provenance};
pub use gopher::{gopher_quality, gopher_repetition};
pub use metrics::{
    compute_metrics, compute_metrics_with, DocumentMetrics, BULLETS, DUP_NGRAM_SIZES, END_PUNCT, METRIC_NAMES,
    STOP_WORDS, TOP_NGRAM_SIZES,
};
pub use rules::{fineweb_custom, fineweb_custom_with, in_sample, Bound, Rule};
pub use url_filter::{url_filter, Blocklist};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FilterError {
    #[error("config field {field} out of range: {value}")]
    OutOfRange { field: &'static str, value: String },
    #[error("config: {0}")]
    Config(String),
    #[error("blocklist line {line}: {reason}")]
    Blocklist { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Pipeline stage a decision belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Url,
    Extract,
    Language,
    GopherQuality,
    GopherRepetition,
    Dedup,
    C4,
    FinewebCustom,
    Pii,
    ScoreGate,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Url => "url",
            Stage::Extract => "extract",
            Stage::Language => "language",
            Stage::GopherQuality => "gopher_quality",
            Stage::GopherRepetition => "gopher_repetition",
            Stage::Dedup => "dedup",
            Stage::C4 => "c4",
            Stage::FinewebCustom => "fineweb_custom",
            Stage::Pii => "pii",
            Stage::ScoreGate => "score_gate",
        }
    }
}

/// Keep/drop outcome with the rule that decided it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterDecision {
    pub keep: bool,
    /// Empty when `keep`.
    pub rule_id: String,
    pub triggering_value: f64,
    pub stage: Stage,
}

impl FilterDecision {
    pub fn keep(stage: Stage) -> Self {
        FilterDecision { keep: true, rule_id: String::new(), triggering_value: 0.0, stage }
    }

    pub fn drop(stage: Stage, rule_id: impl Into<String>, value: f64) -> Self {
        let rule_id = rule_id.into();
        debug_assert!(!rule_id.is_empty());
        FilterDecision { keep: false, rule_id, triggering_value: value, stage }
    }
}
