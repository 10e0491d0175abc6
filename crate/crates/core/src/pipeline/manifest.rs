use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::pii::ScrubReport;

/// Every stage in run order, including the final output check.
pub const STAGE_ORDER: &[&str] = &[
    "url",
    "extract",
    "language",
    "gopher_quality",
    "gopher_repetition",
    "dedup",
    "c4",
    "fineweb_custom",
    "pii",
    "score_gate",
    "output",
];

/// Per-stage accounting. Token figures for a document are taken from its
/// text as it enters the stage; `token_delta` is the change made by the stage
/// to the text of the documents it kept.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageStats {
    pub stage: String,
    pub enabled: bool,
    pub input_docs: u64,
    pub kept_docs: u64,
    pub dropped_docs: u64,
    pub input_tokens: u64,
    pub kept_tokens: u64,
    pub dropped_tokens: u64,
    pub token_delta: i64,
    pub drops_by_rule: BTreeMap<String, u64>,
}

impl StageStats {
    pub fn new(stage: &str, enabled: bool) -> Self {
        StageStats { stage: stage.to_string(), enabled, ..Default::default() }
    }

    pub fn record(&mut self, tokens_in: u64, dropped: Option<&str>, tokens_out: u64) {
        self.input_docs += 1;
        self.input_tokens += tokens_in;
        match dropped {
            Some(rule) => {
                self.dropped_docs += 1;
                self.dropped_tokens += tokens_in;
                *self.drops_by_rule.entry(rule.to_string()).or_insert(0) += 1;
            }
            None => {
                self.kept_docs += 1;
                self.kept_tokens += tokens_in;
                self.token_delta += tokens_out as i64 - tokens_in as i64;
            }
        }
    }

    pub fn merge(&mut self, o: &StageStats) {
        self.input_docs += o.input_docs;
        self.kept_docs += o.kept_docs;
        self.dropped_docs += o.dropped_docs;
        self.input_tokens += o.input_tokens;
        self.kept_tokens += o.kept_tokens;
        self.dropped_tokens += o.dropped_tokens;
        self.token_delta += o.token_delta;
        for (k, v) in &o.drops_by_rule {
            *self.drops_by_rule.entry(k.clone()).or_insert(0) += v;
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DedupStats {
    pub mode: String,
    pub clusters: u64,
    pub removed: u64,
    /// Too short to shingle; passed through.
    pub bypassed: u64,
    pub lines_removed: u64,
    pub missing_url: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RecordIssue {
    pub source: String,
    /// Byte offset for archives, 1-based line number for JSONL.
    pub position: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputStats {
    pub shards: u64,
    pub records: u64,
    pub tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub seed: u64,
    pub token_counter: String,
    pub records_read: u64,
    pub record_errors: Vec<RecordIssue>,
    pub stages: Vec<StageStats>,
    pub dedup: DedupStats,
    pub scrub: ScrubReport,
    pub output: OutputStats,
    pub config: serde_json::Value,
}

impl RunManifest {
    pub fn stage(&self, name: &str) -> Option<&StageStats> {
        self.stages.iter().find(|s| s.stage == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    /// Checks that each stage's kept and dropped counts add up to its input,
    /// and that each stage's input is what the previous stage passed on.
    pub fn check_conservation(&self) -> Result<(), String> {
        let mut expect_docs = self.records_read;
        let mut expect_tokens: Option<u64> = None;
        for s in &self.stages {
            if s.kept_docs + s.dropped_docs != s.input_docs {
                return Err(format!("{}: docs {} + {} != {}", s.stage, s.kept_docs, s.dropped_docs, s.input_docs));
            }
            if s.kept_tokens + s.dropped_tokens != s.input_tokens {
                return Err(format!(
                    "{}: tokens {} + {} != {}",
                    s.stage, s.kept_tokens, s.dropped_tokens, s.input_tokens
                ));
            }
            if s.input_docs != expect_docs {
                return Err(format!("{}: input {} but previous stage kept {}", s.stage, s.input_docs, expect_docs));
            }
            if let Some(t) = expect_tokens {
                if s.input_tokens != t {
                    return Err(format!(
                        "{}: input tokens {} but previous stage passed {}",
                        s.stage, s.input_tokens, t
                    ));
                }
            }
            expect_docs = s.kept_docs;
            expect_tokens = Some((s.kept_tokens as i64 + s.token_delta) as u64);
        }
        if self.output.records != expect_docs {
            return Err(format!("output has {} records, last stage kept {}", self.output.records, expect_docs));
        }
        if let Some(t) = expect_tokens {
            if self.output.tokens != t {
                return Err(format!("output has {} tokens, last stage passed {}", self.output.tokens, t));
            }
        }
        Ok(())
    }
}
