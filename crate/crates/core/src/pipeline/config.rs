use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::tokens::{BpeModel, TokenCounter};
use super::PipelineError;
use crate::dedup::{DedupParams, LineDedupMode};
use crate::filters::FilterConfig;
use crate::langid::GateMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFormat {
    Warc,
    Wet,
    Jsonl,
}

/// Stage switches. The order the stages run in is fixed regardless of how
/// they are listed here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StageToggles {
    pub url_filter: bool,
    pub extract: bool,
    pub language: bool,
    pub gopher_quality: bool,
    pub gopher_repetition: bool,
    pub dedup: bool,
    pub c4: bool,
    pub fineweb_custom: bool,
    pub pii: bool,
    pub score_gate: bool,
}

impl Default for StageToggles {
    fn default() -> Self {
        StageToggles {
            url_filter: true,
            extract: true,
            language: true,
            gopher_quality: true,
            gopher_repetition: true,
            dedup: true,
            c4: true,
            fineweb_custom: true,
            pii: true,
            score_gate: false,
        }
    }
}

impl StageToggles {
    pub fn none() -> Self {
        StageToggles {
            url_filter: false,
            extract: false,
            language: false,
            gopher_quality: false,
            gopher_repetition: false,
            dedup: false,
            c4: false,
            fineweb_custom: false,
            pii: false,
            score_gate: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DedupMode {
    /// MinHash within each dump.
    PerSnapshot,
    /// MinHash across dumps, newest dump first.
    GlobalIterative,
    /// One document per lowercased URL.
    Url,
    Line(LineDedupMode),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TokenCounterConfig {
    Whitespace,
    Bpe { merges: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LanguageConfig {
    /// Trained model file; used when no score file is given.
    pub model: Option<PathBuf>,
    /// `record_id<TAB>label<TAB>score` predictions from an external model.
    pub score_file: Option<PathBuf>,
    pub target: String,
    pub gate_mode: GateMode,
}

impl Default for LanguageConfig {
    fn default() -> Self {
        LanguageConfig { model: None, score_file: None, target: "en".into(), gate_mode: GateMode::Threshold }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub inputs: Vec<PathBuf>,
    pub format: InputFormat,
    pub output_dir: Option<PathBuf>,
    pub shard_count: usize,
    pub seed: u64,
    pub stages: StageToggles,
    pub blocklist: Option<PathBuf>,
    pub language: LanguageConfig,
    pub dedup_mode: DedupMode,
    pub dedup: DedupParams,
    /// Directory for signature and posting spill files; in memory when unset.
    pub spill_dir: Option<PathBuf>,
    /// `id<TAB>score` educational-quality annotations.
    pub edu_scores: Option<PathBuf>,
    pub edu_threshold: i64,
    pub token_counter: TokenCounterConfig,
    pub filters: FilterConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            inputs: Vec::new(),
            format: InputFormat::Warc,
            output_dir: None,
            shard_count: 1,
            seed: 0,
            stages: StageToggles::default(),
            blocklist: None,
            language: LanguageConfig::default(),
            dedup_mode: DedupMode::PerSnapshot,
            dedup: DedupParams::default(),
            spill_dir: None,
            edu_scores: None,
            edu_threshold: 3,
            token_counter: TokenCounterConfig::Whitespace,
            filters: FilterConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(s: &str) -> Result<Self, PipelineError> {
        let cfg: PipelineConfig = toml::from_str(s).map_err(|e| PipelineError::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.shard_count == 0 {
            return Err(PipelineError::Config("shard_count must be >= 1".into()));
        }
        self.filters.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        self.dedup.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        if self.stages.language && self.language.model.is_none() && self.language.score_file.is_none() {
            return Err(PipelineError::Config("language stage needs language.model or language.score_file".into()));
        }
        if self.stages.score_gate && self.edu_scores.is_none() {
            return Err(PipelineError::Config("score_gate stage needs edu_scores".into()));
        }
        if !(0..=5).contains(&self.edu_threshold) {
            return Err(PipelineError::Config(format!("edu_threshold {} outside 0..=5", self.edu_threshold)));
        }
        Ok(())
    }

    pub fn load_token_counter(&self) -> Result<TokenCounter, PipelineError> {
        match &self.token_counter {
            TokenCounterConfig::Whitespace => Ok(TokenCounter::Whitespace),
            TokenCounterConfig::Bpe { merges } => {
                let f = File::open(merges).map_err(|e| PipelineError::input(merges, e))?;
                Ok(TokenCounter::Bpe(BpeModel::from_reader(BufReader::new(f))?))
            }
        }
    }
}
