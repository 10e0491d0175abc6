use std::collections::HashMap;
use std::fs::File;
use std::io::BufReader;

use super::config::{InputFormat, PipelineConfig};
use super::input::Item;
use super::score_gate::{read_edu_scores, score_gate};
use super::tokens::TokenCounter;
use super::PipelineError;
use crate::extract::{extract_main_text_with, wet_passthrough};
use crate::filters::{
    c4_doc_rules, c4_line_rules, compute_metrics_with, fineweb_custom_with, gopher_quality, gopher_repetition,
    in_sample, url_filter, Blocklist, DocumentMetrics, FilterDecision,
};
use crate::langid::{passes_gate, read_score_file, ExternalScore, GateMode, LangModel};
use crate::pii::anonymize;

/// Index into [`super::STAGE_ORDER`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum StageId {
    Url = 0,
    Extract,
    Language,
    GopherQuality,
    GopherRepetition,
    Dedup,
    C4,
    FinewebCustom,
    Pii,
    ScoreGate,
    Output,
}

pub(crate) const BEFORE_DEDUP: &[StageId] =
    &[StageId::Url, StageId::Extract, StageId::Language, StageId::GopherQuality, StageId::GopherRepetition];
pub(crate) const AFTER_DEDUP: &[StageId] =
    &[StageId::C4, StageId::FinewebCustom, StageId::Pii, StageId::ScoreGate, StageId::Output];

/// One document passing through one stage.
#[derive(Debug, Clone)]
pub(crate) struct Event {
    pub stage: StageId,
    pub tokens_in: u64,
    pub dropped: Option<String>,
    pub tokens_out: u64,
}

enum LangSource {
    None,
    Model(LangModel),
    Scores(HashMap<String, ExternalScore>),
}

/// Everything a stage needs, loaded once before processing.
pub(crate) struct Ctx<'a> {
    pub cfg: &'a PipelineConfig,
    pub counter: TokenCounter,
    blocklist: Blocklist,
    lang: LangSource,
    edu: HashMap<String, f64>,
}

fn open(path: &std::path::Path) -> Result<BufReader<File>, PipelineError> {
    File::open(path).map(BufReader::new).map_err(|e| PipelineError::input(path, e))
}

impl<'a> Ctx<'a> {
    pub fn load(cfg: &'a PipelineConfig) -> Result<Self, PipelineError> {
        let counter = cfg.load_token_counter()?;
        let blocklist = match &cfg.blocklist {
            Some(p) if cfg.stages.url_filter => {
                Blocklist::from_reader(open(p)?).map_err(|e| PipelineError::input(p, e))?
            }
            _ => Blocklist::default(),
        };
        let lang = if !cfg.stages.language {
            LangSource::None
        } else if let Some(p) = &cfg.language.score_file {
            LangSource::Scores(read_score_file(open(p)?).map_err(|e| PipelineError::input(p, e))?)
        } else if let Some(p) = &cfg.language.model {
            LangSource::Model(LangModel::read_from(open(p)?).map_err(|e| PipelineError::input(p, e))?)
        } else {
            LangSource::None
        };
        let edu = match &cfg.edu_scores {
            Some(p) if cfg.stages.score_gate => read_edu_scores(open(p)?, &p.display().to_string())?,
            _ => HashMap::new(),
        };
        Ok(Ctx { cfg, counter, blocklist, lang, edu })
    }

    pub fn enabled(&self, s: StageId) -> bool {
        let t = &self.cfg.stages;
        match s {
            StageId::Url => t.url_filter,
            StageId::Extract => t.extract,
            StageId::Language => t.language,
            StageId::GopherQuality => t.gopher_quality,
            StageId::GopherRepetition => t.gopher_repetition,
            StageId::Dedup => t.dedup,
            StageId::C4 => t.c4,
            StageId::FinewebCustom => t.fineweb_custom,
            StageId::Pii => t.pii,
            StageId::ScoreGate => t.score_gate,
            StageId::Output => true,
        }
    }

    pub fn tokens(&self, text: &str) -> u64 {
        super::tokens::count_tokens(text, &self.counter).unwrap_or(0)
    }

    pub fn set_text(&self, item: &mut Item, text: String) {
        if text != item.doc.text {
            item.doc.text = text;
            item.changed = true;
            item.metrics = None;
            item.tokens = self.tokens(&item.doc.text);
        }
    }

    fn metrics(&self, item: &mut Item) -> DocumentMetrics {
        item.metrics
            .get_or_insert_with(|| compute_metrics_with(&item.doc.text, self.cfg.filters.short_line_len))
            .clone()
    }

    /// Runs `stages` in order until one drops the item.
    pub fn run_map(&self, mut item: Item, stages: &[StageId]) -> (Option<Item>, Vec<Event>) {
        let mut events = Vec::with_capacity(stages.len());
        for &s in stages {
            let tokens_in = item.tokens;
            let verdict = self.apply(s, &mut item);
            let dropped = verdict.err();
            let stop = dropped.is_some();
            events.push(Event { stage: s, tokens_in, dropped, tokens_out: item.tokens });
            if stop {
                return (None, events);
            }
        }
        (Some(item), events)
    }

    fn check(d: FilterDecision) -> Result<(), String> {
        if d.keep {
            Ok(())
        } else {
            Err(d.rule_id)
        }
    }

    fn apply(&self, s: StageId, item: &mut Item) -> Result<(), String> {
        let cfg = self.cfg;
        if s == StageId::Extract {
            return self.extract(item);
        }
        if !self.enabled(s) {
            return Ok(());
        }
        match s {
            StageId::Url => {
                if self.blocklist.is_empty() {
                    return Ok(());
                }
                Self::check(url_filter(&item.doc.url, &self.blocklist))
            }
            StageId::Extract | StageId::Dedup => Ok(()),
            StageId::Language => self.language(item),
            StageId::GopherQuality => Self::check(gopher_quality(&self.metrics(item), &cfg.filters)),
            StageId::GopherRepetition => Self::check(gopher_repetition(&self.metrics(item), &cfg.filters)),
            StageId::C4 => {
                Self::check(c4_doc_rules(&item.doc.text, &cfg.filters))?;
                let out = c4_line_rules(&item.doc.text, &cfg.filters);
                Self::check(out.decision)?;
                self.set_text(item, out.kept_text);
                Ok(())
            }
            StageId::FinewebCustom => {
                let m = self.metrics(item);
                let sampled = in_sample(cfg.seed, &item.doc.id, cfg.filters.avg_line_length_sample_rate);
                Self::check(fineweb_custom_with(&m, &cfg.filters, sampled))
            }
            StageId::Pii => {
                let (text, report) = anonymize(&item.doc.text);
                item.scrub += report;
                self.set_text(item, text);
                Ok(())
            }
            StageId::ScoreGate => Self::check(score_gate(self.edu.get(&item.doc.id).copied(), cfg.edu_threshold)),
            StageId::Output => {
                if item.doc.text.trim().is_empty() {
                    return Err("empty_text".into());
                }
                let n = match item.doc.token_count {
                    Some(n) if !item.changed => n,
                    _ => self.tokens(&item.doc.text),
                };
                item.doc.token_count = Some(n);
                item.tokens = n;
                Ok(())
            }
        }
    }

    /// Extraction also turns WARC bodies into text when the stage is off, so
    /// that later stages have something to read.
    fn extract(&self, item: &mut Item) -> Result<(), String> {
        let on = self.enabled(StageId::Extract);
        match self.cfg.format {
            InputFormat::Warc => {
                let Some((charset, body)) = item.body.take() else { return Ok(()) };
                if !on {
                    self.set_text(item, String::from_utf8_lossy(&body).into_owned());
                    return Ok(());
                }
                let t = extract_main_text_with(&body, charset.as_deref(), &self.cfg.filters.extract_config())
                    .map_err(|r| r.code().to_string())?;
                self.set_text(item, t.text);
                Ok(())
            }
            InputFormat::Wet if on => {
                let t = wet_passthrough(&item.doc.text);
                if t.text.is_empty() {
                    return Err("empty".into());
                }
                self.set_text(item, t.text);
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn language(&self, item: &mut Item) -> Result<(), String> {
        let lc = &self.cfg.language;
        let (label, score, top) = match &self.lang {
            LangSource::None => return Ok(()),
            LangSource::Model(m) => {
                let c = m.classify(&item.doc.text).map_err(|_| "empty".to_string())?;
                (lc.target.clone(), c.score_of(&lc.target), c.label)
            }
            LangSource::Scores(s) => {
                let e = s.get(&item.doc.id).ok_or_else(|| "missing_language_score".to_string())?;
                let score = if e.label == lc.target { e.score } else { 0.0 };
                (lc.target.clone(), score, e.label.clone())
            }
        };
        let pass = match lc.gate_mode {
            GateMode::Threshold => passes_gate(score, self.cfg.filters.lang_threshold),
            GateMode::Argmax => top == lc.target,
        };
        if !pass {
            return Err(match lc.gate_mode {
                GateMode::Threshold => "language_score".into(),
                GateMode::Argmax => "not_target_language".into(),
            });
        }
        item.doc.language = label;
        item.doc.language_score = (score * 1e6).round() / 1e6;
        Ok(())
    }
}
