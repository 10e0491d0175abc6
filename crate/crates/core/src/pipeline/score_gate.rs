use std::collections::HashMap;
use std::io::BufRead;

use super::PipelineError;
use crate::filters::{FilterDecision, Stage};

/// Rounds halves up: 2.5 becomes 3, 2.49 becomes 2.
pub fn round_half_up(score: f64) -> i64 {
    (score + 0.5).floor() as i64
}

/// Keeps a document whose rounded score reaches `threshold`. Documents
/// without a score are dropped as `unscored`.
pub fn score_gate(score: Option<f64>, threshold: i64) -> FilterDecision {
    match score {
        None => FilterDecision::drop(Stage::ScoreGate, "unscored", f64::NAN),
        Some(s) if round_half_up(s) >= threshold => FilterDecision::keep(Stage::ScoreGate),
        Some(s) => FilterDecision::drop(Stage::ScoreGate, "edu_score", s),
    }
}

/// Parses `id<TAB>score` lines. Scores are integers 0..=5 or decimals.
pub fn read_edu_scores<R: BufRead>(r: R, source: &str) -> Result<HashMap<String, f64>, PipelineError> {
    let mut out = HashMap::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| PipelineError::Input { path: source.to_string(), reason: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |reason: &str| PipelineError::Input {
            path: source.to_string(),
            reason: format!("line {}: {reason}", i + 1),
        };
        let (id, score) = line.rsplit_once('\t').ok_or_else(|| bad("expected id<TAB>score"))?;
        let score: f64 = score.trim().parse().map_err(|_| bad("score is not a number"))?;
        if !score.is_finite() {
            return Err(bad("score is not finite"));
        }
        out.insert(id.to_string(), score);
    }
    Ok(out)
}
