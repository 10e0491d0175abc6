use super::metrics::END_PUNCT;
use super::{FilterConfig, FilterDecision, Stage};
use crate::extract::normalize_text;

/// Lines mentioning any of these (case-insensitive) are removed.
pub const POLICY_PHRASES: &[&str] =
    &["terms of use", "privacy policy", "cookie policy", "uses cookies", "use of cookies"];

#[derive(Debug, Clone, PartialEq)]
pub struct C4LineOutcome {
    pub kept_text: String,
    pub removed_lines: usize,
    pub decision: FilterDecision,
}

/// Sentences are counted at `.`, `!` or `?` followed by whitespace or the end of the text.
pub fn count_sentences(text: &str) -> usize {
    let mut it = text.chars().peekable();
    let mut n = 0;
    while let Some(c) = it.next() {
        if matches!(c, '.' | '!' | '?') && it.peek().map_or(true, |n| n.is_whitespace()) {
            n += 1;
        }
    }
    n
}

/// Line-level rules, in order: too few words (when the word-length rule is
/// on), missing terminal punctuation (when enabled), "javascript", policy
/// phrases. Then the document is dropped if fewer than
/// `c4_min_sentences` sentences remain.
pub fn c4_line_rules(text: &str, cfg: &FilterConfig) -> C4LineOutcome {
    let mut kept: Vec<&str> = Vec::new();
    let mut removed = 0;
    for line in text.split('\n') {
        let t = line.trim();
        if t.is_empty() {
            kept.push("");
            continue;
        }
        let lower = t.to_lowercase();
        let drop = (cfg.c4_word_lengths_enabled && t.split_whitespace().count() < cfg.c4_min_words_per_line)
            || (cfg.c4_terminal_punct_enabled && !t.ends_with(END_PUNCT))
            || lower.contains("javascript")
            || POLICY_PHRASES.iter().any(|p| lower.contains(p));
        if drop {
            removed += 1;
        } else {
            kept.push(line);
        }
    }
    let kept_text = normalize_text(&kept.join("\n"));
    let sentences = count_sentences(&kept_text);
    let decision = if sentences < cfg.c4_min_sentences {
        FilterDecision::drop(Stage::C4, "min_sentences", sentences as f64)
    } else {
        FilterDecision::keep(Stage::C4)
    };
    C4LineOutcome { kept_text, removed_lines: removed, decision }
}

/// Whole-document rules: "lorem ipsum" (case-insensitive), then any `{`.
pub fn c4_doc_rules(text: &str, _cfg: &FilterConfig) -> FilterDecision {
    if text.to_lowercase().contains("lorem ipsum") {
        return FilterDecision::drop(Stage::C4, "lorem_ipsum", 1.0);
    }
    if text.contains('{') {
        return FilterDecision::drop(Stage::C4, "curly_bracket", 1.0);
    }
    FilterDecision::keep(Stage::C4)
}
