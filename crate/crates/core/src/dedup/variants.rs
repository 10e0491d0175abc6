//! Cheaper deduplication variants compared against MinHash in ablations.
//!
//! Both process documents in a seeded pseudo-random order (by a seeded hash of
//! the id), so which copy survives does not depend on input order.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use xxhash_rust::xxh3::xxh3_64_with_seed;

use crate::extract::normalize_text;
use crate::filters::count_sentences;

fn seeded_order(ids: &[&str], seed: u64) -> Vec<usize> {
    let mut order: Vec<(u64, usize)> =
        ids.iter().enumerate().map(|(i, id)| (xxh3_64_with_seed(id.as_bytes(), seed), i)).collect();
    order.sort_unstable();
    order.into_iter().map(|(_, i)| i).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UrlDedupOutcome {
    pub keep: Vec<bool>,
    /// Documents without a URL; kept.
    pub missing_url: usize,
}

/// Keeps the first document per lowercased, trimmed URL in seeded order.
pub fn url_dedup(docs: &[(&str, Option<&str>)], seed: u64) -> UrlDedupOutcome {
    let ids: Vec<&str> = docs.iter().map(|d| d.0).collect();
    let mut seen = HashSet::new();
    let mut keep = vec![true; docs.len()];
    let mut missing = 0;
    for i in seeded_order(&ids, seed) {
        match docs[i].1.map(str::trim).filter(|u| !u.is_empty()) {
            None => missing += 1,
            Some(u) => keep[i] = seen.insert(u.to_lowercase()),
        }
    }
    UrlDedupOutcome { keep, missing_url: missing }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineDedupMode {
    /// Remove every line already seen in an earlier document.
    Plain,
    /// Only lines of at least 10 words take part; afterwards documents with
    /// fewer than 3 sentences are dropped.
    MinWords,
    /// Remove any 3-line window already seen, with every digit read as `0`.
    Span3,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineDedupOutcome {
    /// Rewritten text per document, `None` when the document is dropped.
    pub texts: Vec<Option<String>>,
    pub lines_removed: usize,
}

const MIN_WORDS: usize = 10;
const MIN_SENTENCES: usize = 3;
const SPAN: usize = 3;

fn span_norm(line: &str) -> String {
    line.trim().chars().map(|c| if c.is_ascii_digit() { '0' } else { c }).collect()
}

pub fn line_dedup(docs: &[(&str, &str)], mode: LineDedupMode, seed: u64) -> LineDedupOutcome {
    let ids: Vec<&str> = docs.iter().map(|d| d.0).collect();
    let mut seen: HashSet<String> = HashSet::new();
    let mut texts = vec![None; docs.len()];
    let mut lines_removed = 0;
    for i in seeded_order(&ids, seed) {
        let lines: Vec<&str> = docs[i].1.lines().collect();
        let mut removed = vec![false; lines.len()];
        match mode {
            LineDedupMode::Plain | LineDedupMode::MinWords => {
                for (j, l) in lines.iter().enumerate() {
                    let t = l.trim();
                    if t.is_empty() {
                        continue;
                    }
                    if mode == LineDedupMode::MinWords && t.split_whitespace().count() < MIN_WORDS {
                        continue;
                    }
                    removed[j] = !seen.insert(t.to_string());
                }
            }
            LineDedupMode::Span3 => {
                let content: Vec<usize> = (0..lines.len()).filter(|&j| !lines[j].trim().is_empty()).collect();
                for w in content.windows(SPAN) {
                    let key = w.iter().map(|&j| span_norm(lines[j])).collect::<Vec<_>>().join("\n");
                    if !seen.insert(key) {
                        for &j in w {
                            removed[j] = true;
                        }
                    }
                }
            }
        }
        lines_removed += removed.iter().filter(|r| **r).count();
        let kept: Vec<&str> = lines.iter().zip(&removed).filter(|(_, r)| !**r).map(|(l, _)| *l).collect();
        let text = normalize_text(&kept.join("\n"));
        let drop = text.is_empty() || (mode == LineDedupMode::MinWords && count_sentences(&text) < MIN_SENTENCES);
        texts[i] = (!drop).then_some(text);
    }
    LineDedupOutcome { texts, lines_removed }
}
