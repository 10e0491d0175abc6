//! Token counting for the output `token_count` field.
//!
//! The BPE counter reads a merges file: one `left right` pair per line,
//! ranked by order, with an optional leading `#version` line. Each
//! whitespace-separated word starts as a sequence of characters and the
//! lowest-ranked adjacent pair is merged everywhere until no pair has a rank.
//! Counts only match a published tokenizer when its own merges are supplied
//! and its pre-tokenization agrees with whitespace splitting.

use std::collections::HashMap;
use std::io::BufRead;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TokenError {
    #[error("text is empty")]
    EmptyText,
    #[error("merges line {line}: {reason}")]
    Merges { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpeModel {
    ranks: HashMap<(String, String), usize>,
}

impl BpeModel {
    pub fn from_reader<R: BufRead>(r: R) -> Result<Self, TokenError> {
        let mut ranks = HashMap::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if i == 0 && line.starts_with("#version") {
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [a, b] = parts[..] else {
                return Err(TokenError::Merges {
                    line: i + 1,
                    reason: format!("expected 2 symbols, got {}", parts.len()),
                });
            };
            let rank = ranks.len();
            ranks.entry((a.to_string(), b.to_string())).or_insert(rank);
        }
        Ok(BpeModel { ranks })
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn encode_word(&self, word: &str) -> Vec<String> {
        let mut syms: Vec<String> = word.chars().map(String::from).collect();
        loop {
            let best = syms
                .windows(2)
                .filter_map(|w| self.ranks.get(&(w[0].clone(), w[1].clone())).map(|r| (*r, w[0].clone(), w[1].clone())))
                .min();
            let Some((_, a, b)) = best else { break };
            let mut out = Vec::with_capacity(syms.len());
            let mut i = 0;
            while i < syms.len() {
                if i + 1 < syms.len() && syms[i] == a && syms[i + 1] == b {
                    out.push(format!("{a}{b}"));
                    i += 2;
                } else {
                    out.push(std::mem::take(&mut syms[i]));
                    i += 1;
                }
            }
            syms = out;
        }
        syms
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenCounter {
    Whitespace,
    Bpe(BpeModel),
}

impl TokenCounter {
    pub fn name(&self) -> &'static str {
        match self {
            TokenCounter::Whitespace => "whitespace",
            TokenCounter::Bpe(_) => "bpe",
        }
    }
}

pub fn count_tokens(text: &str, counter: &TokenCounter) -> Result<u64, TokenError> {
    if text.trim().is_empty() {
        return Err(TokenError::EmptyText);
    }
    Ok(match counter {
        TokenCounter::Whitespace => text.split_whitespace().count() as u64,
        TokenCounter::Bpe(m) => text.split_whitespace().map(|w| m.encode_word(w).len() as u64).sum(),
    })
}
