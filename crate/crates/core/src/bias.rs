//! Subgroup-term counts and TF-IDF word association.
//!
//! Text goes through [`crate::tokenize::words`], so everything is lowercased
//! and a term such as `non-binary` is matched as the token sequence
//! `non binary`. A "data instance" is a whole document.
//!
//! Association for one subgroup term:
//!
//! 1. the vocabulary is every word with corpus frequency >= 2;
//! 2. the subcorpus is every document containing the term;
//! 3. each vocabulary word in the subcorpus, other than the term's own
//!    tokens, scores `tf * ln(N / df)`, with `tf` its raw count in the
//!    subcorpus, `N` the corpus size and `df` its document frequency;
//! 4. `delta` is the score minus the mean score over those words;
//! 5. rows with score > 0 are kept, sorted by descending delta.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::tokenize::words;

#[derive(Debug, Error, PartialEq)]
pub enum BiasError {
    #[error("no subgroup terms given")]
    NoTerms,
    #[error("term {0:?} has no word tokens")]
    EmptyTerm(String),
    #[error("association needs at least 2 documents, got {0}")]
    TooFewDocuments(usize),
}

fn term_tokens(term: &str) -> Result<Vec<String>, BiasError> {
    let t = words(term);
    if t.is_empty() {
        return Err(BiasError::EmptyTerm(term.to_string()));
    }
    Ok(t)
}

fn count_occurrences(tokens: &[String], term: &[String]) -> u64 {
    if tokens.len() < term.len() {
        return 0;
    }
    tokens.windows(term.len()).filter(|w| *w == term).count() as u64
}

/// Occurrences of each term across the corpus.
pub fn term_distribution<S: AsRef<str>>(corpus: &[S], terms: &[&str]) -> Result<BTreeMap<String, u64>, BiasError> {
    if terms.is_empty() {
        return Err(BiasError::NoTerms);
    }
    let parsed = terms.iter().map(|t| Ok((t.to_lowercase(), term_tokens(t)?))).collect::<Result<Vec<_>, _>>()?;
    let mut out: BTreeMap<String, u64> = parsed.iter().map(|(t, _)| (t.clone(), 0)).collect();
    for doc in corpus {
        let toks = words(doc.as_ref());
        for (name, seq) in &parsed {
            *out.get_mut(name).unwrap() += count_occurrences(&toks, seq);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssociationRow {
    pub word: String,
    pub tfidf_score: f64,
    pub delta_from_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssociationTable {
    pub subgroup_term: String,
    pub corpus_doc_count: usize,
    pub selected_doc_count: usize,
    pub mean_tfidf: f64,
    pub rows: Vec<AssociationRow>,
}

impl AssociationTable {
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("word\tscore\tdelta\n");
        for r in &self.rows {
            let _ = writeln!(s, "{}\t{:.6}\t{:.6}", r.word, r.tfidf_score, r.delta_from_mean);
        }
        s
    }
}

/// Tokenized corpus with the statistics shared by every subgroup term.
pub struct BiasCorpus {
    docs: Vec<Vec<String>>,
    freq: HashMap<String, u64>,
    df: HashMap<String, u64>,
}

impl BiasCorpus {
    pub fn new<S: AsRef<str>>(corpus: &[S]) -> Self {
        let docs: Vec<Vec<String>> = corpus.iter().map(|d| words(d.as_ref())).collect();
        let mut freq: HashMap<String, u64> = HashMap::new();
        let mut df: HashMap<String, u64> = HashMap::new();
        for d in &docs {
            for w in d {
                *freq.entry(w.clone()).or_insert(0) += 1;
            }
            for w in d.iter().collect::<HashSet<_>>() {
                *df.entry(w.clone()).or_insert(0) += 1;
            }
        }
        BiasCorpus { docs, freq, df }
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn corpus_frequency(&self, word: &str) -> u64 {
        self.freq.get(word).copied().unwrap_or(0)
    }

    /// Steps 1 to 4, before the score > 0 cut; rows sorted by word.
    pub fn association_full(&self, term: &str) -> Result<AssociationTable, BiasError> {
        if self.docs.len() < 2 {
            return Err(BiasError::TooFewDocuments(self.docs.len()));
        }
        let seq = term_tokens(term)?;
        let own: HashSet<&String> = seq.iter().collect();
        let n = self.docs.len() as f64;
        let mut tf: BTreeMap<&str, u64> = BTreeMap::new();
        let mut selected = 0;
        for d in &self.docs {
            if count_occurrences(d, &seq) == 0 {
                continue;
            }
            selected += 1;
            for w in d {
                if self.freq[w] >= 2 && !own.contains(w) {
                    *tf.entry(w.as_str()).or_insert(0) += 1;
                }
            }
        }
        let scored: Vec<(&str, f64)> =
            tf.into_iter().map(|(w, c)| (w, c as f64 * (n / self.df[w] as f64).ln())).collect();
        let mean =
            if scored.is_empty() { 0.0 } else { scored.iter().map(|(_, s)| s).sum::<f64>() / scored.len() as f64 };
        Ok(AssociationTable {
            subgroup_term: term.to_lowercase(),
            corpus_doc_count: self.docs.len(),
            selected_doc_count: selected,
            mean_tfidf: mean,
            rows: scored
                .into_iter()
                .map(|(w, s)| AssociationRow { word: w.to_string(), tfidf_score: s, delta_from_mean: s - mean })
                .collect(),
        })
    }

    pub fn association(&self, term: &str) -> Result<AssociationTable, BiasError> {
        let mut t = self.association_full(term)?;
        t.rows.retain(|r| r.tfidf_score > 0.0);
        t.rows.sort_by(|a, b| b.delta_from_mean.total_cmp(&a.delta_from_mean).then_with(|| a.word.cmp(&b.word)));
        Ok(t)
    }
}

pub fn tfidf_association<S: AsRef<str>>(corpus: &[S], term: &str) -> Result<AssociationTable, BiasError> {
    BiasCorpus::new(corpus).association(term)
}
