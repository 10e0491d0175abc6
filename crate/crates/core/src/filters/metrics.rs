//! Per-document statistics consumed by every filter rule.
//!
//! Definitions (shared with the brute-force oracle in the tests):
//!
//! * **line**: a `\n`-separated segment with trailing whitespace removed;
//!   blank lines are not lines. Line length is its `char` count.
//! * **word**: a whitespace-separated token; word length is its `char` count.
//! * **paragraph**: a maximal run of lines not interrupted by a blank line;
//!   its length is the sum of its line lengths plus one per inner newline.
//! * **n-gram**: `n` consecutive lowercased words. Character fractions for
//!   n-grams mark the word positions covered by the selected occurrences and
//!   divide the covered characters by the characters of all words, so
//!   overlapping occurrences are not double counted.
//! * duplicate line / paragraph counts exclude the first occurrence.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

/// Characters that count as terminal punctuation at the end of a line.
pub const END_PUNCT: &[char] = &['.', '!', '?', '"'];
pub const BULLETS: &[char] = &['•', '●', '○', '◦', '▪', '▫', '■', '□', '‣', '-', '*', '–'];
pub const STOP_WORDS: &[&str] = &["the", "be", "to", "of", "and", "that", "have", "with"];

pub const TOP_NGRAM_SIZES: [usize; 3] = [2, 3, 4];
pub const DUP_NGRAM_SIZES: [usize; 6] = [5, 6, 7, 8, 9, 10];

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DocumentMetrics {
    pub line_count: usize,
    pub line_char_count: usize,
    pub word_count: usize,
    pub mean_word_length: f64,
    pub symbol_to_word_ratio: f64,
    pub bullet_line_fraction: f64,
    pub ellipsis_line_fraction: f64,
    pub alpha_word_fraction: f64,
    pub stop_word_hits: usize,
    pub duplicate_line_fraction: f64,
    pub duplicate_line_char_fraction: f64,
    pub duplicate_paragraph_fraction: f64,
    pub duplicate_paragraph_char_fraction: f64,
    /// Indexed like [`TOP_NGRAM_SIZES`].
    pub top_ngram_char_fraction: [f64; 3],
    /// Indexed like [`DUP_NGRAM_SIZES`].
    pub duplicated_ngram_char_fraction: [f64; 6],
    pub lines_end_punct_fraction: f64,
    pub lines_shorter_30_fraction: f64,
    pub avg_words_per_line: f64,
    pub avg_line_length: f64,
    pub line_with_most_3_words_fraction: f64,
}

/// Names accepted by [`DocumentMetrics::get`].
pub const METRIC_NAMES: &[&str] = &[
    "line_count",
    "line_char_count",
    "word_count",
    "mean_word_length",
    "symbol_to_word_ratio",
    "bullet_line_fraction",
    "ellipsis_line_fraction",
    "alpha_word_fraction",
    "stop_word_hits",
    "duplicate_line_fraction",
    "duplicate_line_char_fraction",
    "duplicate_paragraph_fraction",
    "duplicate_paragraph_char_fraction",
    "top_2gram_char_fraction",
    "top_3gram_char_fraction",
    "top_4gram_char_fraction",
    "duplicated_5gram_char_fraction",
    "duplicated_6gram_char_fraction",
    "duplicated_7gram_char_fraction",
    "duplicated_8gram_char_fraction",
    "duplicated_9gram_char_fraction",
    "duplicated_10gram_char_fraction",
    "lines_end_punct_fraction",
    "lines_shorter_30_fraction",
    "avg_words_per_line",
    "avg_line_length",
    "line_with_most_3_words_fraction",
];

impl DocumentMetrics {
    pub fn top_ngram(&self, n: usize) -> f64 {
        self.top_ngram_char_fraction[n - 2]
    }

    pub fn duplicated_ngram(&self, n: usize) -> f64 {
        self.duplicated_ngram_char_fraction[n - 5]
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "line_count" => self.line_count as f64,
            "line_char_count" => self.line_char_count as f64,
            "word_count" => self.word_count as f64,
            "mean_word_length" => self.mean_word_length,
            "symbol_to_word_ratio" => self.symbol_to_word_ratio,
            "bullet_line_fraction" => self.bullet_line_fraction,
            "ellipsis_line_fraction" => self.ellipsis_line_fraction,
            "alpha_word_fraction" => self.alpha_word_fraction,
            "stop_word_hits" => self.stop_word_hits as f64,
            "duplicate_line_fraction" => self.duplicate_line_fraction,
            "duplicate_line_char_fraction" => self.duplicate_line_char_fraction,
            "duplicate_paragraph_fraction" => self.duplicate_paragraph_fraction,
            "duplicate_paragraph_char_fraction" => self.duplicate_paragraph_char_fraction,
            "lines_end_punct_fraction" => self.lines_end_punct_fraction,
            "lines_shorter_30_fraction" => self.lines_shorter_30_fraction,
            "avg_words_per_line" => self.avg_words_per_line,
            "avg_line_length" => self.avg_line_length,
            "line_with_most_3_words_fraction" => self.line_with_most_3_words_fraction,
            other => {
                let n: usize = other
                    .strip_prefix("top_")
                    .or_else(|| other.strip_prefix("duplicated_"))?
                    .strip_suffix("gram_char_fraction")?
                    .parse()
                    .ok()?;
                if other.starts_with("top_") && (2..=4).contains(&n) {
                    self.top_ngram(n)
                } else if other.starts_with("duplicated_") && (5..=10).contains(&n) {
                    self.duplicated_ngram(n)
                } else {
                    return None;
                }
            }
        })
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn compute_metrics(text: &str) -> DocumentMetrics {
    compute_metrics_with(text, 30)
}

/// `short_line_len` sets the cutoff behind `lines_shorter_30_fraction`.
pub fn compute_metrics_with(text: &str, short_line_len: usize) -> DocumentMetrics {
    let mut m = DocumentMetrics::default();

    // Lines and paragraphs.
    let mut lines: Vec<&str> = Vec::new();
    let mut paragraphs: Vec<(usize, usize)> = Vec::new(); // [start, end) into `lines`
    let mut para_start: Option<usize> = None;
    for raw in text.split('\n') {
        let line = raw.trim_end();
        if line.is_empty() {
            if let Some(s) = para_start.take() {
                paragraphs.push((s, lines.len()));
            }
            continue;
        }
        if para_start.is_none() {
            para_start = Some(lines.len());
        }
        lines.push(line);
    }
    if let Some(s) = para_start {
        paragraphs.push((s, lines.len()));
    }

    let line_lens: Vec<usize> = lines.iter().map(|l| l.chars().count()).collect();
    let n_lines = lines.len();
    let total_line_chars: usize = line_lens.iter().sum();
    m.line_count = n_lines;
    m.line_char_count = total_line_chars;

    let mut seen_lines: HashMap<&str, ()> = HashMap::with_capacity(n_lines);
    let (mut dup_lines, mut dup_line_chars) = (0, 0);
    let (mut bullets, mut ellipses, mut punct, mut short, mut few_words) = (0, 0, 0, 0, 0);
    for (line, &len) in lines.iter().zip(&line_lens) {
        if seen_lines.insert(line, ()).is_some() {
            dup_lines += 1;
            dup_line_chars += len;
        }
        if line.trim_start().starts_with(BULLETS) {
            bullets += 1;
        }
        if line.ends_with("...") || line.ends_with('\u{2026}') {
            ellipses += 1;
        }
        if line.ends_with(END_PUNCT) {
            punct += 1;
        }
        if len < short_line_len {
            short += 1;
        }
        if line.split_whitespace().count() <= 3 {
            few_words += 1;
        }
    }
    m.duplicate_line_fraction = ratio(dup_lines, n_lines);
    m.duplicate_line_char_fraction = ratio(dup_line_chars, total_line_chars);
    m.bullet_line_fraction = ratio(bullets, n_lines);
    m.ellipsis_line_fraction = ratio(ellipses, n_lines);
    m.lines_end_punct_fraction = ratio(punct, n_lines);
    m.lines_shorter_30_fraction = ratio(short, n_lines);
    m.line_with_most_3_words_fraction = ratio(few_words, n_lines);
    m.avg_line_length = ratio(total_line_chars, n_lines);

    let mut seen_paras: HashMap<String, ()> = HashMap::with_capacity(paragraphs.len());
    let (mut dup_paras, mut dup_para_chars, mut total_para_chars) = (0, 0, 0);
    for &(s, e) in &paragraphs {
        let len: usize = line_lens[s..e].iter().sum::<usize>() + (e - s - 1);
        total_para_chars += len;
        if seen_paras.insert(lines[s..e].join("\n"), ()).is_some() {
            dup_paras += 1;
            dup_para_chars += len;
        }
    }
    m.duplicate_paragraph_fraction = ratio(dup_paras, paragraphs.len());
    m.duplicate_paragraph_char_fraction = ratio(dup_para_chars, total_para_chars);

    // Words.
    let words: Vec<&str> = text.split_whitespace().collect();
    let n_words = words.len();
    m.word_count = n_words;
    m.avg_words_per_line = ratio(n_words, n_lines);
    let mut word_chars = 0;
    let (mut alpha, mut stops, mut symbols) = (0, 0, 0);
    for w in &words {
        word_chars += w.chars().count();
        if w.chars().any(char::is_alphabetic) {
            alpha += 1;
        }
        let core = w.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase();
        if STOP_WORDS.contains(&core.as_str()) {
            stops += 1;
        }
        symbols += w.matches('#').count() + w.matches("...").count() + w.matches('\u{2026}').count();
    }
    m.mean_word_length = ratio(word_chars, n_words);
    m.alpha_word_fraction = ratio(alpha, n_words);
    m.stop_word_hits = stops;
    m.symbol_to_word_ratio = ratio(symbols, n_words);

    // Word n-grams.
    let lower: Vec<String> = words.iter().map(|w| w.to_lowercase()).collect();
    let lens: Vec<usize> = lower.iter().map(|w| w.chars().count()).collect();
    let total: usize = lens.iter().sum();
    let lower_refs: Vec<&str> = lower.iter().map(String::as_str).collect();
    for (k, &n) in TOP_NGRAM_SIZES.iter().enumerate() {
        m.top_ngram_char_fraction[k] = top_ngram_fraction(&lower_refs, &lens, total, n);
    }
    for (k, &n) in DUP_NGRAM_SIZES.iter().enumerate() {
        m.duplicated_ngram_char_fraction[k] = duplicated_ngram_fraction(&lower_refs, &lens, total, n);
    }
    m
}

fn ngram_positions<'a>(words: &'a [&'a str], n: usize) -> HashMap<&'a [&'a str], Vec<usize>> {
    let mut map: HashMap<&[&str], Vec<usize>> = HashMap::new();
    if words.len() >= n {
        for i in 0..=words.len() - n {
            map.entry(&words[i..i + n]).or_default().push(i);
        }
    }
    map
}

fn covered_chars(starts: &[usize], n: usize, lens: &[usize], mark: &mut [bool]) -> usize {
    let mut sum = 0;
    for &s in starts {
        for j in s..s + n {
            if !mark[j] {
                mark[j] = true;
                sum += lens[j];
            }
        }
    }
    sum
}

/// Coverage of the most frequent n-gram (which must occur at least twice).
/// Ties on frequency take the largest coverage.
fn top_ngram_fraction(words: &[&str], lens: &[usize], total: usize, n: usize) -> f64 {
    let map = ngram_positions(words, n);
    let max_count = map.values().map(Vec::len).max().unwrap_or(0);
    if max_count < 2 {
        return 0.0;
    }
    let mut mark = vec![false; words.len()];
    let best = map
        .values()
        .filter(|p| p.len() == max_count)
        .map(|p| {
            mark.iter_mut().for_each(|m| *m = false);
            covered_chars(p, n, lens, &mut mark)
        })
        .max()
        .unwrap_or(0);
    ratio(best, total)
}

/// Coverage of every n-gram occurring more than once.
fn duplicated_ngram_fraction(words: &[&str], lens: &[usize], total: usize, n: usize) -> f64 {
    let map = ngram_positions(words, n);
    let mut mark = vec![false; words.len()];
    let mut sum = 0;
    for p in map.values().filter(|p| p.len() >= 2) {
        sum += covered_chars(p, n, lens, &mut mark);
    }
    ratio(sum, total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn punctuation_fraction() {
        assert_eq!(compute_metrics("One line.\nTwo line.").lines_end_punct_fraction, 1.0);
    }

    #[test]
    fn duplicate_lines() {
        let m = compute_metrics("abc\nabc\nxyz");
        assert_eq!(m.duplicate_line_fraction, 1.0 / 3.0);
        assert_eq!(m.duplicate_line_char_fraction, 3.0 / 9.0);
    }

    #[test]
    fn short_lines() {
        let mut lines: Vec<String> = (0..7).map(|i| format!("short {i}")).collect();
        lines.extend((0..3).map(|i| format!("this line is definitely longer than thirty characters {i}")));
        let m = compute_metrics(&lines.join("\n"));
        assert_eq!(m.line_count, 10);
        assert_eq!(m.lines_shorter_30_fraction, 0.7);
    }

    #[test]
    fn empty_text() {
        let m = compute_metrics("");
        assert_eq!(m.word_count, 0);
        assert_eq!(m, DocumentMetrics::default());
    }

    #[test]
    fn trailing_whitespace_and_final_newline_do_not_matter() {
        let a = compute_metrics("Alpha beta gamma.\nDelta epsilon.");
        assert_eq!(a, compute_metrics("Alpha beta gamma.   \nDelta epsilon.\n"));
        assert_eq!(a, compute_metrics("Alpha beta gamma.\t\nDelta epsilon.\n\n"));
    }

    #[test]
    fn ngram_fractions() {
        // "a b" occurs twice, covering 4 of 6 single-char words.
        let m = compute_metrics("a b c a b d");
        assert_eq!(m.top_ngram(2), 4.0 / 6.0);
        // Overlapping repeats count each word once: "x x x x x x" has every 5-gram duplicated.
        let m = compute_metrics("x x x x x x");
        assert_eq!(m.duplicated_ngram(5), 1.0);
        assert_eq!(m.duplicated_ngram(6), 0.0);
    }

    #[test]
    fn word_level_stats() {
        let m = compute_metrics("The #tag and... 123 of");
        assert_eq!(m.word_count, 5);
        assert_eq!(m.stop_word_hits, 3);
        assert_eq!(m.symbol_to_word_ratio, 2.0 / 5.0);
        assert_eq!(m.alpha_word_fraction, 4.0 / 5.0);
    }

    #[test]
    fn metric_lookup_by_name() {
        let m = compute_metrics("a b c a b d");
        for name in METRIC_NAMES {
            assert!(m.get(name).is_some(), "{name}");
        }
        assert_eq!(m.get("top_2gram_char_fraction"), Some(4.0 / 6.0));
        assert_eq!(m.get("top_5gram_char_fraction"), None);
        assert_eq!(m.get("nope"), None);
    }
}
