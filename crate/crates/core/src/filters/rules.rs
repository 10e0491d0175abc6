use xxhash_rust::xxh3::xxh3_64_with_seed;

use super::{DocumentMetrics, FilterConfig, FilterDecision, Stage};

/// Which side of a threshold drops a document.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    /// Drop when `value < t`.
    Below(f64),
    /// Drop when `value <= t`.
    AtOrBelow(f64),
    /// Drop when `value > t`.
    Above(f64),
    /// Drop when `value >= t`.
    AtOrAbove(f64),
}

impl Bound {
    pub fn drops(self, v: f64) -> bool {
        match self {
            Bound::Below(t) => v < t,
            Bound::AtOrBelow(t) => v <= t,
            Bound::Above(t) => v > t,
            Bound::AtOrAbove(t) => v >= t,
        }
    }

    pub fn threshold(self) -> f64 {
        match self {
            Bound::Below(t) | Bound::AtOrBelow(t) | Bound::Above(t) | Bound::AtOrAbove(t) => t,
        }
    }
}

/// A single metric threshold.
#[derive(Debug, Clone, Copy)]
pub struct Rule {
    pub id: &'static str,
    pub stage: Stage,
    pub metric: fn(&DocumentMetrics) -> f64,
    pub bound: Bound,
}

impl Rule {
    pub fn check(&self, m: &DocumentMetrics) -> Option<FilterDecision> {
        let v = (self.metric)(m);
        self.bound.drops(v).then(|| FilterDecision::drop(self.stage, self.id, v))
    }
}

pub(crate) fn first_failure(rules: &[Rule], m: &DocumentMetrics, stage: Stage) -> FilterDecision {
    rules.iter().find_map(|r| r.check(m)).unwrap_or_else(|| FilterDecision::keep(stage))
}

impl FilterConfig {
    pub fn gopher_quality_rules(&self) -> Vec<Rule> {
        let s = Stage::GopherQuality;
        vec![
            Rule {
                id: "min_words",
                stage: s,
                metric: |m| m.word_count as f64,
                bound: Bound::Below(self.gopher_min_words as f64),
            },
            Rule {
                id: "max_words",
                stage: s,
                metric: |m| m.word_count as f64,
                bound: Bound::Above(self.gopher_max_words as f64),
            },
            Rule {
                id: "mean_word_len",
                stage: s,
                metric: |m| m.mean_word_length,
                bound: Bound::Below(self.gopher_mean_word_len_min),
            },
            Rule {
                id: "mean_word_len",
                stage: s,
                metric: |m| m.mean_word_length,
                bound: Bound::Above(self.gopher_mean_word_len_max),
            },
            Rule {
                id: "symbol_word_ratio",
                stage: s,
                metric: |m| m.symbol_to_word_ratio,
                bound: Bound::Above(self.gopher_symbol_word_ratio_max),
            },
            Rule {
                id: "bullet_lines",
                stage: s,
                metric: |m| m.bullet_line_fraction,
                bound: Bound::Above(self.gopher_bullet_frac_max),
            },
            Rule {
                id: "ellipsis_lines",
                stage: s,
                metric: |m| m.ellipsis_line_fraction,
                bound: Bound::Above(self.gopher_ellipsis_frac_max),
            },
            Rule {
                id: "alpha_words",
                stage: s,
                metric: |m| m.alpha_word_fraction,
                bound: Bound::Below(self.gopher_alpha_word_frac_min),
            },
            Rule {
                id: "stop_words",
                stage: s,
                metric: |m| m.stop_word_hits as f64,
                bound: Bound::Below(self.gopher_stop_word_min as f64),
            },
        ]
    }

    pub fn gopher_repetition_rules(&self) -> Vec<Rule> {
        let s = Stage::GopherRepetition;
        vec![
            Rule {
                id: "dup_line_frac",
                stage: s,
                metric: |m| m.duplicate_line_fraction,
                bound: Bound::AtOrAbove(self.gopher_dup_line_frac_max),
            },
            Rule {
                id: "dup_para_frac",
                stage: s,
                metric: |m| m.duplicate_paragraph_fraction,
                bound: Bound::AtOrAbove(self.gopher_dup_para_frac_max),
            },
            Rule {
                id: "dup_line_char_frac",
                stage: s,
                metric: |m| m.duplicate_line_char_fraction,
                bound: Bound::AtOrAbove(self.gopher_dup_line_char_frac_max),
            },
            Rule {
                id: "dup_para_char_frac",
                stage: s,
                metric: |m| m.duplicate_paragraph_char_fraction,
                bound: Bound::AtOrAbove(self.gopher_dup_para_char_frac_max),
            },
            Rule {
                id: "top_2gram",
                stage: s,
                metric: |m| m.top_ngram(2),
                bound: Bound::AtOrAbove(self.top_ngram_max(2)),
            },
            Rule {
                id: "top_3gram",
                stage: s,
                metric: |m| m.top_ngram(3),
                bound: Bound::AtOrAbove(self.top_ngram_max(3)),
            },
            Rule {
                id: "top_4gram",
                stage: s,
                metric: |m| m.top_ngram(4),
                bound: Bound::AtOrAbove(self.top_ngram_max(4)),
            },
            Rule {
                id: "dup_5gram",
                stage: s,
                metric: |m| m.duplicated_ngram(5),
                bound: Bound::AtOrAbove(self.dup_ngram_max(5)),
            },
            Rule {
                id: "dup_6gram",
                stage: s,
                metric: |m| m.duplicated_ngram(6),
                bound: Bound::AtOrAbove(self.dup_ngram_max(6)),
            },
            Rule {
                id: "dup_7gram",
                stage: s,
                metric: |m| m.duplicated_ngram(7),
                bound: Bound::AtOrAbove(self.dup_ngram_max(7)),
            },
            Rule {
                id: "dup_8gram",
                stage: s,
                metric: |m| m.duplicated_ngram(8),
                bound: Bound::AtOrAbove(self.dup_ngram_max(8)),
            },
            Rule {
                id: "dup_9gram",
                stage: s,
                metric: |m| m.duplicated_ngram(9),
                bound: Bound::AtOrAbove(self.dup_ngram_max(9)),
            },
            Rule {
                id: "dup_10gram",
                stage: s,
                metric: |m| m.duplicated_ngram(10),
                bound: Bound::AtOrAbove(self.dup_ngram_max(10)),
            },
        ]
    }

    /// The three core custom rules followed by whichever optional ones are enabled.
    /// The punctuation rule is left out here when `punct_allow_zero` is set,
    /// because that variant is not a single bound; see [`fineweb_custom_with`].
    pub fn fineweb_custom_rules(&self) -> Vec<Rule> {
        let s = Stage::FinewebCustom;
        let mut rules = vec![
            Rule {
                id: "line_punct_ratio",
                stage: s,
                metric: |m| m.lines_end_punct_fraction,
                bound: Bound::AtOrBelow(self.punct_line_max),
            },
            Rule {
                id: "dup_line_char_ratio",
                stage: s,
                metric: |m| m.duplicate_line_char_fraction,
                bound: Bound::AtOrAbove(self.dup_line_char_max),
            },
            Rule {
                id: "short_line_ratio",
                stage: s,
                metric: |m| m.lines_shorter_30_fraction,
                bound: Bound::AtOrAbove(self.short_line_max),
            },
        ];
        if self.max_3_words_line_enabled {
            rules.push(Rule {
                id: "max_3_words_line_ratio",
                stage: s,
                metric: |m| m.line_with_most_3_words_fraction,
                bound: Bound::Above(self.max_3_words_line_max),
            });
        }
        if self.avg_words_per_line_enabled {
            rules.push(Rule {
                id: "avg_words_per_line",
                stage: s,
                metric: |m| m.avg_words_per_line,
                bound: Bound::Below(self.avg_words_per_line_min),
            });
        }
        if self.avg_line_length_enabled {
            rules.push(Rule {
                id: "avg_line_length",
                stage: s,
                metric: |m| m.avg_line_length,
                bound: Bound::Below(self.avg_line_length_min),
            });
        }
        rules
    }
}

/// Seeded Bernoulli membership used by the sampled rule variants.
pub fn in_sample(seed: u64, doc_id: &str, rate: f64) -> bool {
    if rate >= 1.0 {
        return true;
    }
    let u = (xxh3_64_with_seed(doc_id.as_bytes(), seed) >> 11) as f64 / (1u64 << 53) as f64;
    u < rate
}

pub fn fineweb_custom(m: &DocumentMetrics, cfg: &FilterConfig) -> FilterDecision {
    fineweb_custom_with(m, cfg, true)
}

/// `sampled_in` says whether this document falls in the sample the
/// average-line-length rule applies to.
pub fn fineweb_custom_with(m: &DocumentMetrics, cfg: &FilterConfig, sampled_in: bool) -> FilterDecision {
    for rule in cfg.fineweb_custom_rules() {
        if rule.id == "line_punct_ratio" && cfg.punct_allow_zero && m.lines_end_punct_fraction == 0.0 {
            continue;
        }
        if rule.id == "avg_line_length" && !sampled_in {
            continue;
        }
        if let Some(d) = rule.check(m) {
            return d;
        }
    }
    FilterDecision::keep(Stage::FinewebCustom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clean() -> DocumentMetrics {
        DocumentMetrics {
            lines_end_punct_fraction: 0.5,
            duplicate_line_char_fraction: 0.0,
            lines_shorter_30_fraction: 0.2,
            avg_words_per_line: 10.0,
            avg_line_length: 60.0,
            ..Default::default()
        }
    }

    #[test]
    fn custom_bounds_are_inclusive() {
        let cfg = FilterConfig::default();
        let mut m = clean();
        assert!(fineweb_custom(&m, &cfg).keep);
        m.lines_end_punct_fraction = 0.12;
        let d = fineweb_custom(&m, &cfg);
        assert!(!d.keep);
        assert_eq!(d.rule_id, "line_punct_ratio");
        m.lines_end_punct_fraction = 0.13;
        assert!(fineweb_custom(&m, &cfg).keep);
        m.lines_shorter_30_fraction = 0.67;
        assert_eq!(fineweb_custom(&m, &cfg).rule_id, "short_line_ratio");
        let mut m = clean();
        m.duplicate_line_char_fraction = 0.1;
        assert_eq!(fineweb_custom(&m, &cfg).rule_id, "dup_line_char_ratio");
    }

    #[test]
    fn allow_zero_variant() {
        let cfg = FilterConfig { punct_allow_zero: true, ..Default::default() };
        let mut m = clean();
        m.lines_end_punct_fraction = 0.0;
        assert!(fineweb_custom(&m, &cfg).keep);
        m.lines_end_punct_fraction = 0.05;
        assert!(!fineweb_custom(&m, &cfg).keep);
    }

    #[test]
    fn raising_punct_threshold_never_rescues() {
        let m = DocumentMetrics { lines_end_punct_fraction: 0.1, ..clean() };
        let mut cfg = FilterConfig::default();
        for t in [0.1, 0.12, 0.2, 0.5, 0.9] {
            cfg.punct_line_max = t;
            assert!(!fineweb_custom(&m, &cfg).keep);
        }
    }

    #[test]
    fn sampled_rule_only_applies_in_sample() {
        let cfg =
            FilterConfig { avg_line_length_enabled: true, avg_line_length_sample_rate: 0.5, ..Default::default() };
        let m = DocumentMetrics { avg_line_length: 40.0, ..clean() };
        assert!(!fineweb_custom_with(&m, &cfg, true).keep);
        assert!(fineweb_custom_with(&m, &cfg, false).keep);
        let hits = (0..10_000).filter(|i| in_sample(3, &format!("doc{i}"), 0.5)).count();
        assert!((4_700..5_300).contains(&hits), "{hits}");
        assert!(in_sample(3, "x", 1.0));
    }
}
