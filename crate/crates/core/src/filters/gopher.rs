use super::rules::first_failure;
use super::{DocumentMetrics, FilterConfig, FilterDecision, Stage};

/// Order: min_words, max_words, mean_word_len, symbol_word_ratio,
/// bullet_lines, ellipsis_lines, alpha_words, stop_words.
pub fn gopher_quality(m: &DocumentMetrics, cfg: &FilterConfig) -> FilterDecision {
    first_failure(&cfg.gopher_quality_rules(), m, Stage::GopherQuality)
}

/// Order: duplicate lines, paragraphs, line chars, paragraph chars, top
/// 2/3/4-grams, duplicated 5..10-grams.
pub fn gopher_repetition(m: &DocumentMetrics, cfg: &FilterConfig) -> FilterDecision {
    first_failure(&cfg.gopher_repetition_rules(), m, Stage::GopherRepetition)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nominal() -> DocumentMetrics {
        DocumentMetrics {
            line_count: 10,
            word_count: 200,
            mean_word_length: 5.0,
            symbol_to_word_ratio: 0.0,
            bullet_line_fraction: 0.1,
            ellipsis_line_fraction: 0.0,
            alpha_word_fraction: 0.95,
            stop_word_hits: 20,
            ..Default::default()
        }
    }

    #[test]
    fn quality_examples() {
        let cfg = FilterConfig::default();
        assert!(gopher_quality(&nominal(), &cfg).keep);
        let d = gopher_quality(&DocumentMetrics { word_count: 49, ..nominal() }, &cfg);
        assert_eq!((d.keep, d.rule_id.as_str(), d.triggering_value), (false, "min_words", 49.0));
        assert_eq!(d.stage, Stage::GopherQuality);
        let d = gopher_quality(&DocumentMetrics { mean_word_length: 11.0, ..nominal() }, &cfg);
        assert_eq!(d.rule_id, "mean_word_len");
        let d = gopher_quality(&DocumentMetrics { mean_word_length: 2.9, ..nominal() }, &cfg);
        assert_eq!(d.rule_id, "mean_word_len");
    }

    #[test]
    fn first_violated_rule_wins() {
        let m = DocumentMetrics { word_count: 10, alpha_word_fraction: 0.1, ..nominal() };
        assert_eq!(gopher_quality(&m, &FilterConfig::default()).rule_id, "min_words");
    }

    #[test]
    fn repetition_examples() {
        let cfg = FilterConfig::default();
        assert!(gopher_repetition(&nominal(), &cfg).keep);
        let d = gopher_repetition(&DocumentMetrics { duplicate_line_char_fraction: 0.25, ..nominal() }, &cfg);
        assert_eq!(d.rule_id, "dup_line_char_frac");
        let mut m = nominal();
        m.top_ngram_char_fraction[0] = 0.5;
        assert_eq!(gopher_repetition(&m, &cfg).rule_id, "top_2gram");
    }
}
