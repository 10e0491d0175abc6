use serde::{Deserialize, Serialize};

use super::FilterError;
use crate::extract::ExtractConfig;

/// Where a default threshold comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Published value of the reference configuration.
    Published,
    /// Original MassiveText / Gopher rule threshold.
    GopherDefault,
    /// Original C4 heuristic value.
    C4Default,
    /// Chosen for this implementation.
    Invented,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Published => "published",
            Provenance::GopherDefault => "gopher-default",
            Provenance::C4Default => "c4-default",
            Provenance::Invented => "invented",
        }
    }
}

macro_rules! filter_config {
    ($( $(#[$doc:meta])* $name:ident : $ty:ty = $default:expr => $prov:ident; )*) => {
        /// Every rule threshold, flat so it serializes as plain `key = value` lines.
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(default, deny_unknown_fields)]
        pub struct FilterConfig {
            $( $(#[$doc])* pub $name: $ty, )*
        }

        impl Default for FilterConfig {
            fn default() -> Self {
                FilterConfig { $( $name: $default, )* }
            }
        }

        impl FilterConfig {
            pub const PROVENANCE: &'static [(&'static str, Provenance)] = &[
                $( (stringify!($name), Provenance::$prov), )*
            ];
        }
    };
}

filter_config! {
    lang_threshold: f64 = 0.65 => Published;

    // Custom rules.
    punct_line_max: f64 = 0.12 => Published;
    /// Keep documents with no punctuated line at all (table variant "or = 0").
    punct_allow_zero: bool = false => Published;
    dup_line_char_max: f64 = 0.1 => Published;
    short_line_max: f64 = 0.67 => Published;
    short_line_len: usize = 30 => Published;
    max_3_words_line_enabled: bool = false => Invented;
    max_3_words_line_max: f64 = 0.49 => Published;
    avg_words_per_line_enabled: bool = false => Invented;
    avg_words_per_line_min: f64 = 7.0 => Published;
    avg_line_length_enabled: bool = false => Invented;
    avg_line_length_min: f64 = 56.0 => Published;
    /// Fraction of documents the average-line-length rule is applied to.
    avg_line_length_sample_rate: f64 = 1.0 => Published;

    // C4.
    c4_word_lengths_enabled: bool = true => Published;
    c4_min_words_per_line: usize = 3 => C4Default;
    c4_min_sentences: usize = 5 => C4Default;
    c4_terminal_punct_enabled: bool = false => Published;

    // Gopher quality.
    gopher_min_words: usize = 50 => GopherDefault;
    gopher_max_words: usize = 100_000 => GopherDefault;
    gopher_mean_word_len_min: f64 = 3.0 => GopherDefault;
    gopher_mean_word_len_max: f64 = 10.0 => GopherDefault;
    gopher_symbol_word_ratio_max: f64 = 0.1 => GopherDefault;
    gopher_bullet_frac_max: f64 = 0.9 => GopherDefault;
    gopher_ellipsis_frac_max: f64 = 0.3 => GopherDefault;
    gopher_alpha_word_frac_min: f64 = 0.8 => GopherDefault;
    gopher_stop_word_min: usize = 2 => GopherDefault;

    // Gopher repetition.
    gopher_dup_line_frac_max: f64 = 0.3 => GopherDefault;
    gopher_dup_para_frac_max: f64 = 0.3 => GopherDefault;
    gopher_dup_line_char_frac_max: f64 = 0.2 => Published;
    gopher_dup_para_char_frac_max: f64 = 0.2 => GopherDefault;
    gopher_top_2gram_max: f64 = 0.2 => GopherDefault;
    gopher_top_3gram_max: f64 = 0.18 => GopherDefault;
    gopher_top_4gram_max: f64 = 0.16 => GopherDefault;
    gopher_dup_5gram_max: f64 = 0.15 => GopherDefault;
    gopher_dup_6gram_max: f64 = 0.14 => GopherDefault;
    gopher_dup_7gram_max: f64 = 0.13 => GopherDefault;
    gopher_dup_8gram_max: f64 = 0.12 => GopherDefault;
    gopher_dup_9gram_max: f64 = 0.11 => GopherDefault;
    gopher_dup_10gram_max: f64 = 0.10 => GopherDefault;

    // Extraction.
    extract_max_link_density: f64 = 0.5 => Invented;
    extract_min_line_chars: usize = 10 => Invented;
    extract_min_lines: usize = 1 => Invented;
}

impl FilterConfig {
    pub fn provenance(field: &str) -> Option<Provenance> {
        Self::PROVENANCE.iter().find(|(n, _)| *n == field).map(|(_, p)| *p)
    }

    pub fn top_ngram_max(&self, n: usize) -> f64 {
        [self.gopher_top_2gram_max, self.gopher_top_3gram_max, self.gopher_top_4gram_max][n - 2]
    }

    pub fn dup_ngram_max(&self, n: usize) -> f64 {
        [
            self.gopher_dup_5gram_max,
            self.gopher_dup_6gram_max,
            self.gopher_dup_7gram_max,
            self.gopher_dup_8gram_max,
            self.gopher_dup_9gram_max,
            self.gopher_dup_10gram_max,
        ][n - 5]
    }

    pub fn extract_config(&self) -> ExtractConfig {
        ExtractConfig {
            max_link_density: self.extract_max_link_density,
            min_line_chars: self.extract_min_line_chars,
            min_lines: self.extract_min_lines,
        }
    }

    pub fn validate(&self) -> Result<(), FilterError> {
        let fractions = [
            ("lang_threshold", self.lang_threshold),
            ("punct_line_max", self.punct_line_max),
            ("dup_line_char_max", self.dup_line_char_max),
            ("short_line_max", self.short_line_max),
            ("max_3_words_line_max", self.max_3_words_line_max),
            ("avg_line_length_sample_rate", self.avg_line_length_sample_rate),
            ("gopher_symbol_word_ratio_max", self.gopher_symbol_word_ratio_max),
            ("gopher_bullet_frac_max", self.gopher_bullet_frac_max),
            ("gopher_ellipsis_frac_max", self.gopher_ellipsis_frac_max),
            ("gopher_alpha_word_frac_min", self.gopher_alpha_word_frac_min),
            ("gopher_dup_line_frac_max", self.gopher_dup_line_frac_max),
            ("gopher_dup_para_frac_max", self.gopher_dup_para_frac_max),
            ("gopher_dup_line_char_frac_max", self.gopher_dup_line_char_frac_max),
            ("gopher_dup_para_char_frac_max", self.gopher_dup_para_char_frac_max),
            ("gopher_top_2gram_max", self.gopher_top_2gram_max),
            ("gopher_top_3gram_max", self.gopher_top_3gram_max),
            ("gopher_top_4gram_max", self.gopher_top_4gram_max),
            ("gopher_dup_5gram_max", self.gopher_dup_5gram_max),
            ("gopher_dup_6gram_max", self.gopher_dup_6gram_max),
            ("gopher_dup_7gram_max", self.gopher_dup_7gram_max),
            ("gopher_dup_8gram_max", self.gopher_dup_8gram_max),
            ("gopher_dup_9gram_max", self.gopher_dup_9gram_max),
            ("gopher_dup_10gram_max", self.gopher_dup_10gram_max),
            ("extract_max_link_density", self.extract_max_link_density),
        ];
        for (name, v) in fractions {
            if !(0.0..=1.0).contains(&v) {
                return Err(FilterError::OutOfRange { field: name, value: v.to_string() });
            }
        }
        for (name, v) in [
            ("avg_words_per_line_min", self.avg_words_per_line_min),
            ("avg_line_length_min", self.avg_line_length_min),
            ("gopher_mean_word_len_min", self.gopher_mean_word_len_min),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(FilterError::OutOfRange { field: name, value: v.to_string() });
            }
        }
        if !(self.gopher_mean_word_len_max >= self.gopher_mean_word_len_min) {
            return Err(FilterError::OutOfRange {
                field: "gopher_mean_word_len_max",
                value: self.gopher_mean_word_len_max.to_string(),
            });
        }
        if self.gopher_max_words < self.gopher_min_words {
            return Err(FilterError::OutOfRange {
                field: "gopher_max_words",
                value: self.gopher_max_words.to_string(),
            });
        }
        if self.short_line_len == 0 {
            return Err(FilterError::OutOfRange { field: "short_line_len", value: "0".into() });
        }
        Ok(())
    }

    /// `key = value  # provenance` lines, loadable with [`FilterConfig::from_toml`].
    pub fn to_annotated_toml(&self) -> String {
        let plain = toml::to_string(self).expect("flat config serializes");
        let mut out = String::new();
        for line in plain.lines() {
            let key = line.split('=').next().unwrap_or("").trim();
            match Self::provenance(key) {
                Some(p) => out.push_str(&format!("{line}  # {}\n", p.as_str())),
                None => {
                    out.push_str(line);
                    out.push('\n');
                }
            }
        }
        out
    }

    pub fn from_toml(s: &str) -> Result<Self, FilterError> {
        let cfg: FilterConfig = toml::from_str(s).map_err(|e| FilterError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}
