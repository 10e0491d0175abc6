//! Main-content extraction from HTML responses.
//!
//! The heuristic:
//!
//! 1. decode with the declared charset, else a `<meta charset>` found in the
//!    first 1024 bytes, else UTF-8 with replacement;
//! 2. drop comments and the bodies of `script`, `style` and similar raw-text
//!    elements;
//! 3. drop everything inside `head`, `nav`, `header`, `footer`, `aside`,
//!    `form`, `select`, `button` and `svg`;
//! 4. split the remaining text into lines at block-level element boundaries;
//! 5. drop lines whose link-character density exceeds
//!    [`ExtractConfig::max_link_density`], and lines shorter than
//!    [`ExtractConfig::min_line_chars`] unless they end in sentence-final
//!    punctuation;
//! 6. reject the page if fewer than [`ExtractConfig::min_lines`] lines survive.

mod html;
mod normalize;

pub use html::{Token, Tokenizer};
pub use normalize::normalize_text;

use std::sync::OnceLock;

use encoding_rs::Encoding;
use regex::bytes::Regex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtractionMode {
    HeuristicWarc,
    WetPassthrough,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedText {
    pub text: String,
    pub line_count: usize,
    pub mode: ExtractionMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rejection {
    NotHtml,
    Empty,
    TooFewLines,
}

impl Rejection {
    pub fn code(self) -> &'static str {
        match self {
            Rejection::NotHtml => "not_html",
            Rejection::Empty => "empty",
            Rejection::TooFewLines => "too_few_lines",
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct ExtractConfig {
    pub max_link_density: f64,
    pub min_line_chars: usize,
    pub min_lines: usize,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig { max_link_density: 0.5, min_line_chars: 10, min_lines: 1 }
    }
}

const SKIP_ELEMENTS: &[&str] = &["head", "nav", "header", "footer", "aside", "form", "select", "button", "svg"];

const BLOCK_ELEMENTS: &[&str] = &[
    "address",
    "article",
    "blockquote",
    "body",
    "br",
    "caption",
    "center",
    "dd",
    "details",
    "div",
    "dl",
    "dt",
    "fieldset",
    "figcaption",
    "figure",
    "h1",
    "h2",
    "h3",
    "h4",
    "h5",
    "h6",
    "hr",
    "html",
    "li",
    "main",
    "ol",
    "option",
    "p",
    "pre",
    "section",
    "summary",
    "table",
    "tbody",
    "td",
    "tfoot",
    "th",
    "thead",
    "title",
    "tr",
    "ul",
];

const SENTENCE_END: &[char] = &['.', '!', '?', '"', '\'', '\u{2026}', '\u{201d}'];

pub fn extract_main_text(html: &[u8], declared_charset: Option<&str>) -> Result<ExtractedText, Rejection> {
    extract_main_text_with(html, declared_charset, &ExtractConfig::default())
}

pub fn extract_main_text_with(
    html: &[u8],
    declared_charset: Option<&str>,
    cfg: &ExtractConfig,
) -> Result<ExtractedText, Rejection> {
    let decoded = decode(html, declared_charset);
    let head: String = decoded.chars().take(1024).collect();
    if !head.contains('<') {
        return Err(Rejection::NotHtml);
    }
    if decoded.trim().is_empty() {
        return Err(Rejection::Empty);
    }

    let lines = segment(&decoded);
    let kept: Vec<String> = lines
        .into_iter()
        .filter(|l| l.link_density() <= cfg.max_link_density)
        .filter(|l| l.text.chars().count() >= cfg.min_line_chars || l.text.ends_with(SENTENCE_END))
        .map(|l| l.text)
        .collect();
    if kept.is_empty() {
        return Err(Rejection::Empty);
    }
    if kept.len() < cfg.min_lines {
        return Err(Rejection::TooFewLines);
    }
    let text = normalize_text(&kept.join("\n"));
    let line_count = text.lines().filter(|l| !l.trim().is_empty()).count();
    Ok(ExtractedText { text, line_count, mode: ExtractionMode::HeuristicWarc })
}

/// Text that arrived pre-extracted (WET conversion records).
pub fn wet_passthrough(text: &str) -> ExtractedText {
    let text = normalize_text(text);
    let line_count = text.lines().filter(|l| !l.trim().is_empty()).count();
    ExtractedText { text, line_count, mode: ExtractionMode::WetPassthrough }
}

/// Split an HTTP response into (charset from Content-Type, body). Payloads that
/// do not start with a status line are returned whole.
pub fn split_http_response(payload: &[u8]) -> (Option<String>, &[u8]) {
    if !payload.starts_with(b"HTTP/") {
        return (None, payload);
    }
    let (head_end, body_start) = match payload.windows(4).position(|w| w == b"\r\n\r\n") {
        Some(p) => (p, p + 4),
        None => match payload.windows(2).position(|w| w == b"\n\n") {
            Some(p) => (p, p + 2),
            None => return (None, &payload[payload.len()..]),
        },
    };
    let head = String::from_utf8_lossy(&payload[..head_end]);
    let charset = head.lines().find_map(|l| {
        let (k, v) = l.split_once(':')?;
        if !k.trim().eq_ignore_ascii_case("content-type") {
            return None;
        }
        v.split(';').find_map(|p| {
            let (k, v) = p.split_once('=')?;
            k.trim().eq_ignore_ascii_case("charset").then(|| v.trim().trim_matches('"').to_string())
        })
    });
    (charset, &payload[body_start..])
}

fn decode(bytes: &[u8], declared: Option<&str>) -> String {
    static META: OnceLock<Regex> = OnceLock::new();
    let label = declared.map(|s| s.as_bytes().to_vec()).or_else(|| {
        let re = META.get_or_init(|| Regex::new(r#"(?i)<meta[^>]*charset\s*=\s*["']?([A-Za-z0-9_:.\-]+)"#).unwrap());
        let window = &bytes[..bytes.len().min(1024)];
        re.captures(window).map(|c| c[1].to_vec())
    });
    let enc = label.and_then(|l| Encoding::for_label(&l)).unwrap_or(encoding_rs::UTF_8);
    enc.decode(bytes).0.into_owned()
}

struct Line {
    text: String,
    chars: usize,
    link_chars: usize,
}

impl Line {
    fn link_density(&self) -> f64 {
        if self.chars == 0 {
            0.0
        } else {
            self.link_chars as f64 / self.chars as f64
        }
    }
}

#[derive(Default)]
struct Segmenter {
    lines: Vec<Line>,
    cur: String,
    chars: usize,
    link_chars: usize,
    pending_space: bool,
    link_depth: usize,
    skip: Vec<(&'static str, usize)>,
}

impl Segmenter {
    fn skipping(&self) -> bool {
        self.skip.iter().any(|(_, d)| *d > 0)
    }

    fn skip_entry(&mut self, name: &str) -> Option<&mut usize> {
        let tag = SKIP_ELEMENTS.iter().find(|t| **t == name)?;
        if let Some(i) = self.skip.iter().position(|(t, _)| t == tag) {
            return Some(&mut self.skip[i].1);
        }
        self.skip.push((tag, 0));
        self.skip.last_mut().map(|(_, d)| d)
    }

    fn push_text(&mut self, raw: &str) {
        if self.skipping() {
            return;
        }
        let decoded = html_escape::decode_html_entities(raw);
        for ch in decoded.chars() {
            if ch.is_whitespace() {
                self.pending_space = !self.cur.is_empty();
                continue;
            }
            if self.pending_space {
                self.cur.push(' ');
                self.pending_space = false;
            }
            self.cur.push(ch);
            self.chars += 1;
            if self.link_depth > 0 {
                self.link_chars += 1;
            }
        }
    }

    fn break_line(&mut self) {
        if !self.cur.is_empty() {
            self.lines.push(Line {
                text: std::mem::take(&mut self.cur),
                chars: self.chars,
                link_chars: self.link_chars,
            });
        }
        self.chars = 0;
        self.link_chars = 0;
        self.pending_space = false;
    }

    fn start(&mut self, name: &str, self_closing: bool) {
        if name == "body" {
            // An unclosed <head> ends where the body begins.
            if let Some(d) = self.skip_entry("head") {
                *d = 0;
            }
        }
        if BLOCK_ELEMENTS.contains(&name) {
            self.break_line();
        }
        if self_closing {
            return;
        }
        if name == "a" {
            self.link_depth += 1;
        }
        if let Some(d) = self.skip_entry(name) {
            *d += 1;
        }
    }

    fn end(&mut self, name: &str) {
        if BLOCK_ELEMENTS.contains(&name) {
            self.break_line();
        }
        if name == "a" {
            self.link_depth = self.link_depth.saturating_sub(1);
        }
        if name == "body" || name == "html" {
            self.skip.clear();
            self.link_depth = 0;
        }
        if let Some(d) = self.skip_entry(name) {
            *d = d.saturating_sub(1);
        }
    }
}

fn segment(html: &str) -> Vec<Line> {
    let mut seg = Segmenter::default();
    for tok in Tokenizer::new(html) {
        match tok {
            Token::Text(t) => seg.push_text(t),
            Token::Start { name, self_closing } => seg.start(&name, self_closing),
            Token::End { name } => seg.end(&name),
        }
    }
    seg.break_line();
    seg.lines
}
