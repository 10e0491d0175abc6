use std::collections::HashSet;
use std::io::BufRead;

use super::{FilterDecision, FilterError, Stage};

/// Blocked domains and URL substrings. Loaded from lines of the form
/// `domain:example.com` or `pattern:casino`; `#` starts a comment and a bare
/// entry is read as a domain.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Blocklist {
    pub domains: HashSet<String>,
    pub patterns: Vec<String>,
}

impl Blocklist {
    pub fn from_reader<R: BufRead>(r: R) -> Result<Self, FilterError> {
        let mut bl = Blocklist::default();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (kind, value) = match line.split_once(':') {
                Some((k, v)) if k.eq_ignore_ascii_case("domain") || k.eq_ignore_ascii_case("pattern") => {
                    (k.to_ascii_lowercase(), v.trim().to_lowercase())
                }
                Some(_) => return Err(FilterError::Blocklist { line: i + 1, reason: "unknown prefix".into() }),
                None => ("domain".to_string(), line.to_lowercase()),
            };
            if value.is_empty() {
                return Err(FilterError::Blocklist { line: i + 1, reason: "empty entry".into() });
            }
            if kind == "domain" {
                bl.domains.insert(value.trim_matches('.').to_string());
            } else {
                bl.patterns.push(value);
            }
        }
        Ok(bl)
    }

    pub fn is_empty(&self) -> bool {
        self.domains.is_empty() && self.patterns.is_empty()
    }
}

fn host_of(url: &str) -> Option<String> {
    if let Ok(u) = url::Url::parse(url) {
        return u.host_str().map(|h| h.trim_end_matches('.').to_lowercase());
    }
    // Scheme-less or otherwise unparseable: take the authority by hand.
    let rest = url.split_once("://").map_or(url, |(_, r)| r);
    let auth = rest.split(['/', '?', '#']).next()?;
    let host = auth.rsplit('@').next()?.split(':').next()?;
    (!host.is_empty()).then(|| host.trim_end_matches('.').to_lowercase())
}

/// Drops a URL whose host or any parent domain is listed, or whose
/// lowercased text contains a listed pattern.
pub fn url_filter(url: &str, blocklist: &Blocklist) -> FilterDecision {
    if let Some(host) = host_of(url) {
        let mut candidate = host.as_str();
        loop {
            if blocklist.domains.contains(candidate) {
                return FilterDecision::drop(Stage::Url, "blocklist_domain", 1.0);
            }
            match candidate.split_once('.') {
                Some((_, parent)) if !parent.is_empty() => candidate = parent,
                _ => break,
            }
        }
    }
    let lower = url.to_lowercase();
    if blocklist.patterns.iter().any(|p| lower.contains(p.as_str())) {
        return FilterDecision::drop(Stage::Url, "blocklist_pattern", 1.0);
    }
    FilterDecision::keep(Stage::Url)
}
