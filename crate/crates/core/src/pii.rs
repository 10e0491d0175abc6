//! Email and public IPv4 anonymization.
//!
//! Email: a maximal run of `[A-Za-z0-9._%+@-]` characters, less any trailing
//! dots, that matches `[A-Za-z0-9._%+-]+ @ label(.label)* . [A-Za-z]{2,}` in
//! full, where a label is `[A-Za-z0-9-]+`. Each becomes [`EMAIL_SUBSTITUTE`].
//! Matching whole runs keeps a substitute from fusing with its neighbours.
//!
//! IPv4: a maximal run of digits and dots with exactly four parts of one to
//! three digits, each at most 255, not touching a letter or digit on either
//! side. Addresses in [`PRIVATE_RANGES`] are left alone and counted; addresses
//! in the documentation ranges of [`SUBSTITUTE_RANGES`] are left alone and not
//! counted, which makes the scrub idempotent. Anything else is replaced by the
//! next entry of [`IP_SUBSTITUTES`], cycling per call.

use std::net::Ipv4Addr;
use std::ops::AddAssign;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

pub const EMAIL_SUBSTITUTE: &str = "email@example.com";
pub const IP_SUBSTITUTES: &[&str] = &["192.0.2.1", "198.51.100.1", "203.0.113.1"];

/// `(network, prefix length)`.
pub const PRIVATE_RANGES: &[([u8; 4], u8)] = &[
    ([10, 0, 0, 0], 8),
    ([172, 16, 0, 0], 12),
    ([192, 168, 0, 0], 16),
    ([127, 0, 0, 0], 8),
    ([169, 254, 0, 0], 16),
    ([0, 0, 0, 0], 8),
    ([224, 0, 0, 0], 4),
    ([240, 0, 0, 0], 4),
];
pub const SUBSTITUTE_RANGES: &[([u8; 4], u8)] =
    &[([192, 0, 2, 0], 24), ([198, 51, 100, 0], 24), ([203, 0, 113, 0], 24)];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScrubReport {
    pub emails_replaced: u64,
    pub ips_replaced: u64,
    pub ips_skipped_private: u64,
}

impl ScrubReport {
    pub fn replacements(&self) -> u64 {
        self.emails_replaced + self.ips_replaced
    }
}

impl AddAssign for ScrubReport {
    fn add_assign(&mut self, o: Self) {
        self.emails_replaced += o.emails_replaced;
        self.ips_replaced += o.ips_replaced;
        self.ips_skipped_private += o.ips_skipped_private;
    }
}

fn email_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^[A-Za-z0-9._%+\-]+@[A-Za-z0-9\-]+(?:\.[A-Za-z0-9\-]+)*\.[A-Za-z]{2,}$").unwrap())
}

fn email_run_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[A-Za-z0-9._%+@\-]+").unwrap())
}

/// Email addresses in `text`, as byte ranges.
pub fn find_emails(text: &str) -> Vec<(usize, usize)> {
    email_run_regex()
        .find_iter(text)
        .filter_map(|m| {
            let core = m.as_str().trim_end_matches('.');
            email_regex().is_match(core).then(|| (m.start(), m.start() + core.len()))
        })
        .collect()
}

fn digit_run_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[0-9]+(?:\.[0-9]+)*").unwrap())
}

fn in_range(ip: u32, ranges: &[([u8; 4], u8)]) -> bool {
    ranges.iter().any(|(net, len)| {
        let mask = if *len == 0 { 0 } else { u32::MAX << (32 - len) };
        ip & mask == u32::from_be_bytes(*net) & mask
    })
}

pub fn is_private(ip: Ipv4Addr) -> bool {
    in_range(ip.into(), PRIVATE_RANGES)
}

/// Dotted quads in `text`, as `(start, end, address)`.
pub fn find_ipv4(text: &str) -> Vec<(usize, usize, Ipv4Addr)> {
    let mut out = Vec::new();
    for m in digit_run_regex().find_iter(text) {
        let before = text[..m.start()].chars().next_back();
        let after = text[m.end()..].chars().next();
        if before.is_some_and(char::is_alphanumeric) || after.is_some_and(char::is_alphanumeric) {
            continue;
        }
        let parts: Vec<&str> = m.as_str().split('.').collect();
        if parts.len() != 4 || parts.iter().any(|p| p.len() > 3) {
            continue;
        }
        let octets: Vec<u16> = parts.iter().map(|p| p.parse().unwrap()).collect();
        if octets.iter().any(|o| *o > 255) {
            continue;
        }
        let ip = Ipv4Addr::new(octets[0] as u8, octets[1] as u8, octets[2] as u8, octets[3] as u8);
        out.push((m.start(), m.end(), ip));
    }
    out
}

pub fn anonymize(text: &str) -> (String, ScrubReport) {
    let mut report = ScrubReport::default();
    let mut emails = String::with_capacity(text.len());
    let mut last = 0;
    for (s, e) in find_emails(text) {
        if &text[s..e] != EMAIL_SUBSTITUTE {
            report.emails_replaced += 1;
        }
        emails.push_str(&text[last..s]);
        emails.push_str(EMAIL_SUBSTITUTE);
        last = e;
    }
    emails.push_str(&text[last..]);
    let mut out = String::with_capacity(emails.len());
    let mut last = 0;
    let mut next_sub = 0;
    for (s, e, ip) in find_ipv4(&emails) {
        let v: u32 = ip.into();
        if in_range(v, PRIVATE_RANGES) {
            report.ips_skipped_private += 1;
            continue;
        }
        if in_range(v, SUBSTITUTE_RANGES) {
            continue;
        }
        out.push_str(&emails[last..s]);
        out.push_str(IP_SUBSTITUTES[next_sub % IP_SUBSTITUTES.len()]);
        next_sub += 1;
        report.ips_replaced += 1;
        last = e;
    }
    out.push_str(&emails[last..]);
    (out, report)
}
