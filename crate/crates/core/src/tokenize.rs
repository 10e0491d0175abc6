//! Word tokenizer shared by deduplication and the bias audit.
//!
//! A word is a maximal run of alphabetic characters, lowercased. Everything
//! else (digits, punctuation, whitespace, symbols) separates words.

/// Split `text` into lowercased alphabetic runs.
pub fn words(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        if ch.is_alphabetic() {
            cur.extend(ch.to_lowercase());
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}
