//! Tolerant HTML tokenizer. Never fails: anything that does not parse as
//! markup is passed through as text.

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token<'a> {
    Text(&'a str),
    Start { name: String, self_closing: bool },
    End { name: String },
}

/// Elements whose content is raw text that never reaches the output.
const RAW_TEXT: &[&str] = &["script", "style", "noscript", "template", "textarea", "iframe", "xmp"];

pub struct Tokenizer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Tokenizer<'a> {
    pub fn new(src: &'a str) -> Self {
        Tokenizer { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    /// Skip the body of a raw-text element up to and including `</name ...>`.
    fn skip_raw_text(&mut self, name: &str) {
        let rest = self.rest().as_bytes();
        let mut i = 0;
        while i < rest.len() {
            if rest[i] == b'<'
                && rest.get(i + 1) == Some(&b'/')
                && rest.len() >= i + 2 + name.len()
                && rest[i + 2..i + 2 + name.len()].eq_ignore_ascii_case(name.as_bytes())
                && rest.get(i + 2 + name.len()).map_or(true, |c| !c.is_ascii_alphanumeric())
            {
                let close = rest[i..].iter().position(|&c| c == b'>').map_or(rest.len(), |p| i + p + 1);
                self.pos += close;
                return;
            }
            i += 1;
        }
        self.pos = self.src.len();
    }

    fn skip_past(&mut self, pat: &str) {
        match self.rest().find(pat) {
            Some(p) => self.pos += p + pat.len(),
            None => self.pos = self.src.len(),
        }
    }

    /// Parses a tag starting at `<`. Returns None if this `<` is literal text.
    fn tag(&mut self) -> Option<Token<'a>> {
        let rest = self.rest().as_bytes();
        let (closing, name_start) = match rest.get(1) {
            Some(b'/') => (true, 2),
            _ => (false, 1),
        };
        if !rest.get(name_start).is_some_and(|c| c.is_ascii_alphabetic()) {
            return None;
        }
        let name_len = rest[name_start..]
            .iter()
            .position(|c| c.is_ascii_whitespace() || *c == b'>' || *c == b'/')
            .unwrap_or(rest.len() - name_start);
        let name = self.rest()[name_start..name_start + name_len].to_ascii_lowercase();
        // Scan attributes to the closing '>', honoring quotes.
        let mut i = name_start + name_len;
        let mut quote: Option<u8> = None;
        while i < rest.len() {
            let c = rest[i];
            match quote {
                Some(q) if c == q => quote = None,
                Some(_) => {}
                None if c == b'"' || c == b'\'' => quote = Some(c),
                None if c == b'>' => break,
                None => {}
            }
            i += 1;
        }
        let self_closing = i > 0 && rest.get(i - 1) == Some(&b'/');
        self.pos += (i + 1).min(rest.len());
        Some(if closing { Token::End { name } } else { Token::Start { name, self_closing } })
    }
}

impl<'a> Iterator for Tokenizer<'a> {
    type Item = Token<'a>;

    fn next(&mut self) -> Option<Token<'a>> {
        loop {
            let rest = self.rest();
            if rest.is_empty() {
                return None;
            }
            if !rest.starts_with('<') {
                let end = rest.find('<').unwrap_or(rest.len());
                self.pos += end;
                return Some(Token::Text(&rest[..end]));
            }
            if rest.starts_with("<!--") {
                self.pos += 4;
                self.skip_past("-->");
                continue;
            }
            if rest.starts_with("<!") || rest.starts_with("<?") {
                self.skip_past(">");
                continue;
            }
            match self.tag() {
                Some(Token::Start { name, self_closing }) => {
                    if !self_closing && RAW_TEXT.contains(&name.as_str()) {
                        self.skip_raw_text(&name);
                        continue;
                    }
                    return Some(Token::Start { name, self_closing });
                }
                Some(t) => return Some(t),
                None => {
                    // Literal '<'.
                    self.pos += 1;
                    return Some(Token::Text(&rest[..1]));
                }
            }
        }
    }
}
