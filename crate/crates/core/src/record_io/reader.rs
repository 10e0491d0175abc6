use std::io::{self, BufRead, Read};

use flate2::bufread::GzDecoder;

use super::{header_value, RawRecord, RecordError, RecordErrorKind, RecordType, WarcError};

const BUF_CAP: usize = 64 * 1024;
const GZIP_MAGIC: [u8; 3] = [0x1f, 0x8b, 0x08];

#[derive(Debug, Clone, Default)]
pub struct ReaderOptions {
    /// Yield only `response` records.
    pub response_only: bool,
    /// Offset of the first byte handed to the reader within the original file.
    pub base_offset: u64,
}

/// Buffered reader that tracks the absolute offset, can record the bytes
/// consumed since a mark, and can push bytes back in front of the stream.
struct Replay<R> {
    inner: R,
    buf: Vec<u8>,
    pos: usize,
    end: usize,
    recording: Option<Vec<u8>>,
    offset: u64,
}

impl<R: Read> Replay<R> {
    fn new(inner: R, offset: u64) -> Self {
        Replay { inner, buf: vec![0; BUF_CAP], pos: 0, end: 0, recording: None, offset }
    }

    /// Make at least `n` bytes visible unless the stream ends first.
    fn peek(&mut self, n: usize) -> io::Result<&[u8]> {
        while self.end - self.pos < n {
            if self.pos > 0 {
                self.buf.copy_within(self.pos..self.end, 0);
                self.end -= self.pos;
                self.pos = 0;
            }
            if self.buf.len() < self.end + n.max(BUF_CAP / 2) {
                self.buf.resize(self.end + n.max(BUF_CAP / 2), 0);
            }
            let got = loop {
                match self.inner.read(&mut self.buf[self.end..]) {
                    Ok(g) => break g,
                    Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
                    Err(e) => return Err(e),
                }
            };
            if got == 0 {
                break;
            }
            self.end += got;
        }
        Ok(&self.buf[self.pos..self.end])
    }

    fn unread(&mut self, data: &[u8]) {
        let mut nb = Vec::with_capacity(data.len() + (self.end - self.pos) + BUF_CAP);
        nb.extend_from_slice(data);
        nb.extend_from_slice(&self.buf[self.pos..self.end]);
        self.end = nb.len();
        self.pos = 0;
        nb.resize(nb.len().max(BUF_CAP), 0);
        self.buf = nb;
        self.offset -= data.len() as u64;
    }

    fn start_recording(&mut self) {
        self.recording = Some(Vec::new());
    }

    fn stop_recording(&mut self) -> Vec<u8> {
        self.recording.take().unwrap_or_default()
    }
}

impl<R: Read> Read for Replay<R> {
    fn read(&mut self, out: &mut [u8]) -> io::Result<usize> {
        let avail = self.fill_buf()?;
        let n = avail.len().min(out.len());
        out[..n].copy_from_slice(&avail[..n]);
        self.consume(n);
        Ok(n)
    }
}

impl<R: Read> BufRead for Replay<R> {
    fn fill_buf(&mut self) -> io::Result<&[u8]> {
        if self.pos == self.end {
            self.peek(1)?;
        }
        Ok(&self.buf[self.pos..self.end])
    }

    fn consume(&mut self, amt: usize) {
        let amt = amt.min(self.end - self.pos);
        if let Some(rec) = self.recording.as_mut() {
            rec.extend_from_slice(&self.buf[self.pos..self.pos + amt]);
        }
        self.pos += amt;
        self.offset += amt as u64;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Gzip,
    Plain,
}

/// Iterator over the records of one WARC stream (`.warc.gz`, `.warc`, `.wet.gz`).
pub struct WarcReader<R> {
    src: Replay<R>,
    mode: Mode,
    path: String,
    opts: ReaderOptions,
    done: bool,
}

impl<R: Read> WarcReader<R> {
    pub fn new(inner: R, source_path: &str) -> Result<Self, WarcError> {
        Self::with_options(inner, source_path, ReaderOptions::default())
    }

    /// Sniffs the first bytes: a gzip member header selects compressed mode,
    /// `WARC/` selects plain mode, anything else is a format error.
    pub fn with_options(inner: R, source_path: &str, opts: ReaderOptions) -> Result<Self, WarcError> {
        let mut src = Replay::new(inner, opts.base_offset);
        let head = src.peek(5).map_err(|source| WarcError::Io { path: source_path.to_string(), source })?;
        let mode = if head.is_empty() || head.starts_with(&GZIP_MAGIC[..2]) {
            Mode::Gzip
        } else if head.starts_with(b"WARC/") {
            Mode::Plain
        } else {
            return Err(WarcError::Format {
                path: source_path.to_string(),
                reason: "neither a gzip member nor a WARC version line".into(),
            });
        };
        Ok(WarcReader { src, mode, path: source_path.to_string(), opts, done: false })
    }

    pub fn is_compressed(&self) -> bool {
        self.mode == Mode::Gzip
    }

    fn err(&self, offset: u64, kind: RecordErrorKind) -> RecordError {
        RecordError { source_path: self.path.clone(), offset, kind }
    }

    fn next_gzip(&mut self) -> Option<Result<RawRecord, RecordError>> {
        let start = self.src.offset;
        match self.src.peek(2) {
            Ok([]) => return None,
            Ok(h) if h.starts_with(&GZIP_MAGIC[..2]) => {}
            Ok(_) => {
                // Garbage between members.
                self.src.consume(1);
                let resync = self.resync_gzip();
                return Some(Err(self.err(
                    start,
                    match resync {
                        Ok(()) => RecordErrorKind::Decompress("bytes outside any gzip member".into()),
                        Err(e) => RecordErrorKind::Io(e.to_string()),
                    },
                )));
            }
            Err(e) => {
                self.done = true;
                return Some(Err(self.err(start, RecordErrorKind::Io(e.to_string()))));
            }
        }

        self.src.start_recording();
        let mut member = Vec::new();
        let res = GzDecoder::new(&mut self.src).read_to_end(&mut member);
        let consumed = self.src.stop_recording();
        if let Err(e) = res {
            if consumed.len() > 1 {
                self.src.unread(&consumed[1..]);
            }
            if let Err(io) = self.resync_gzip() {
                self.done = true;
                return Some(Err(self.err(start, RecordErrorKind::Io(io.to_string()))));
            }
            return Some(Err(self.err(start, RecordErrorKind::Decompress(e.to_string()))));
        }
        Some(parse_member(&member, &self.path, start).map_err(|kind| self.err(start, kind)))
    }

    /// Skip forward to the next gzip member (or the end of the stream). The
    /// magic bytes also turn up inside stored deflate blocks, so a candidate
    /// only counts if a whole member decodes from it; a damaged member right
    /// after the first one is folded into the same error.
    fn resync_gzip(&mut self) -> io::Result<()> {
        loop {
            let window = self.src.peek(GZIP_MAGIC.len())?;
            if window.len() < GZIP_MAGIC.len() {
                let n = window.len();
                self.src.consume(n);
                return Ok(());
            }
            if window[..GZIP_MAGIC.len()] == GZIP_MAGIC {
                if self.member_decodes() {
                    return Ok(());
                }
                self.src.consume(1);
                continue;
            }
            let skip = window[1..].iter().position(|&b| b == GZIP_MAGIC[0]).map_or(window.len(), |p| p + 1);
            self.src.consume(skip);
        }
    }

    /// Trial-decodes the member at the current position without consuming it.
    fn member_decodes(&mut self) -> bool {
        self.src.start_recording();
        let ok = io::copy(&mut GzDecoder::new(&mut self.src), &mut io::sink()).is_ok();
        let consumed = self.src.stop_recording();
        self.src.unread(&consumed);
        ok
    }

    fn next_plain(&mut self) -> Option<Result<RawRecord, RecordError>> {
        // Blank lines between records are tolerated.
        loop {
            match self.src.peek(2) {
                Ok([]) => return None,
                Ok([b'\r', b'\n', ..]) => self.src.consume(2),
                Ok([b'\n', ..]) => self.src.consume(1),
                Ok(_) => break,
                Err(e) => {
                    self.done = true;
                    return Some(Err(self.err(self.src.offset, RecordErrorKind::Io(e.to_string()))));
                }
            }
        }
        let start = self.src.offset;
        match self.read_plain_record(start) {
            Ok(rec) => Some(Ok(rec)),
            Err(kind) => {
                match &kind {
                    RecordErrorKind::MalformedHeader(_) => {
                        if let Err(e) = self.resync_plain() {
                            self.done = true;
                            return Some(Err(self.err(start, RecordErrorKind::Io(e.to_string()))));
                        }
                    }
                    _ => self.done = true,
                }
                Some(Err(self.err(start, kind)))
            }
        }
    }

    fn read_plain_record(&mut self, start: u64) -> Result<RawRecord, RecordErrorKind> {
        let io_err = |e: io::Error| RecordErrorKind::Io(e.to_string());
        let mut line = Vec::new();
        self.src.read_until(b'\n', &mut line).map_err(io_err)?;
        if !line.starts_with(b"WARC/") {
            return Err(RecordErrorKind::MalformedHeader("missing WARC version line".into()));
        }
        let mut headers: Vec<(String, String)> = Vec::new();
        loop {
            line.clear();
            let n = self.src.read_until(b'\n', &mut line).map_err(io_err)?;
            if n == 0 {
                return Err(RecordErrorKind::MalformedHeader("header block not terminated".into()));
            }
            let text = String::from_utf8_lossy(&line);
            let text = text.trim_end_matches(['\r', '\n']);
            if text.is_empty() {
                break;
            }
            push_header_line(&mut headers, text)?;
        }
        let len = content_length(&headers)?;
        let mut payload = Vec::with_capacity(len.min(1 << 24) as usize);
        (&mut self.src).take(len).read_to_end(&mut payload).map_err(io_err)?;
        if (payload.len() as u64) < len {
            return Err(RecordErrorKind::Truncated {
                record_id: header_value(&headers, "WARC-Record-ID").map(str::to_string),
                expected: len,
                got: payload.len() as u64,
            });
        }
        // Trailer: up to two CRLF pairs.
        for _ in 0..2 {
            match self.src.peek(2).map_err(io_err)? {
                [b'\r', b'\n', ..] => self.src.consume(2),
                [b'\n', ..] => self.src.consume(1),
                _ => break,
            }
        }
        RawRecord::from_headers(headers, payload, &self.path, start)
    }

    fn resync_plain(&mut self) -> io::Result<()> {
        loop {
            let head = self.src.peek(5)?;
            if head.is_empty() || head.starts_with(b"WARC/") {
                return Ok(());
            }
            let mut sink = Vec::new();
            self.src.read_until(b'\n', &mut sink)?;
        }
    }
}

impl<R: Read> Iterator for WarcReader<R> {
    type Item = Result<RawRecord, RecordError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.done {
                return None;
            }
            let item = match self.mode {
                Mode::Gzip => self.next_gzip(),
                Mode::Plain => self.next_plain(),
            };
            match item {
                None => {
                    self.done = true;
                    return None;
                }
                Some(Ok(rec)) if self.opts.response_only && rec.record_type != RecordType::Response => continue,
                other => return other,
            }
        }
    }
}

fn push_header_line(headers: &mut Vec<(String, String)>, line: &str) -> Result<(), RecordErrorKind> {
    if line.starts_with([' ', '\t']) {
        // Folded continuation of the previous value.
        return match headers.last_mut() {
            Some((_, v)) => {
                v.push(' ');
                v.push_str(line.trim());
                Ok(())
            }
            None => Err(RecordErrorKind::MalformedHeader("continuation before first header".into())),
        };
    }
    match line.split_once(':') {
        Some((name, value)) if !name.trim().is_empty() && !name.contains(' ') => {
            headers.push((name.trim().to_string(), value.trim().to_string()));
            Ok(())
        }
        _ => Err(RecordErrorKind::MalformedHeader(format!("bad header line {:?}", truncate(line, 64)))),
    }
}

fn truncate(s: &str, n: usize) -> &str {
    match s.char_indices().nth(n) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

fn content_length(headers: &[(String, String)]) -> Result<u64, RecordErrorKind> {
    header_value(headers, "Content-Length")
        .ok_or_else(|| RecordErrorKind::MalformedHeader("missing Content-Length".into()))?
        .parse::<u64>()
        .map_err(|_| RecordErrorKind::MalformedHeader("unparseable Content-Length".into()))
}

/// Parse the decompressed bytes of one gzip member.
fn parse_member(bytes: &[u8], path: &str, offset: u64) -> Result<RawRecord, RecordErrorKind> {
    if !bytes.starts_with(b"WARC/") {
        return Err(RecordErrorKind::MalformedHeader("missing WARC version line".into()));
    }
    let (block_end, body_start) =
        find_header_end(bytes).ok_or_else(|| RecordErrorKind::MalformedHeader("header block not terminated".into()))?;
    let block = String::from_utf8_lossy(&bytes[..block_end]);
    let mut headers = Vec::new();
    for line in block.split('\n').skip(1) {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        push_header_line(&mut headers, line)?;
    }
    let len = content_length(&headers)?;
    let available = (bytes.len() - body_start) as u64;
    if available < len {
        return Err(RecordErrorKind::Truncated {
            record_id: header_value(&headers, "WARC-Record-ID").map(str::to_string),
            expected: len,
            got: available,
        });
    }
    let payload = bytes[body_start..body_start + len as usize].to_vec();
    RawRecord::from_headers(headers, payload, path, offset)
}

/// Returns (end of header block, start of payload).
fn find_header_end(bytes: &[u8]) -> Option<(usize, usize)> {
    let crlf = bytes.windows(4).position(|w| w == b"\r\n\r\n").map(|p| (p, p + 4));
    let lf = bytes.windows(2).position(|w| w == b"\n\n").map(|p| (p, p + 2));
    match (crlf, lf) {
        (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
        (a, b) => a.or(b),
    }
}
