//! Streaming WARC / WET record I/O.
//!
//! Records are framed as
//!
//! ```text
//! WARC/1.0\r\n
//! Name: value\r\n
//! ...
//! \r\n
//! <Content-Length bytes of payload>\r\n\r\n
//! ```
//!
//! and, in compressed files, every record is its own gzip member. The reader
//! decompresses one member at a time, so memory use is bounded by the largest
//! single record. A damaged member is reported with its byte offset and
//! reading resumes at the next gzip member header.

mod reader;
mod wet;
mod writer;

pub use reader::{ReaderOptions, WarcReader};
pub use wet::{dump_from_path, WetReader};
pub use writer::WarcWriter;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RecordType {
    Warcinfo,
    Request,
    Response,
    Conversion,
    Other,
}

impl RecordType {
    pub fn parse(s: &str) -> Self {
        match s.trim().to_ascii_lowercase().as_str() {
            "warcinfo" => RecordType::Warcinfo,
            "request" => RecordType::Request,
            "response" => RecordType::Response,
            "conversion" => RecordType::Conversion,
            _ => RecordType::Other,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RecordType::Warcinfo => "warcinfo",
            RecordType::Request => "request",
            RecordType::Response => "response",
            RecordType::Conversion => "conversion",
            RecordType::Other => "other",
        }
    }
}

/// One parsed archive record.
///
/// `record_type`, `target_uri`, `record_id` and `date` are views of the
/// corresponding `WARC-*` headers; `headers` holds every header in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRecord {
    pub record_type: RecordType,
    pub headers: Vec<(String, String)>,
    pub target_uri: Option<String>,
    pub record_id: String,
    pub date: String,
    pub payload: Vec<u8>,
    pub source_path: String,
    pub byte_offset: u64,
}

impl RawRecord {
    /// Build a record with the standard header set, in the order
    /// `WARC-Type`, `WARC-Record-ID`, `WARC-Date`, `WARC-Target-URI`,
    /// `extra...`, `Content-Length`.
    pub fn new(
        record_type: &str,
        record_id: &str,
        date: &str,
        target_uri: Option<&str>,
        extra: Vec<(String, String)>,
        payload: Vec<u8>,
    ) -> Self {
        let mut headers = vec![
            ("WARC-Type".to_string(), record_type.to_string()),
            ("WARC-Record-ID".to_string(), record_id.to_string()),
            ("WARC-Date".to_string(), date.to_string()),
        ];
        if let Some(uri) = target_uri {
            headers.push(("WARC-Target-URI".to_string(), uri.to_string()));
        }
        headers.extend(extra);
        headers.push(("Content-Length".to_string(), payload.len().to_string()));
        RawRecord {
            record_type: RecordType::parse(record_type),
            headers,
            target_uri: target_uri.map(str::to_string),
            record_id: record_id.to_string(),
            date: date.to_string(),
            payload,
            source_path: String::new(),
            byte_offset: 0,
        }
    }

    /// Case-insensitive header lookup; first match wins.
    pub fn header(&self, name: &str) -> Option<&str> {
        header_value(&self.headers, name)
    }

    /// Equality on everything that is stored in the file (ignores where it was read from).
    pub fn same_content(&self, other: &RawRecord) -> bool {
        self.record_type == other.record_type
            && self.headers == other.headers
            && self.target_uri == other.target_uri
            && self.record_id == other.record_id
            && self.date == other.date
            && self.payload == other.payload
    }

    /// Uncompressed framing: version line, headers, blank line, payload, trailer.
    /// `Content-Length` is always written as the real payload length.
    pub fn to_warc_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.payload.len() + 256);
        out.extend_from_slice(b"WARC/1.0\r\n");
        let mut wrote_len = false;
        for (name, value) in &self.headers {
            if name.eq_ignore_ascii_case("Content-Length") {
                if wrote_len {
                    continue;
                }
                wrote_len = true;
                out.extend_from_slice(format!("{}: {}\r\n", name, self.payload.len()).as_bytes());
            } else {
                out.extend_from_slice(format!("{}: {}\r\n", name, value).as_bytes());
            }
        }
        if !wrote_len {
            out.extend_from_slice(format!("Content-Length: {}\r\n", self.payload.len()).as_bytes());
        }
        out.extend_from_slice(b"\r\n");
        out.extend_from_slice(&self.payload);
        out.extend_from_slice(b"\r\n\r\n");
        out
    }

    pub(crate) fn from_headers(
        headers: Vec<(String, String)>,
        payload: Vec<u8>,
        source_path: &str,
        byte_offset: u64,
    ) -> Result<Self, RecordErrorKind> {
        let record_id = header_value(&headers, "WARC-Record-ID").unwrap_or("").to_string();
        if record_id.is_empty() {
            return Err(RecordErrorKind::MalformedHeader("missing WARC-Record-ID".into()));
        }
        let record_type = RecordType::parse(header_value(&headers, "WARC-Type").unwrap_or(""));
        let date = header_value(&headers, "WARC-Date").unwrap_or("").to_string();
        let target_uri = header_value(&headers, "WARC-Target-URI").map(str::to_string);
        Ok(RawRecord {
            record_type,
            headers,
            target_uri,
            record_id,
            date,
            payload,
            source_path: source_path.to_string(),
            byte_offset,
        })
    }
}

pub(crate) fn header_value<'a>(headers: &'a [(String, String)], name: &str) -> Option<&'a str> {
    headers.iter().find(|(n, _)| n.eq_ignore_ascii_case(name)).map(|(_, v)| v.as_str())
}

/// Errors that stop a stream before any record is produced.
#[derive(Debug, Error)]
pub enum WarcError {
    #[error("{path}: not a WARC stream ({reason})")]
    Format { path: String, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecordErrorKind {
    MalformedHeader(String),
    Truncated { record_id: Option<String>, expected: u64, got: u64 },
    Decompress(String),
    Io(String),
}

/// A problem with one record. The stream keeps going after these.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{source_path}@{offset}: {kind:?}")]
pub struct RecordError {
    pub source_path: String,
    pub offset: u64,
    pub kind: RecordErrorKind,
}
