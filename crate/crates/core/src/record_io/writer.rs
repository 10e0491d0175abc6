use std::io::{self, Write};

use flate2::{write::GzEncoder, Compression};

use super::RawRecord;

/// Minimal WARC writer. In gzip mode every record becomes its own member,
/// which is the layout the reader resumes on.
pub struct WarcWriter<W: Write> {
    inner: W,
    gzip: bool,
    offset: u64,
}

impl<W: Write> WarcWriter<W> {
    pub fn new(inner: W, gzip: bool) -> Self {
        WarcWriter { inner, gzip, offset: 0 }
    }

    /// Writes one record and returns the byte offset it starts at.
    pub fn write_record(&mut self, rec: &RawRecord) -> io::Result<u64> {
        let start = self.offset;
        let raw = rec.to_warc_bytes();
        let bytes = if self.gzip {
            let mut enc = GzEncoder::new(Vec::with_capacity(raw.len() / 2 + 64), Compression::default());
            enc.write_all(&raw)?;
            enc.finish()?
        } else {
            raw
        };
        self.inner.write_all(&bytes)?;
        self.offset += bytes.len() as u64;
        Ok(start)
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn into_inner(self) -> W {
        self.inner
    }
}
