use std::io::Read;
use std::sync::OnceLock;

use regex::Regex;

use super::{RecordError, RecordType, WarcError, WarcReader};
use crate::document::Document;

/// Snapshot id (`CC-MAIN-YYYY-WW`) embedded in a path, if any.
pub fn dump_from_path(path: &str) -> Option<String> {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| Regex::new(r"CC-MAIN-\d{4}-\d{2}").unwrap());
    re.find(path).map(|m| m.as_str().to_string())
}

fn dump_from_warcinfo(payload: &[u8]) -> Option<String> {
    String::from_utf8_lossy(payload).lines().find_map(|l| {
        let (k, v) = l.split_once(':')?;
        (k.trim().eq_ignore_ascii_case("isPartOf") && !v.trim().is_empty()).then(|| v.trim().to_string())
    })
}

/// Reads the `conversion` records of a WET file as documents. The snapshot id
/// comes from the `warcinfo` record's `isPartOf` field, falling back to the path.
pub struct WetReader<R> {
    inner: WarcReader<R>,
    dump: String,
}

impl<R: Read> WetReader<R> {
    pub fn new(inner: R, source_path: &str) -> Result<Self, WarcError> {
        Ok(WetReader {
            inner: WarcReader::new(inner, source_path)?,
            dump: dump_from_path(source_path).unwrap_or_default(),
        })
    }
}

impl<R: Read> Iterator for WetReader<R> {
    type Item = Result<Document, RecordError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let rec = match self.inner.next()? {
                Ok(r) => r,
                Err(e) => return Some(Err(e)),
            };
            match rec.record_type {
                RecordType::Warcinfo => {
                    if let Some(d) = dump_from_warcinfo(&rec.payload) {
                        self.dump = d;
                    }
                }
                RecordType::Conversion => {
                    return Some(Ok(Document {
                        id: rec.record_id,
                        text: String::from_utf8_lossy(&rec.payload).into_owned(),
                        url: rec.target_uri.unwrap_or_default(),
                        dump: self.dump.clone(),
                        date: rec.date,
                        file_path: rec.source_path,
                        ..Default::default()
                    }))
                }
                _ => {}
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record_io::{RawRecord, WarcWriter};

    fn wet(records: &[RawRecord]) -> Vec<u8> {
        let mut w = WarcWriter::new(Vec::new(), true);
        for r in records {
            w.write_record(r).unwrap();
        }
        w.into_inner()
    }

    fn conv(id: &str, payload: &[u8]) -> RawRecord {
        RawRecord::new("conversion", id, "2024-01-01T00:00:00Z", Some("http://a.example/"), vec![], payload.to_vec())
    }

    #[test]
    fn empty_wet() {
        assert_eq!(WetReader::new(&b""[..], "x").unwrap().count(), 0);
    }

    #[test]
    fn conversion_becomes_document() {
        let info = RawRecord::new("warcinfo", "<i>", "d", None, vec![], b"isPartOf: CC-MAIN-2024-10\r\n".to_vec());
        let bytes = wet(&[info, conv("<c>", b"Some text.")]);
        let docs: Vec<_> = WetReader::new(&bytes[..], "f.wet.gz").unwrap().map(Result::unwrap).collect();
        assert_eq!(docs.len(), 1);
        assert_eq!(docs[0].text, "Some text.");
        assert_eq!(docs[0].id, "<c>");
        assert_eq!(docs[0].url, "http://a.example/");
        assert_eq!(docs[0].dump, "CC-MAIN-2024-10");
        assert_eq!(docs[0].file_path, "f.wet.gz");
    }

    #[test]
    fn invalid_utf8_is_replaced() {
        let bytes = wet(&[conv("<c>", b"ab\xffcd")]);
        let docs: Vec<_> = WetReader::new(&bytes[..], "x").unwrap().map(Result::unwrap).collect();
        assert_eq!(docs[0].text, "ab\u{fffd}cd");
    }

    #[test]
    fn dump_from_path_fallback() {
        assert_eq!(dump_from_path("crawl-data/CC-MAIN-2021-43/segments/x.warc.gz").as_deref(), Some("CC-MAIN-2021-43"));
        assert_eq!(dump_from_path("local.warc"), None);
    }
}
