use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::config::InputFormat;
use super::manifest::RecordIssue;
use super::PipelineError;
use crate::document::Document;
use crate::extract::split_http_response;
use crate::filters::DocumentMetrics;
use crate::pii::ScrubReport;
use crate::record_io::{dump_from_path, ReaderOptions, RecordError, WarcReader, WetReader};

/// A document in flight.
#[derive(Debug, Clone)]
pub(crate) struct Item {
    pub seq: usize,
    pub doc: Document,
    /// HTTP body and declared charset, for WARC input until extraction.
    pub body: Option<(Option<String>, Vec<u8>)>,
    /// Text differs from what was read.
    pub changed: bool,
    pub tokens: u64,
    pub metrics: Option<DocumentMetrics>,
    pub scrub: ScrubReport,
}

impl Item {
    fn new(seq: usize, doc: Document, body: Option<(Option<String>, Vec<u8>)>) -> Self {
        Item { seq, doc, body, changed: false, tokens: 0, metrics: None, scrub: ScrubReport::default() }
    }
}

pub(crate) struct Loaded {
    pub items: Vec<Item>,
    pub issues: Vec<RecordIssue>,
}

fn issue(e: RecordError) -> RecordIssue {
    RecordIssue { source: e.source_path, position: e.offset, reason: format!("{:?}", e.kind) }
}

/// Opens every input before reading any, so a missing file fails the run
/// before processing starts.
pub(crate) fn load(paths: &[impl AsRef<Path>], format: InputFormat) -> Result<Loaded, PipelineError> {
    let files = paths
        .iter()
        .map(|p| File::open(p.as_ref()).map(|f| (p.as_ref(), f)).map_err(|e| PipelineError::input(p.as_ref(), e)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut items = Vec::new();
    let mut issues = Vec::new();
    for (path, file) in files {
        let name = path.display().to_string();
        let reader = BufReader::new(file);
        match format {
            InputFormat::Warc => {
                let opts = ReaderOptions { response_only: true, base_offset: 0 };
                let dump = dump_from_path(&name).unwrap_or_default();
                let r = WarcReader::with_options(reader, &name, opts).map_err(|e| PipelineError::input(path, e))?;
                for rec in r {
                    match rec {
                        Ok(rec) => {
                            let (charset, body) = split_http_response(&rec.payload);
                            let body = (charset, body.to_vec());
                            let doc = Document {
                                id: rec.record_id,
                                url: rec.target_uri.unwrap_or_default(),
                                dump: dump.clone(),
                                date: rec.date,
                                file_path: rec.source_path,
                                ..Default::default()
                            };
                            items.push(Item::new(items.len(), doc, Some(body)));
                        }
                        Err(e) => issues.push(issue(e)),
                    }
                }
            }
            InputFormat::Wet => {
                let r = WetReader::new(reader, &name).map_err(|e| PipelineError::input(path, e))?;
                for rec in r {
                    match rec {
                        Ok(doc) => items.push(Item::new(items.len(), doc, None)),
                        Err(e) => issues.push(issue(e)),
                    }
                }
            }
            InputFormat::Jsonl => {
                for (i, line) in reader.lines().enumerate() {
                    let line = line.map_err(|e| PipelineError::input(path, e))?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    match serde_json::from_str::<Document>(&line) {
                        Ok(doc) => items.push(Item::new(items.len(), doc, None)),
                        Err(e) => issues.push(RecordIssue {
                            source: name.clone(),
                            position: i as u64 + 1,
                            reason: e.to_string(),
                        }),
                    }
                }
            }
        }
    }
    issues.sort();
    Ok(Loaded { items, issues })
}
