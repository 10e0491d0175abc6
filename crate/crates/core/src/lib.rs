//! Web-crawl curation toolkit.
//!
//! The stages, in pipeline order:
//!
//! * [`record_io`]: streaming WARC / WET parsing and a reference writer
//! * [`extract`]: main-content text extraction from HTML
//! * [`langid`]: hashed character n-gram language classifier and gate
//! * [`filters`]: per-document statistics, URL blocklist, Gopher, C4 and custom rules
//! * [`dedup`]: MinHash-LSH near-duplicate detection and the lighter dedup variants
//! * [`pii`]: email and public IPv4 anonymization
//! * [`pipeline`]: stage orchestration, token counting, output rows, run manifest
//!
//! and the analysis tools [`threshold_lab`], [`bias`] and the duplicate
//! distribution simulator in [`dedup::sim`].

pub mod bias;
pub mod dedup;
pub mod document;
pub mod exec;
pub mod extract;
pub mod filters;
pub mod langid;
pub mod pii;
pub mod pipeline;
pub mod record_io;
pub mod threshold_lab;
pub mod tokenize;

pub use document::{Document, OutputRecord};
pub use exec::Exec;
