//! Metric histograms over a reference and a low-quality corpus, and advisory
//! threshold suggestions where the low-quality density is higher.
//!
//! Bins are half-open `[e_i, e_{i+1})` except the last, which is closed.
//! Fixed-width binning clamps values outside its range into the end bins.
//! A left-anchored region suggests `drop value < t`, a right-anchored one
//! `drop value >= t`, with `t` always a bin edge, so the reported masses are
//! exactly what re-filtering the binned values would remove.

mod histogram;
mod suggest;

pub use histogram::{collect, collect_values, Binning, Histogram, HistogramAccumulator};
pub use suggest::{suggest_thresholds, Direction, Region, Suggestion, ThresholdReport, DEFAULT_MIN_GAP};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LabError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("unknown metric {0:?}")]
    UnknownMetric(String),
    #[error("invalid binning: {0}")]
    Binning(String),
    #[error("histograms have different bin edges")]
    MismatchedBins,
    #[error("min_gap must be positive, got {0}")]
    MinGap(f64),
    #[error("non-finite value {0}")]
    NonFinite(f64),
}
