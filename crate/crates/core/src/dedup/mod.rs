//! MinHash-LSH near-duplicate detection.
//!
//! Documents are shingled into word 5-grams, each shingle is hashed with 112
//! universal hash functions, and the per-function minima form the signature.
//! The signature is cut into 14 bands of 8 values; two documents that agree
//! on every value of any band are duplicates. Duplicate pairs are merged
//! transitively with union-find and each cluster keeps one document.

mod lsh;
mod minhash;
mod policy;
mod prob;
pub mod sim;
pub mod spill;
mod union_find;
mod variants;

pub use lsh::{bucket_keys, cluster, ClusterMap};
pub use minhash::{shingle, MinHashSignature, MinHasher};
pub use policy::{DedupInput, DedupOutcome, Deduper};
pub use prob::match_probability;
pub use union_find::UnionFind;
pub use variants::{line_dedup, url_dedup, LineDedupMode, LineDedupOutcome, UrlDedupOutcome};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DedupError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("document has no shingles")]
    NoShingles,
    #[error("similarity {0} outside [0, 1]")]
    SimilarityOutOfRange(f64),
    #[error("spill file: {0}")]
    Spill(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct DedupParams {
    pub ngram_size: usize,
    pub num_hashes: usize,
    pub buckets: usize,
    pub rows_per_bucket: usize,
    pub hash_seed: u64,
}

impl Default for DedupParams {
    fn default() -> Self {
        DedupParams { ngram_size: 5, num_hashes: 112, buckets: 14, rows_per_bucket: 8, hash_seed: 1 }
    }
}

impl DedupParams {
    pub fn validate(&self) -> Result<(), DedupError> {
        if self.ngram_size == 0 {
            return Err(DedupError::Params("ngram_size must be >= 1".into()));
        }
        if self.buckets == 0 || self.rows_per_bucket == 0 {
            return Err(DedupError::Params("buckets and rows must be >= 1".into()));
        }
        if self.buckets * self.rows_per_bucket != self.num_hashes {
            return Err(DedupError::Params(format!(
                "buckets ({}) x rows ({}) != num_hashes ({})",
                self.buckets, self.rows_per_bucket, self.num_hashes
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        DedupParams::default().validate().unwrap();
        let bad = DedupParams { buckets: 13, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = DedupParams { ngram_size: 0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
