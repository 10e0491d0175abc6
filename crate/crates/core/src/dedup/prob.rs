use super::{DedupError, DedupParams};

/// Probability that two documents with Jaccard similarity `s` share at least
/// one band: `1 - (1 - s^r)^b`. Evaluated as `-expm1(b * ln1p(-s^r))` so that
/// small probabilities keep their precision.
pub fn match_probability(s: f64, params: &DedupParams) -> Result<f64, DedupError> {
    if !(0.0..=1.0).contains(&s) {
        return Err(DedupError::SimilarityOutOfRange(s));
    }
    let sr = s.powi(params.rows_per_bucket as i32);
    if sr >= 1.0 {
        return Ok(1.0);
    }
    Ok(-(params.buckets as f64 * (-sr).ln_1p()).exp_m1())
}
