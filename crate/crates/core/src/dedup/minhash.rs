use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xxhash_rust::xxh3::xxh3_64;

use super::{DedupError, DedupParams};
use crate::tokenize::words;

/// Mersenne prime 2^61 - 1, the modulus of the hash family.
pub(crate) const PRIME: u64 = (1 << 61) - 1;

/// Reduction mod 2^61 - 1 for `v < 2^122`.
#[inline]
fn mod_prime(v: u128) -> u64 {
    let lo = (v as u64) & PRIME;
    let hi = (v >> 61) as u64;
    let mut r = lo + (hi & PRIME) + (hi >> 61);
    while r >= PRIME {
        r -= PRIME;
    }
    r
}

/// Word n-grams of the tokenized text, as a set.
pub fn shingle(text: &str, n: usize) -> BTreeSet<String> {
    let w = words(text);
    if n == 0 || w.len() < n {
        return BTreeSet::new();
    }
    w.windows(n).map(|g| g.join(" ")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinHashSignature {
    pub doc_id: String,
    pub values: Vec<u64>,
}

/// The hash family `h_i(x) = (a_i * x + b_i) mod p` over a 64-bit base hash of
/// each shingle, with `a_i`, `b_i` drawn from a ChaCha stream keyed by the seed.
#[derive(Debug, Clone)]
pub struct MinHasher {
    params: DedupParams,
    a: Vec<u64>,
    b: Vec<u64>,
}

impl MinHasher {
    pub fn new(params: DedupParams) -> Result<Self, DedupError> {
        params.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(params.hash_seed);
        let (a, b) = (0..params.num_hashes).map(|_| (rng.gen_range(1..PRIME), rng.gen_range(0..PRIME))).unzip();
        Ok(MinHasher { params, a, b })
    }

    pub fn params(&self) -> &DedupParams {
        &self.params
    }

    pub fn base_hash(shingle: &str) -> u64 {
        xxh3_64(shingle.as_bytes()) % PRIME
    }

    /// Signature over already-hashed shingles.
    pub fn signature_from_hashes(
        &self,
        doc_id: &str,
        hashes: impl IntoIterator<Item = u64>,
    ) -> Result<MinHashSignature, DedupError> {
        let mut mins = vec![u64::MAX; self.params.num_hashes];
        let mut any = false;
        for x in hashes {
            any = true;
            for (m, (a, b)) in mins.iter_mut().zip(self.a.iter().zip(&self.b)) {
                let h = mod_prime(*a as u128 * x as u128 + *b as u128);
                if h < *m {
                    *m = h;
                }
            }
        }
        if !any {
            return Err(DedupError::NoShingles);
        }
        Ok(MinHashSignature { doc_id: doc_id.to_string(), values: mins })
    }

    pub fn signature<'a>(
        &self,
        doc_id: &str,
        shingles: impl IntoIterator<Item = &'a str>,
    ) -> Result<MinHashSignature, DedupError> {
        self.signature_from_hashes(doc_id, shingles.into_iter().map(Self::base_hash))
    }

    /// Shingles `text` and signs it. Texts with fewer than `ngram_size` words
    /// have no signature.
    pub fn signature_of_text(&self, doc_id: &str, text: &str) -> Result<MinHashSignature, DedupError> {
        let set = shingle(text, self.params.ngram_size);
        self.signature(doc_id, set.iter().map(String::as_str))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shingles() {
        let s = shingle("a b c d e f", 5);
        assert_eq!(s.into_iter().collect::<Vec<_>>(), vec!["a b c d e", "b c d e f"]);
        assert!(shingle("a b c d", 5).is_empty());
        assert_eq!(shingle("A b C d E", 5), shingle("a b c d e", 5));
        assert_eq!(shingle("a, b. c! d? e", 5), shingle("a b c d e", 5));
    }

    #[test]
    fn mersenne_reduction_matches_remainder() {
        for v in [0u128, 1, PRIME as u128, PRIME as u128 * 2 + 5, (PRIME as u128 - 1) * (PRIME as u128 - 1), 1 << 100] {
            assert_eq!(mod_prime(v), (v % PRIME as u128) as u64, "{v}");
        }
        let (a, x) = (PRIME - 1, PRIME - 1);
        let v = a as u128 * x as u128 + (PRIME - 1) as u128;
        assert_eq!(mod_prime(v), (v % PRIME as u128) as u64);
    }

    #[test]
    fn signature_properties() {
        let h = MinHasher::new(DedupParams::default()).unwrap();
        let text = "the quick brown fox jumps over the lazy dog again";
        let a = h.signature_of_text("a", text).unwrap();
        let b = h.signature_of_text("b", text).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.values.len(), 112);
        assert!(a.values.iter().all(|v| *v < PRIME));
        assert_eq!(h.signature_of_text("c", "too few words"), Err(DedupError::NoShingles));

        let h2 = MinHasher::new(DedupParams { hash_seed: 99, ..Default::default() }).unwrap();
        let c = h2.signature_of_text("a", text).unwrap();
        assert_ne!(c.values, a.values);
        assert_eq!(c.values, h2.signature_of_text("z", text).unwrap().values);
    }

    #[test]
    fn value_is_min_over_shingles() {
        let h = MinHasher::new(DedupParams::default()).unwrap();
        let sh = ["one two three four five", "two three four five six"];
        let sig = h.signature("d", sh).unwrap();
        for i in 0..112 {
            let brute = sh
                .iter()
                .map(|s| {
                    let x = MinHasher::base_hash(s) as u128;
                    ((h.a[i] as u128 * x + h.b[i] as u128) % PRIME as u128) as u64
                })
                .min()
                .unwrap();
            assert_eq!(sig.values[i], brute);
        }
    }
}
