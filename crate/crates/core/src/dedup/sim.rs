//! Duplicate-distribution simulator.
//!
//! Every snapshot is an exact copy of the same `D` documents, so the union
//! holds `N = K·D` copies (K snapshots). Sampling `n` copies uniformly without
//! replacement, the number of copies of a given document in the sample is
//! hypergeometric(N, K, n), and the expected number of documents seen exactly
//! `k` times is `D · P(X = k)`.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::DedupError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub num_snapshots: u64,
    pub tokens_per_snapshot: u64,
    pub tokens_per_doc: u64,
    pub sample_tokens: u64,
}

impl SimConfig {
    pub fn docs_per_snapshot(&self) -> u64 {
        self.tokens_per_snapshot / self.tokens_per_doc.max(1)
    }

    pub fn sample_docs(&self) -> u64 {
        self.sample_tokens / self.tokens_per_doc.max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub docs_per_snapshot: u64,
    pub num_snapshots: u64,
    pub sample_size: u64,
    /// Number of distinct documents drawn exactly `k` times, `k >= 1`.
    pub histogram: BTreeMap<u64, u64>,
    /// Closed-form `P(X = k)` for one document, `k = 0..=min(K, n)`.
    pub pmf: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinCheck {
    pub label: String,
    pub observed: u64,
    pub expected: f64,
    pub sigma: f64,
    pub within: bool,
}

impl SimResult {
    pub fn distinct_sampled(&self) -> u64 {
        self.histogram.values().sum()
    }

    /// Fraction of sampled documents that were drawn once.
    pub fn unique_fraction(&self) -> f64 {
        let d = self.distinct_sampled();
        if d == 0 {
            return 1.0;
        }
        self.histogram.get(&1).copied().unwrap_or(0) as f64 / d as f64
    }

    pub fn expected(&self, k: u64) -> f64 {
        self.docs_per_snapshot as f64 * self.pmf.get(k as usize).copied().unwrap_or(0.0)
    }

    /// Compares each bin with its expectation at `nsigma` binomial standard
    /// deviations. Bins expecting fewer than one document are pooled into a
    /// single tail bin.
    pub fn bin_checks(&self, nsigma: f64) -> Vec<BinCheck> {
        let d = self.docs_per_snapshot as f64;
        let max_k = (self.pmf.len() as u64).max(self.histogram.keys().next_back().map_or(0, |k| k + 1));
        let mut out = Vec::new();
        let (mut pool_obs, mut pool_p) = (0u64, 0.0f64);
        let check = |label: String, observed: u64, p: f64| {
            let expected = d * p;
            let sigma = (d * p * (1.0 - p)).max(0.0).sqrt();
            let within = (observed as f64 - expected).abs() <= nsigma * sigma + 1e-9;
            BinCheck { label, observed, expected, sigma, within }
        };
        for k in 1..max_k {
            let p = self.pmf.get(k as usize).copied().unwrap_or(0.0);
            let obs = self.histogram.get(&k).copied().unwrap_or(0);
            if d * p >= 1.0 {
                out.push(check(k.to_string(), obs, p));
            } else {
                pool_obs += obs;
                pool_p += p;
            }
        }
        if pool_obs > 0 || pool_p > 0.0 {
            out.push(check("pooled".into(), pool_obs, pool_p.min(1.0)));
        }
        out
    }
}

fn ln_choose(a: u64, b: u64) -> f64 {
    let b = b.min(a - b);
    (0..b).map(|i| ((a - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// `P(X = k)` for `k = 0..=min(successes, draws)` of the hypergeometric
/// distribution, computed by a log-domain ratio recurrence.
pub fn hypergeometric_pmf(population: u64, successes: u64, draws: u64) -> Vec<f64> {
    let (nn, kk) = (population, successes);
    assert!(kk <= nn && draws <= nn, "invalid hypergeometric parameters");
    // Reflect onto the undrawn side when that is smaller: X = K - Y.
    let reflect = draws > nn - draws;
    let d = if reflect { nn - draws } else { draws };
    let k_min = (d + kk).saturating_sub(nn);
    let k_max = kk.min(d);
    let mut lp = if k_min == 0 {
        // ln C(N-K, d) - ln C(N, d) = sum_{i<K} ln((N-d-i)/(N-i))
        (0..kk).map(|i| ((nn - d - i) as f64).ln() - ((nn - i) as f64).ln()).sum()
    } else {
        ln_choose(kk, k_min) + ln_choose(nn - kk, d - k_min) - ln_choose(nn, d)
    };
    let mut pmf = vec![0.0; (kk.min(draws) + 1) as usize];
    let mut y = vec![0.0; (k_max + 1) as usize];
    for k in k_min..=k_max {
        y[k as usize] = lp.exp();
        if k < k_max {
            let num = ((kk - k) as f64) * ((d - k) as f64);
            let den = ((k + 1) as f64) * ((nn - kk - d + k + 1) as f64);
            lp += num.ln() - den.ln();
        }
    }
    for (k, p) in y.into_iter().enumerate() {
        let x = if reflect { kk as usize - k } else { k };
        if x < pmf.len() {
            pmf[x] = p;
        }
    }
    pmf
}

pub fn simulate_duplicate_distribution(cfg: &SimConfig, seed: u64) -> Result<SimResult, DedupError> {
    let d = cfg.docs_per_snapshot();
    let k = cfg.num_snapshots;
    if d == 0 || k == 0 {
        return Err(DedupError::Params("need at least one document and one snapshot".into()));
    }
    let total = d.checked_mul(k).ok_or_else(|| DedupError::Params("corpus too large".into()))?;
    let n = cfg.sample_docs();
    if n > total {
        return Err(DedupError::Params(format!("sample of {n} exceeds {total} copies")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u32; d as usize];
    for idx in rand::seq::index::sample(&mut rng, total as usize, n as usize) {
        counts[idx % d as usize] += 1;
    }
    let mut histogram = BTreeMap::new();
    for c in counts.into_iter().filter(|c| *c > 0) {
        *histogram.entry(c as u64).or_insert(0) += 1;
    }
    Ok(SimResult {
        docs_per_snapshot: d,
        num_snapshots: k,
        sample_size: n,
        histogram,
        pmf: hypergeometric_pmf(total, k, n),
    })
}
