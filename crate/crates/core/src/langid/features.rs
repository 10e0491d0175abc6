/// Sparse, L2-normalized feature vector: sorted unique indices with weights.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub entries: Vec<(u32, f64)>,
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
const MULT: u64 = 0x9e37_79b9_7f4a_7c15;

/// Character n-grams over the lowercased, whitespace-collapsed text padded
/// with one space on each side. Each n-gram is FNV-1a hashed and then reduced
/// to `hash_dim` buckets with multiply-shift.
pub fn featurize(text: &str, ngram_min: usize, ngram_max: usize, hash_dim: u32) -> FeatureVector {
    let shift = 64 - hash_dim.trailing_zeros();
    let mut chars: Vec<char> = vec![' '];
    for w in text.split_whitespace() {
        chars.extend(w.chars().flat_map(char::to_lowercase));
        chars.push(' ');
    }
    let mut idx: Vec<u32> = Vec::new();
    for n in ngram_min..=ngram_max {
        if chars.len() < n {
            continue;
        }
        for win in chars.windows(n) {
            let mut h = FNV_OFFSET ^ n as u64;
            for &c in win {
                h ^= c as u64;
                h = h.wrapping_mul(FNV_PRIME);
            }
            idx.push((h.wrapping_mul(MULT) >> shift) as u32);
        }
    }
    idx.sort_unstable();
    let mut entries: Vec<(u32, f64)> = Vec::new();
    for i in idx {
        match entries.last_mut() {
            Some((j, c)) if *j == i => *c += 1.0,
            _ => entries.push((i, 1.0)),
        }
    }
    let norm = entries.iter().map(|(_, c)| c * c).sum::<f64>().sqrt();
    if norm > 0.0 {
        for (_, c) in &mut entries {
            *c /= norm;
        }
    }
    FeatureVector { entries }
}
