use std::io::{Read, Write};

use super::features::{featurize, FeatureVector};
use super::LangIdError;

const MAGIC: &[u8; 5] = b"LIDM1";

/// Trained classifier. Weights are stored as `f32` so the serialized form is
/// exact; scoring accumulates in `f64` in a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct LangModel {
    pub labels: Vec<String>,
    pub ngram_min: u32,
    pub ngram_max: u32,
    pub hash_dim: u32,
    pub bias: Vec<f32>,
    /// Row-major `labels.len() x hash_dim`.
    pub weights: Vec<f32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub label: String,
    pub score: f64,
    /// Probability per label, in model label order.
    pub scores: Vec<(String, f64)>,
}

impl Classification {
    pub fn score_of(&self, label: &str) -> f64 {
        self.scores.iter().find(|(l, _)| l == label).map_or(0.0, |(_, s)| *s)
    }
}

impl LangModel {
    pub fn zeros(labels: Vec<String>, hash_dim: u32) -> Result<Self, LangIdError> {
        if !hash_dim.is_power_of_two() || hash_dim < 2 {
            return Err(LangIdError::BadHashDim(hash_dim));
        }
        let n = labels.len();
        Ok(LangModel {
            labels,
            ngram_min: 2,
            ngram_max: 4,
            hash_dim,
            bias: vec![0.0; n],
            weights: vec![0.0; n * hash_dim as usize],
        })
    }

    pub fn features(&self, text: &str) -> FeatureVector {
        featurize(text, self.ngram_min as usize, self.ngram_max as usize, self.hash_dim)
    }

    pub(crate) fn probabilities(&self, x: &FeatureVector) -> Vec<f64> {
        let dim = self.hash_dim as usize;
        let logits: Vec<f64> = (0..self.labels.len())
            .map(|k| {
                let row = &self.weights[k * dim..(k + 1) * dim];
                x.entries.iter().fold(self.bias[k] as f64, |acc, (i, v)| acc + row[*i as usize] as f64 * v)
            })
            .collect();
        softmax(&logits)
    }

    pub fn classify(&self, text: &str) -> Result<Classification, LangIdError> {
        if text.trim().is_empty() {
            return Err(LangIdError::EmptyText);
        }
        let probs = self.probabilities(&self.features(text));
        let (best, _) = probs
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bp), (i, &p)| if p > bp { (i, p) } else { (bi, bp) });
        Ok(Classification {
            label: self.labels[best].clone(),
            score: probs[best],
            scores: self.labels.iter().cloned().zip(probs).collect(),
        })
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        for v in [self.labels.len() as u32, self.hash_dim, self.ngram_min, self.ngram_max] {
            w.write_all(&v.to_le_bytes())?;
        }
        for l in &self.labels {
            w.write_all(&(l.len() as u32).to_le_bytes())?;
            w.write_all(l.as_bytes())?;
        }
        for b in &self.bias {
            w.write_all(&b.to_le_bytes())?;
        }
        let mut buf = Vec::with_capacity(self.weights.len() * 4);
        for x in &self.weights {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        w.write_all(&buf)
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self, LangIdError> {
        let mut magic = [0u8; 5];
        read_exact(&mut r, &mut magic)?;
        if &magic != MAGIC {
            return Err(LangIdError::Format("bad magic".into()));
        }
        let n_labels = read_u32(&mut r)? as usize;
        let hash_dim = read_u32(&mut r)?;
        let ngram_min = read_u32(&mut r)?;
        let ngram_max = read_u32(&mut r)?;
        if !hash_dim.is_power_of_two() || hash_dim < 2 {
            return Err(LangIdError::BadHashDim(hash_dim));
        }
        if n_labels == 0 || n_labels > 4096 || ngram_min == 0 || ngram_min > ngram_max {
            return Err(LangIdError::Format("implausible dimensions".into()));
        }
        let mut labels = Vec::with_capacity(n_labels);
        for _ in 0..n_labels {
            let len = read_u32(&mut r)? as usize;
            if len > 256 {
                return Err(LangIdError::Format("label too long".into()));
            }
            let mut b = vec![0u8; len];
            read_exact(&mut r, &mut b)?;
            labels.push(String::from_utf8(b).map_err(|_| LangIdError::Format("label is not UTF-8".into()))?);
        }
        let bias = read_f32s(&mut r, n_labels)?;
        let weights = read_f32s(&mut r, n_labels * hash_dim as usize)?;
        Ok(LangModel { labels, ngram_min, ngram_max, hash_dim, bias, weights })
    }
}

pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<(), LangIdError> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => LangIdError::Format("truncated".into()),
        _ => LangIdError::Io(e),
    })
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, LangIdError> {
    let mut b = [0u8; 4];
    read_exact(r, &mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f32s<R: Read>(r: &mut R, n: usize) -> Result<Vec<f32>, LangIdError> {
    let mut buf = vec![0u8; n * 4];
    read_exact(r, &mut buf)?;
    Ok(buf.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> LangModel {
        let mut m = LangModel::zeros(vec!["en".into(), "de".into(), "fr".into()], 1 << 8).unwrap();
        for (i, w) in m.weights.iter_mut().enumerate() {
            *w = ((i * 7919) % 113) as f32 / 37.0 - 1.5;
        }
        m.bias = vec![0.1, -0.2, 0.05];
        m
    }

    #[test]
    fn scores_sum_to_one() {
        let c = model().classify("some text here").unwrap();
        let s: f64 = c.scores.iter().map(|(_, p)| p).sum();
        assert!((s - 1.0).abs() < 1e-6);
        assert!(c.scores.iter().all(|(_, p)| (0.0..=1.0).contains(p)));
        assert_eq!(c.score, c.score_of(&c.label));
    }

    #[test]
    fn empty_text_errors() {
        assert!(matches!(model().classify(""), Err(LangIdError::EmptyText)));
        assert!(matches!(model().classify(" \n\t"), Err(LangIdError::EmptyText)));
    }

    #[test]
    fn serialization_is_bit_exact() {
        let m = model();
        let mut buf = Vec::new();
        m.write_to(&mut buf).unwrap();
        assert_eq!(&buf[..5], b"LIDM1");
        let back = LangModel::read_from(&buf[..]).unwrap();
        assert_eq!(back, m);
        for t in ["hello there", "guten tag", "bonjour"] {
            let a = m.classify(t).unwrap();
            let b = back.classify(t).unwrap();
            for ((_, x), (_, y)) in a.scores.iter().zip(&b.scores) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        assert!(LangModel::read_from(&buf[..buf.len() - 1]).is_err());
        assert!(LangModel::read_from(&b"LIDM2"[..]).is_err());
    }
}
