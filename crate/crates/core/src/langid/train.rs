use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::features::FeatureVector;
use super::model::LangModel;
use super::LangIdError;

pub const MIN_SAMPLES_PER_LABEL: usize = 10;

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub hash_dim: u32,
    /// Fraction of samples held out for the accuracy report.
    pub holdout_fraction: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { epochs: 10, learning_rate: 0.5, seed: 0, hash_dim: 1 << 18, holdout_fraction: 0.2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub train_samples: usize,
    pub holdout_samples: usize,
    pub holdout_accuracy: f64,
    pub skipped_empty: usize,
}

/// Plain SGD on softmax cross-entropy.
///
/// Samples are first put into a canonical order (by label, then text), so the
/// result depends only on the multiset of samples and the seed.
pub fn train(samples: &[(String, String)], cfg: &TrainConfig) -> Result<(LangModel, TrainReport), LangIdError> {
    let mut data: Vec<(&str, &str)> = Vec::with_capacity(samples.len());
    let mut skipped_empty = 0;
    for (text, label) in samples {
        if text.trim().is_empty() {
            skipped_empty += 1;
        } else {
            data.push((text, label));
        }
    }
    if skipped_empty > 0 {
        log::warn!("skipped {skipped_empty} empty training samples");
    }

    let mut per_label: BTreeMap<&str, usize> = BTreeMap::new();
    for (_, l) in &data {
        *per_label.entry(l).or_default() += 1;
    }
    if per_label.len() < 2 {
        return Err(LangIdError::TooFewLabels(per_label.len()));
    }
    if let Some((l, c)) = per_label.iter().find(|(_, c)| **c < MIN_SAMPLES_PER_LABEL) {
        return Err(LangIdError::TooFewSamples { label: l.to_string(), count: *c, min: MIN_SAMPLES_PER_LABEL });
    }
    let labels: Vec<String> = per_label.keys().map(|l| l.to_string()).collect();
    let mut model = LangModel::zeros(labels.clone(), cfg.hash_dim)?;

    data.sort_unstable_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    data.shuffle(&mut rng);
    let n_hold = ((data.len() as f64) * cfg.holdout_fraction).floor() as usize;
    let n_hold = n_hold.min(data.len() - 1);
    let (train_set, holdout) = data.split_at(data.len() - n_hold);

    let encode = |set: &[(&str, &str)]| -> Vec<(FeatureVector, usize)> {
        set.iter().map(|(t, l)| (model.features(t), labels.iter().position(|x| x == l).unwrap())).collect()
    };
    let mut train_x = encode(train_set);
    let hold_x = encode(holdout);

    let dim = cfg.hash_dim as usize;
    let k = labels.len();
    for epoch in 0..cfg.epochs {
        train_x.shuffle(&mut rng);
        let lr = cfg.learning_rate / (1.0 + epoch as f64 * 0.1);
        for (x, y) in &train_x {
            let probs = model.probabilities(x);
            for c in 0..k {
                let g = probs[c] - if c == *y { 1.0 } else { 0.0 };
                if g == 0.0 {
                    continue;
                }
                let step = lr * g;
                model.bias[c] = (model.bias[c] as f64 - step) as f32;
                let row = &mut model.weights[c * dim..(c + 1) * dim];
                for (i, v) in &x.entries {
                    let w = &mut row[*i as usize];
                    *w = (*w as f64 - step * v) as f32;
                }
            }
        }
    }

    let correct = hold_x
        .iter()
        .filter(|(x, y)| {
            let p = model.probabilities(x);
            let best = (0..k).fold(0, |b, c| if p[c] > p[b] { c } else { b });
            best == *y
        })
        .count();
    let holdout_accuracy = if hold_x.is_empty() { f64::NAN } else { correct as f64 / hold_x.len() as f64 };
    Ok((
        model,
        TrainReport { train_samples: train_x.len(), holdout_samples: hold_x.len(), holdout_accuracy, skipped_empty },
    ))
}
