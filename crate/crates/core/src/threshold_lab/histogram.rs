use serde::{Deserialize, Serialize};

use super::LabError;
use crate::exec::Exec;
use crate::filters::{compute_metrics, DocumentMetrics, METRIC_NAMES};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Binning {
    FixedWidth {
        min: f64,
        max: f64,
        bins: usize,
    },
    /// Edges at the empirical quantiles; repeated edges are merged.
    Quantile {
        bins: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub metric_name: String,
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub densities: Vec<f64>,
    pub sample_count: u64,
}

impl Histogram {
    fn from_counts(metric_name: &str, bin_edges: Vec<f64>, counts: Vec<u64>) -> Result<Self, LabError> {
        let sample_count: u64 = counts.iter().sum();
        if sample_count == 0 {
            return Err(LabError::EmptyCorpus);
        }
        let densities = counts.iter().map(|c| *c as f64 / sample_count as f64).collect();
        Ok(Histogram { metric_name: metric_name.to_string(), bin_edges, counts, densities, sample_count })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_of(&self, v: f64) -> usize {
        bin_index(&self.bin_edges, v)
    }
}

fn bin_index(edges: &[f64], v: f64) -> usize {
    let nbins = edges.len() - 1;
    edges.partition_point(|e| *e <= v).saturating_sub(1).min(nbins - 1)
}

fn fixed_edges(min: f64, max: f64, bins: usize) -> Result<Vec<f64>, LabError> {
    if bins == 0 || !min.is_finite() || !max.is_finite() || min >= max {
        return Err(LabError::Binning(format!(
            "fixed width needs min < max and bins >= 1, got [{min}, {max}] x {bins}"
        )));
    }
    let w = (max - min) / bins as f64;
    let mut e: Vec<f64> = (0..bins).map(|i| min + i as f64 * w).collect();
    e.push(max);
    Ok(e)
}

/// Streaming, mergeable histogram builder. Fixed-width binning counts as it
/// goes; quantile binning has to keep the values until `finish`.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramAccumulator {
    metric_name: String,
    binning: Binning,
    edges: Vec<f64>,
    counts: Vec<u64>,
    values: Vec<f64>,
}

impl HistogramAccumulator {
    pub fn new(metric_name: &str, binning: Binning) -> Result<Self, LabError> {
        let edges = match binning {
            Binning::FixedWidth { min, max, bins } => fixed_edges(min, max, bins)?,
            Binning::Quantile { bins } if bins == 0 => {
                return Err(LabError::Binning("quantile needs bins >= 1".into()))
            }
            Binning::Quantile { .. } => Vec::new(),
        };
        let counts = vec![0; edges.len().saturating_sub(1)];
        Ok(HistogramAccumulator { metric_name: metric_name.to_string(), binning, edges, counts, values: Vec::new() })
    }

    pub fn push(&mut self, v: f64) -> Result<(), LabError> {
        if !v.is_finite() {
            return Err(LabError::NonFinite(v));
        }
        match self.binning {
            Binning::FixedWidth { .. } => self.counts[bin_index(&self.edges, v)] += 1,
            Binning::Quantile { .. } => self.values.push(v),
        }
        Ok(())
    }

    pub fn merge(&mut self, other: HistogramAccumulator) -> Result<(), LabError> {
        if self.binning != other.binning || self.metric_name != other.metric_name {
            return Err(LabError::MismatchedBins);
        }
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self.values.extend(other.values);
        Ok(())
    }

    pub fn finish(mut self) -> Result<Histogram, LabError> {
        match self.binning {
            Binning::FixedWidth { .. } => Histogram::from_counts(&self.metric_name, self.edges, self.counts),
            Binning::Quantile { bins } => {
                if self.values.is_empty() {
                    return Err(LabError::EmptyCorpus);
                }
                self.values.sort_by(f64::total_cmp);
                let n = self.values.len();
                let mut edges: Vec<f64> =
                    (0..=bins).map(|i| self.values[((i * (n - 1)) as f64 / bins as f64).round() as usize]).collect();
                edges.dedup();
                if edges.len() == 1 {
                    edges.push(edges[0]);
                }
                let mut counts = vec![0u64; edges.len() - 1];
                for v in &self.values {
                    counts[bin_index(&edges, *v)] += 1;
                }
                Histogram::from_counts(&self.metric_name, edges, counts)
            }
        }
    }
}

/// Histogram of raw values.
pub fn collect_values(
    metric_name: &str,
    values: impl IntoIterator<Item = f64>,
    binning: Binning,
) -> Result<Histogram, LabError> {
    let mut acc = HistogramAccumulator::new(metric_name, binning)?;
    for v in values {
        acc.push(v)?;
    }
    acc.finish()
}

/// Histogram of one [`DocumentMetrics`] field over a corpus of texts.
pub fn collect<S: AsRef<str> + Sync>(
    corpus: &[S],
    metric: &str,
    binning: Binning,
    exec: Exec,
) -> Result<Histogram, LabError> {
    if !METRIC_NAMES.contains(&metric) {
        return Err(LabError::UnknownMetric(metric.to_string()));
    }
    if corpus.is_empty() {
        return Err(LabError::EmptyCorpus);
    }
    let values = exec.map(corpus, |t| {
        let m: DocumentMetrics = compute_metrics(t.as_ref());
        m.get(metric).expect("known metric")
    });
    collect_values(metric, values, binning)
}
