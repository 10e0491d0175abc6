use std::fmt::Write as _;

use serde::Serialize;

use super::{Histogram, LabError};

pub const DEFAULT_MIN_GAP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Drop documents with `value < threshold`.
    DropBelow,
    /// Drop documents with `value >= threshold`.
    DropAtOrAbove,
}

impl Direction {
    pub fn drops(self, value: f64, threshold: f64) -> bool {
        match self {
            Direction::DropBelow => value < threshold,
            Direction::DropAtOrAbove => value >= threshold,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::DropBelow => "drop_below",
            Direction::DropAtOrAbove => "drop_at_or_above",
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Direction::DropBelow => "<",
            Direction::DropAtOrAbove => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Suggestion {
    pub metric: String,
    pub direction: Direction,
    pub threshold: f64,
    pub mass_removed_low: f64,
    pub mass_removed_high: f64,
}

/// A run of bins `[first, last]` where the low-quality density leads.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    pub first_bin: usize,
    pub last_bin: usize,
    pub lower_edge: f64,
    pub upper_edge: f64,
    pub mass_low: f64,
    pub mass_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub metric: String,
    pub suggestions: Vec<Suggestion>,
    /// Regions touching neither end; not turned into rules.
    pub interior: Vec<Region>,
}

impl ThresholdReport {
    pub fn to_table(&self) -> String {
        let mut s = format!(
            "{:<32} {:<8} {:>12} {:>12} {:>12}\n",
            "metric", "rule", "threshold", "low_removed", "high_removed"
        );
        for g in &self.suggestions {
            let _ = writeln!(
                s,
                "{:<32} {:<8} {:>12.6} {:>12.4} {:>12.4}",
                g.metric,
                g.direction.symbol(),
                g.threshold,
                g.mass_removed_low,
                g.mass_removed_high
            );
        }
        for r in &self.interior {
            let _ = writeln!(
                s,
                "{:<32} interior [{:.6}, {:.6}) low {:.4} high {:.4}",
                self.metric, r.lower_edge, r.upper_edge, r.mass_low, r.mass_high
            );
        }
        s
    }

    /// `metric, direction, threshold, mass_removed_low, mass_removed_high`.
    pub fn tsv_rows(&self) -> Vec<String> {
        self.suggestions
            .iter()
            .map(|g| {
                format!(
                    "{}\t{}\t{}\t{}\t{}",
                    g.metric,
                    g.direction.as_str(),
                    g.threshold,
                    g.mass_removed_low,
                    g.mass_removed_high
                )
            })
            .collect()
    }
}

pub fn suggest_thresholds(high: &Histogram, low: &Histogram, min_gap: f64) -> Result<ThresholdReport, LabError> {
    if high.bin_edges != low.bin_edges {
        return Err(LabError::MismatchedBins);
    }
    if !(min_gap > 0.0) {
        return Err(LabError::MinGap(min_gap));
    }
    let n = high.bins();
    let e = &high.bin_edges;
    let leads: Vec<bool> = (0..n).map(|i| low.densities[i] - high.densities[i] >= min_gap).collect();
    let mass = |h: &Histogram, a: usize, b: usize| h.densities[a..=b].iter().sum::<f64>();
    let mut out = ThresholdReport { metric: high.metric_name.clone(), suggestions: Vec::new(), interior: Vec::new() };
    let mut i = 0;
    while i < n {
        if !leads[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < n && leads[i + 1] {
            i += 1;
        }
        let end = i;
        i += 1;
        let (ml, mh) = (mass(low, start, end), mass(high, start, end));
        let suggestion = |direction, threshold| Suggestion {
            metric: high.metric_name.clone(),
            direction,
            threshold,
            mass_removed_low: ml,
            mass_removed_high: mh,
        };
        if start == 0 {
            out.suggestions.push(suggestion(Direction::DropBelow, e[end + 1]));
        } else if end == n - 1 {
            out.suggestions.push(suggestion(Direction::DropAtOrAbove, e[start]));
        } else {
            out.interior.push(Region {
                first_bin: start,
                last_bin: end,
                lower_edge: e[start],
                upper_edge: e[end + 1],
                mass_low: ml,
                mass_high: mh,
            });
        }
    }
    Ok(out)
}
