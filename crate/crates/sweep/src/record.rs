//! Per-task results as stored in checkpoints.

use serde::{Deserialize, Serialize};
use transmon_diagnostics::RatioSample;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    /// One diagonalization at one grid point.
    Spectral,
    /// Diabatic tracking across the whole coupling axis; the coupling index is 0.
    Walsh,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TaskKey {
    pub kind: TaskKind,
    pub i: usize,
    pub j: usize,
    pub r: usize,
}

impl std::fmt::Display for TaskKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}({}, {}, r={})", self.kind, self.i, self.j, self.r)
    }
}

/// Binned folded ratios; integer counts merge exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioHistogram {
    pub counts: Vec<u64>,
    pub sum: f64,
    pub merged_levels: u64,
}

impl RatioHistogram {
    pub fn empty(bins: usize) -> Self {
        Self { counts: vec![0; bins], sum: 0.0, merged_levels: 0 }
    }

    pub fn from_sample(sample: &RatioSample, bins: usize) -> Self {
        let mut counts = vec![0u64; bins];
        for &v in &sample.values {
            counts[((v * bins as f64) as usize).min(bins - 1)] += 1;
        }
        Self { counts, sum: sample.values.iter().sum(), merged_levels: sample.merged_levels as u64 }
    }

    pub fn samples(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn add(&mut self, other: &RatioHistogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.sum += other.sum;
        self.merged_levels += other.merged_levels;
    }

    /// Samples reconstructed at bin centres, enough for binned statistics.
    pub fn as_values(&self) -> Vec<f64> {
        let bins = self.counts.len() as f64;
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(k, &c)| std::iter::repeat_n((k as f64 + 0.5) / bins, c as usize))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultipletRecord {
    pub ipr: f64,
    pub ratios: Option<RatioHistogram>,
    pub min_weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralRecord {
    pub bundle_size: usize,
    pub bundle_overlap: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratios: Option<RatioHistogram>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ipr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplet: Option<MultipletRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalshPoint {
    /// Index along the coupling axis (0 without one).
    pub t_index: usize,
    pub t: f64,
    pub coefficients: Vec<f64>,
    pub min_quality: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalshRecord {
    pub points: Vec<WalshPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Spectral(SpectralRecord),
    Walsh(WalshRecord),
    Failed { error: String, numerical: bool },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub key: TaskKey,
    pub seed: u64,
    pub outcome: Outcome,
}

impl TaskRecord {
    pub fn failed(&self) -> bool {
        matches!(self.outcome, Outcome::Failed { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use transmon_diagnostics::spacing_ratios;

    #[test]
    fn histogram_counts_match_the_sample() {
        let s = spacing_ratios(&[0.0, 1.0, 3.0, 3.5, 5.0, 5.1]).unwrap();
        let h = RatioHistogram::from_sample(&s, 4);
        assert_eq!(h.samples(), s.len() as u64);
        assert_eq!(h.as_values().len(), s.len());
        let mut twice = h.clone();
        twice.add(&h);
        assert_eq!(twice.samples(), 2 * h.samples());
    }

    #[test]
    fn record_json_round_trip() {
        let r = TaskRecord {
            key: TaskKey { kind: TaskKind::Spectral, i: 1, j: 2, r: 3 },
            seed: u64::MAX,
            outcome: Outcome::Spectral(SpectralRecord {
                bundle_size: 10,
                bundle_overlap: false,
                ratios: Some(RatioHistogram { counts: vec![1, 2], sum: 0.1 + 0.2, merged_levels: 0 }),
                ipr: Some(1.0 / 3.0),
                multiplet: None,
                levels: None,
            }),
        };
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<TaskRecord>(&text).unwrap(), r);
    }
}
