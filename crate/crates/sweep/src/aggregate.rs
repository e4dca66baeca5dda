//! Per-point reductions over task records.
//!
//! Records are sorted by key before any floating-point sum, so aggregates do
//! not depend on the order in which tasks finished or were merged.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use transmon_diagnostics::{group_walsh, normalized_kl};

use crate::config::{Param, PointParams, SweepConfig};
use crate::error::{Result, SweepError};
use crate::record::{Outcome, RatioHistogram, TaskKind, TaskRecord};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    /// Standard error of the mean; absent below two samples.
    pub stderr: Option<f64>,
    pub count: usize,
}

impl Estimate {
    pub fn from_samples(values: &[f64]) -> Option<Self> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let stderr = (n > 1).then(|| {
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        });
        Some(Self { mean, stderr, count: n })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KlAggregate {
    pub d_vs_poisson_norm: Option<f64>,
    pub d_vs_wigner_dyson_norm: Option<f64>,
    pub mean_ratio: Option<f64>,
    pub samples: u64,
    pub merged_levels: u64,
    pub counts: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl KlAggregate {
    fn from_histogram(h: &RatioHistogram) -> Self {
        let samples = h.samples();
        let mean_ratio = (samples > 0).then(|| h.sum / samples as f64);
        let (dp, dw, note) = match normalized_kl(&h.as_values(), h.counts.len()) {
            Ok(r) => (Some(r.d_vs_poisson_norm), Some(r.d_vs_wigner_dyson_norm), None),
            Err(e) => (None, None, Some(e.to_string())),
        };
        Self {
            d_vs_poisson_norm: dp,
            d_vs_wigner_dyson_norm: dw,
            mean_ratio,
            samples,
            merged_levels: h.merged_levels,
            counts: h.counts.clone(),
            note,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalshAggregate {
    /// Realizations whose labels all kept overlap >= the ambiguity threshold.
    pub included: usize,
    pub excluded: usize,
    /// Mean `|c_b|` of each distance group, averaged over included realizations.
    pub by_distance: BTreeMap<usize, Estimate>,
    /// `|c_b|` of each weight-1 label.
    pub single: Vec<Estimate>,
}

impl WalshAggregate {
    pub fn nearest_neighbour(&self) -> Option<&Estimate> {
        self.by_distance.get(&1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointAggregate {
    pub i: usize,
    pub j: usize,
    pub params: PointParams,
    pub tasks: usize,
    pub failed: usize,
    pub bundle_overlap: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kl: Option<KlAggregate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ipr: Option<Estimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplet_ipr: Option<Estimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplet_kl: Option<KlAggregate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walsh: Option<WalshAggregate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

impl PointAggregate {
    pub fn completed(&self) -> usize {
        self.tasks - self.failed
    }
}

/// Grid point a Walsh task's coupling snapshot `t_index` belongs to.
fn walsh_point(config: &SweepConfig, i: usize, j: usize, t_index: usize) -> (usize, usize) {
    match config.axis(Param::T) {
        Some((0, _)) => (t_index, j),
        Some(_) => (i, t_index),
        None => (i, j),
    }
}

pub fn aggregate(config: &SweepConfig, records: &[TaskRecord]) -> Vec<PointAggregate> {
    let mut sorted: Vec<&TaskRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.key);
    let (ni, nj) = config.shape();
    let ambiguous = config.walsh.policy.ambiguous_below;
    let mut points = Vec::with_capacity(ni * nj);
    for i in 0..ni {
        for j in 0..nj {
            points.push(aggregate_point(config, &sorted, i, j, ambiguous));
        }
    }
    points
}

fn aggregate_point(config: &SweepConfig, sorted: &[&TaskRecord], i: usize, j: usize, ambiguous: f64) -> PointAggregate {
    let bins = config.bins;
    let mut p = PointAggregate {
        i,
        j,
        params: config.point(i, j),
        tasks: 0,
        failed: 0,
        bundle_overlap: 0,
        kl: None,
        ipr: None,
        multiplet_ipr: None,
        multiplet_kl: None,
        walsh: None,
        levels: None,
        errors: Vec::new(),
    };
    let mut ratios: Option<RatioHistogram> = None;
    let mut multiplet_ratios: Option<RatioHistogram> = None;
    let mut iprs = Vec::new();
    let mut multiplet_iprs = Vec::new();
    let mut walsh_groups: Vec<BTreeMap<usize, f64>> = Vec::new();
    let mut walsh_single: Vec<Vec<f64>> = Vec::new();
    let mut walsh_seen = false;
    let mut walsh_excluded = 0;
    for rec in sorted {
        let k = rec.key;
        let mine = match k.kind {
            TaskKind::Spectral => k.i == i && k.j == j,
            TaskKind::Walsh => match config.axis(Param::T) {
                Some((0, _)) => k.j == j,
                Some(_) => k.i == i,
                None => k.i == i && k.j == j,
            },
        };
        if !mine {
            continue;
        }
        p.tasks += 1;
        match &rec.outcome {
            Outcome::Failed { error, .. } => {
                p.failed += 1;
                if p.errors.len() < 5 {
                    p.errors.push(format!("{}: {error}", rec.key));
                }
            }
            Outcome::Spectral(s) => {
                p.bundle_overlap += s.bundle_overlap as usize;
                if let Some(h) = &s.ratios {
                    ratios.get_or_insert_with(|| RatioHistogram::empty(bins)).add(h);
                }
                iprs.extend(s.ipr);
                if let Some(m) = &s.multiplet {
                    multiplet_iprs.push(m.ipr);
                    if let Some(h) = &m.ratios {
                        multiplet_ratios.get_or_insert_with(|| RatioHistogram::empty(bins)).add(h);
                    }
                }
                if s.levels.is_some() && p.levels.is_none() {
                    p.levels = s.levels.clone();
                }
            }
            Outcome::Walsh(w) => {
                walsh_seen = true;
                let Some(point) = w.points.iter().find(|pt| walsh_point(config, k.i, k.j, pt.t_index) == (i, j)) else {
                    continue;
                };
                if point.min_quality < ambiguous {
                    walsh_excluded += 1;
                    continue;
                }
                let Ok(groups) = group_walsh(&point.coefficients) else { continue };
                walsh_groups.push(groups.by_distance.iter().map(|(d, g)| (*d, g.mean_abs)).collect());
                walsh_single.push(groups.single.iter().map(|c| c.abs()).collect());
            }
        }
    }
    p.kl = ratios.as_ref().map(KlAggregate::from_histogram);
    p.multiplet_kl = multiplet_ratios.as_ref().map(KlAggregate::from_histogram);
    p.ipr = Estimate::from_samples(&iprs);
    p.multiplet_ipr = Estimate::from_samples(&multiplet_iprs);
    if walsh_seen {
        let mut by_distance = BTreeMap::new();
        if let Some(first) = walsh_groups.first() {
            for d in first.keys() {
                let values: Vec<f64> = walsh_groups.iter().map(|g| g[d]).collect();
                by_distance.insert(*d, Estimate::from_samples(&values).expect("non-empty"));
            }
        }
        let sites = walsh_single.first().map_or(0, Vec::len);
        let single = (0..sites)
            .map(|s| Estimate::from_samples(&walsh_single.iter().map(|v| v[s]).collect::<Vec<_>>()).expect("non-empty"))
            .collect();
        p.walsh = Some(WalshAggregate { included: walsh_groups.len(), excluded: walsh_excluded, by_distance, single });
    }
    p
}

/// Fails when more than half the tasks of some grid point failed.
pub fn check_failures(points: &[PointAggregate]) -> Result<()> {
    for p in points {
        if p.failed * 2 > p.tasks {
            return Err(SweepError::TooManyFailures {
                i: p.i,
                j: p.j,
                failed: p.failed,
                total: p.tasks,
                first_error: p.errors.first().cloned().unwrap_or_default(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimates() {
        assert!(Estimate::from_samples(&[]).is_none());
        let one = Estimate::from_samples(&[2.0]).unwrap();
        assert_eq!((one.mean, one.stderr, one.count), (2.0, None, 1));
        let e = Estimate::from_samples(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((e.mean - 2.5).abs() < 1e-15);
        assert!((e.stderr.unwrap() - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn stderr_shrinks_as_inverse_sqrt() {
        let sample = |n: usize| -> Vec<f64> {
            let mut rng = transmon_core::seed::stream(n as u64);
            (0..n).map(|_| transmon_core::seed::gaussian(&mut rng)).collect()
        };
        let small = Estimate::from_samples(&sample(400)).unwrap().stderr.unwrap();
        let large = Estimate::from_samples(&sample(40_000)).unwrap().stderr.unwrap();
        let ratio = small / large;
        assert!((ratio - 10.0).abs() < 1.0, "ratio {ratio}");
    }
}
