//! Adjacent level-spacing ratios.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{DiagnosticsError, Result};

/// Spacings below this (GHz) are treated as exact degeneracies.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RatioSample {
    /// Folded ratios `R_n = min(r_n, 1/r_n)`.
    pub values: Vec<f64>,
    /// Levels merged into a neighbour by the degeneracy filter.
    pub merged_levels: usize,
    pub source: BTreeMap<String, String>,
}

impl RatioSample {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> Option<f64> {
        (!self.values.is_empty()).then(|| self.values.iter().sum::<f64>() / self.values.len() as f64)
    }

    /// Appends another sample's ratios and merge count; metadata of `self` is kept.
    pub fn pool(&mut self, other: &RatioSample) {
        self.values.extend_from_slice(&other.values);
        self.merged_levels += other.merged_levels;
    }
}

/// `r_n = (E_{n+1} - E_n) / (E_{n+2} - E_{n+1})` folded into `[0, 1]`.
pub fn spacing_ratios(levels: &[f64]) -> Result<RatioSample> {
    if let Some(index) = levels.windows(2).position(|w| !(w[1] >= w[0])) {
        return Err(DiagnosticsError::Unsorted { index: index + 1 });
    }
    let mut distinct: Vec<f64> = Vec::with_capacity(levels.len());
    for &e in levels {
        match distinct.last() {
            Some(&last) if e - last < DEGENERACY_TOLERANCE => {}
            _ => distinct.push(e),
        }
    }
    let merged_levels = levels.len() - distinct.len();
    if distinct.len() == 1 && levels.len() > 1 {
        return Err(DiagnosticsError::AllDegenerate { count: levels.len() });
    }
    if distinct.len() < 3 {
        return Err(DiagnosticsError::TooFewLevels { needed: 3, got: distinct.len() });
    }
    let values = distinct
        .windows(3)
        .map(|w| {
            let r = (w[1] - w[0]) / (w[2] - w[1]);
            r.min(1.0 / r)
        })
        .collect();
    Ok(RatioSample { values, merged_levels, source: BTreeMap::new() })
}
