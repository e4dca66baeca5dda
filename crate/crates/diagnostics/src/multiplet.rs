//! Permutation multiplets of a sublattice pattern.
//!
//! A multiplet is the set of product states with a fixed number of singly
//! excited sites on each sublattice and no site above its first excited level.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use transmon_core::{ManyBodyBasis, SpectrumResult, Sublattice};

use crate::error::{DiagnosticsError, Result};
use crate::ipr::restricted_ipr;
use crate::ratios::{spacing_ratios, RatioSample};

/// Basis indices of the multiplet. Without a pattern every site belongs to
/// one class and the total of `counts` fixes the number of excited sites.
pub fn select_permutation_multiplet(
    basis: &ManyBodyBasis,
    pattern: Option<&[Sublattice]>,
    counts: &BTreeMap<Sublattice, usize>,
) -> Result<Vec<usize>> {
    if let Some(p) = pattern {
        if p.len() != basis.n_sites() {
            return Err(DiagnosticsError::LengthMismatch(p.len(), basis.n_sites()));
        }
    }
    let total: usize = counts.values().sum();
    let selected: Vec<usize> = (0..basis.len())
        .filter(|&i| {
            let state = basis.state(i);
            if state.iter().any(|&n| n > 1) {
                return false;
            }
            match pattern {
                None => state.iter().filter(|&&n| n == 1).count() == total,
                Some(p) => {
                    let mut seen: BTreeMap<Sublattice, usize> = BTreeMap::new();
                    for (site, &n) in state.iter().enumerate() {
                        if n == 1 {
                            *seen.entry(p[site]).or_default() += 1;
                        }
                    }
                    seen.retain(|_, c| *c > 0);
                    let mut wanted = counts.clone();
                    wanted.retain(|_, c| *c > 0);
                    seen == wanted
                }
            }
        })
        .collect();
    if selected.is_empty() {
        return Err(DiagnosticsError::EmptyMultiplet);
    }
    Ok(selected)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultipletAnalysis {
    /// Eigenstates with the largest weight on the multiplet, one per multiplet state.
    pub eigenstates: Vec<usize>,
    pub weights: Vec<f64>,
    /// Mean IPR of those eigenstates, renormalized on the multiplet.
    pub ipr: f64,
    pub ratios: Option<RatioSample>,
}

pub fn analyze_multiplet(spectrum: &SpectrumResult, multiplet: &[usize]) -> Result<MultipletAnalysis> {
    let vectors = spectrum.eigenvectors.as_ref().ok_or(DiagnosticsError::MissingVectors)?;
    if multiplet.is_empty() {
        return Err(DiagnosticsError::EmptyMultiplet);
    }
    if let Some(&bad) = multiplet.iter().find(|&&i| i >= vectors.nrows()) {
        return Err(DiagnosticsError::InvalidInput(format!("multiplet index {bad} outside the basis")));
    }
    let mut scored: Vec<(usize, f64, f64)> = (0..vectors.ncols())
        .map(|alpha| {
            let col = vectors.col(alpha);
            let (ipr, weight) = restricted_ipr(|n| col[n], multiplet);
            (alpha, weight, ipr)
        })
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.truncate(multiplet.len());
    scored.sort_by_key(|s| s.0);
    let ipr = scored.iter().map(|s| s.2).sum::<f64>() / scored.len() as f64;
    let levels: Vec<f64> = scored.iter().map(|s| spectrum.eigenvalues[s.0]).collect();
    Ok(MultipletAnalysis {
        eigenstates: scored.iter().map(|s| s.0).collect(),
        weights: scored.iter().map(|s| s.1).collect(),
        ipr,
        ratios: spacing_ratios(&levels).ok(),
    })
}
