//! Inverse participation ratios in the product basis.

use std::ops::Range;

use faer::MatRef;
use transmon_core::SpectrumResult;

use crate::error::{DiagnosticsError, Result};

/// `sum_n |psi_n|^4` for a normalized vector.
pub fn state_ipr(psi: &[f64]) -> f64 {
    psi.iter().map(|x| (x * x) * (x * x)).sum()
}

/// IPR of each eigenvector column in `states`.
pub fn column_iprs(vectors: MatRef<'_, f64>, states: Range<usize>) -> Vec<f64> {
    states
        .map(|c| {
            let col = vectors.col(c);
            (0..vectors.nrows()).map(|r| col[r].powi(4)).sum()
        })
        .collect()
}

/// Mean IPR over the eigenstates in `states`.
pub fn ipr(spectrum: &SpectrumResult, states: Range<usize>) -> Result<f64> {
    let vectors = spectrum.eigenvectors.as_ref().ok_or(DiagnosticsError::MissingVectors)?;
    if states.is_empty() || states.end > vectors.ncols() {
        return Err(DiagnosticsError::InvalidInput(format!(
            "state range {states:?} outside {} eigenvectors",
            vectors.ncols()
        )));
    }
    let values = column_iprs(vectors.as_ref(), states);
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// IPR of the part of `psi` on `components`, renormalized on that subspace.
/// Returns the subspace weight alongside.
pub fn restricted_ipr(psi: impl Fn(usize) -> f64, components: &[usize]) -> (f64, f64) {
    let (mut weight, mut fourth) = (0.0, 0.0);
    for &n in components {
        let p = psi(n) * psi(n);
        weight += p;
        fourth += p * p;
    }
    if weight > 0.0 {
        (fourth / (weight * weight), weight)
    } else {
        (0.0, 0.0)
    }
}
