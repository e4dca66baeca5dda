//! Kullback-Leibler divergence of binned ratio distributions.

use serde::{Deserialize, Serialize};

use crate::error::{DiagnosticsError, Result};
use crate::reference::{reference_distribution, Ensemble};

pub const DEFAULT_BINS: usize = 20;
/// Minimum pooled samples per bin.
pub const MIN_SAMPLES_PER_BIN: usize = 10;

/// `sum_k p_k ln(p_k / q_k)` in nats, with `0 ln 0 = 0`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(DiagnosticsError::LengthMismatch(p.len(), q.len()));
    }
    let mut d = 0.0;
    for (bin, (&pk, &qk)) in p.iter().zip(q).enumerate() {
        if pk > 0.0 {
            if qk <= 0.0 {
                return Err(DiagnosticsError::SupportMismatch { bin });
            }
            d += pk * (pk / qk).ln();
        }
    }
    Ok(d)
}

/// Normalized histogram of values in `[0, 1]` over uniform bins; 1.0 lands in the last bin.
pub fn histogram(values: &[f64], bins: usize) -> Result<Vec<f64>> {
    if bins == 0 {
        return Err(DiagnosticsError::InvalidInput("zero bins".into()));
    }
    if values.is_empty() {
        return Err(DiagnosticsError::InsufficientSamples { needed: 1, got: 0, bins });
    }
    let mut counts = vec![0usize; bins];
    for &v in values {
        if !(0.0..=1.0).contains(&v) {
            return Err(DiagnosticsError::InvalidInput(format!("ratio {v} outside [0, 1]")));
        }
        counts[((v * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let n = values.len() as f64;
    Ok(counts.into_iter().map(|c| c as f64 / n).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KlReport {
    /// `D(p || Poisson) / D(GOE || Poisson)`.
    pub d_vs_poisson_norm: f64,
    /// `D(p || GOE) / D(Poisson || GOE)`.
    pub d_vs_wigner_dyson_norm: f64,
    pub histogram: Vec<f64>,
    pub bin_count: usize,
    pub sample_count: usize,
    pub mean_ratio: f64,
}

/// Divergences of a pooled ratio sample from both references, each scaled by
/// the divergence of the opposite reference on the same binning.
pub fn normalized_kl(values: &[f64], bins: usize) -> Result<KlReport> {
    let needed = MIN_SAMPLES_PER_BIN * bins;
    if values.len() < needed {
        return Err(DiagnosticsError::InsufficientSamples { needed, got: values.len(), bins });
    }
    let p = histogram(values, bins)?;
    let poisson = reference_distribution(Ensemble::Poisson, bins)?;
    let goe = reference_distribution(Ensemble::Goe, bins)?;
    Ok(KlReport {
        d_vs_poisson_norm: kl_divergence(&p, &poisson)? / kl_divergence(&goe, &poisson)?,
        d_vs_wigner_dyson_norm: kl_divergence(&p, &goe)? / kl_divergence(&poisson, &goe)?,
        bin_count: bins,
        sample_count: values.len(),
        mean_ratio: values.iter().sum::<f64>() / values.len() as f64,
        histogram: p,
    })
}
