//! Josephson-energy disorder.
//!
//! Site energies are Gaussian around the mean (or the sublattice mean for
//! patterned arrays). Each site draws from its own stream keyed by
//! `(seed, site)`; draws with `E_J / E_C` below the transmon-regime bound are
//! rejected and redrawn.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::lattice::{Lattice, Sublattice};
use crate::seed::{gaussian, mix_seed, stream};

pub const MIN_EJ_OVER_EC: f64 = 20.0;
pub const MAX_REDRAWS: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisorderScheme {
    /// Natural disorder, `dE_J = sqrt(E_C E_J / 8)` (frequency spread ~ E_C/2).
    A,
    /// Engineered detuning, `dE_J = sqrt(18 E_C E_J)` (frequency spread ~ 6 E_C).
    B,
    FixedSigma { delta_e_j: f64 },
    /// Sublattice means with a common spread.
    Pattern {
        means: BTreeMap<Sublattice, f64>,
        delta_e_j: f64,
    },
}

impl DisorderScheme {
    /// Standard deviation of E_J (GHz).
    pub fn spread(&self, e_c: f64, mean_e_j: f64) -> f64 {
        match self {
            Self::A => (e_c * mean_e_j / 8.0).sqrt(),
            Self::B => (18.0 * e_c * mean_e_j).sqrt(),
            Self::FixedSigma { delta_e_j } | Self::Pattern { delta_e_j, .. } => *delta_e_j,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisorderModel {
    pub scheme: DisorderScheme,
    pub seed: u64,
    #[serde(default = "default_min_ratio")]
    pub min_ej_over_ec: f64,
}

fn default_min_ratio() -> f64 {
    MIN_EJ_OVER_EC
}

impl DisorderModel {
    pub fn new(scheme: DisorderScheme, seed: u64) -> Self {
        Self { scheme, seed, min_ej_over_ec: MIN_EJ_OVER_EC }
    }
}

/// Frequency spread implied by a Josephson spread, `dnu = sqrt(2 E_C / E_J) dE_J`.
pub fn frequency_spread(e_c: f64, e_j: f64, delta_e_j: f64) -> f64 {
    (2.0 * e_c / e_j).sqrt() * delta_e_j
}

/// Draws one Josephson energy per site.
pub fn sample_disorder(model: &DisorderModel, lattice: &Lattice, e_c: f64, base_e_j: f64) -> Result<Vec<f64>> {
    if !(e_c > 0.0) {
        return Err(ModelError::InvalidDisorder(format!("E_C must be positive, got {e_c}")));
    }
    let spread = model.scheme.spread(e_c, base_e_j);
    if !(spread >= 0.0 && spread.is_finite()) {
        return Err(ModelError::InvalidDisorder(format!("spread must be finite and non-negative, got {spread}")));
    }
    let means: Vec<f64> = match &model.scheme {
        DisorderScheme::Pattern { means, .. } => {
            let labels = lattice
                .pattern()
                .ok_or_else(|| ModelError::InvalidDisorder("pattern disorder on an unlabeled lattice".into()))?;
            labels
                .iter()
                .map(|label| {
                    means
                        .get(label)
                        .copied()
                        .ok_or_else(|| ModelError::InvalidDisorder(format!("no mean E_J for sublattice {label}")))
                })
                .collect::<Result<_>>()?
        }
        _ => vec![base_e_j; lattice.n_sites()],
    };

    means
        .iter()
        .enumerate()
        .map(|(site, &mean)| {
            let mut rng = stream(mix_seed(&[model.seed, site as u64]));
            for _ in 0..MAX_REDRAWS {
                let e_j = mean + spread * gaussian(&mut rng);
                if e_j / e_c >= model.min_ej_over_ec {
                    return Ok(e_j);
                }
            }
            Err(ModelError::DegenerateDisorder {
                site,
                attempts: MAX_REDRAWS,
                min_ratio: model.min_ej_over_ec,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_spreads() {
        assert!((DisorderScheme::A.spread(0.25, 44.0) - 1.1726).abs() < 1e-4);
        assert!((DisorderScheme::B.spread(0.25, 12.5) - 7.5).abs() < 1e-12);
        // Scheme A at E_J = 12.5 GHz: 625 MHz, i.e. a 125 MHz frequency spread.
        let a = DisorderScheme::A.spread(0.25, 12.5);
        assert!((a - 0.625).abs() < 1e-12);
        assert!((frequency_spread(0.25, 12.5, a) - 0.125).abs() < 1e-12);
    }

    #[test]
    fn zero_spread_is_exact() {
        let lattice = Lattice::chain(6).unwrap();
        let model = DisorderModel::new(DisorderScheme::FixedSigma { delta_e_j: 0.0 }, 3);
        assert_eq!(sample_disorder(&model, &lattice, 0.25, 12.5).unwrap(), vec![12.5; 6]);
    }

    #[test]
    fn deterministic_per_site() {
        let model = DisorderModel::new(DisorderScheme::A, 99);
        let short = sample_disorder(&model, &Lattice::chain(4).unwrap(), 0.25, 12.5).unwrap();
        let long = sample_disorder(&model, &Lattice::chain(8).unwrap(), 0.25, 12.5).unwrap();
        assert_eq!(short[..], long[..4]);
        let other = sample_disorder(&DisorderModel::new(DisorderScheme::A, 100), &Lattice::chain(4).unwrap(), 0.25, 12.5)
            .unwrap();
        assert_ne!(short, other);
    }

    #[test]
    fn transmon_regime_guard() {
        let lattice = Lattice::chain(200).unwrap();
        let model = DisorderModel::new(DisorderScheme::B, 5);
        let e_j = sample_disorder(&model, &lattice, 0.25, 12.5).unwrap();
        assert!(e_j.iter().all(|&x| x / 0.25 >= MIN_EJ_OVER_EC));

        let hopeless = DisorderModel::new(DisorderScheme::FixedSigma { delta_e_j: 0.0 }, 1);
        let err = sample_disorder(&hopeless, &lattice, 0.25, 2.0).unwrap_err();
        assert!(matches!(err, ModelError::DegenerateDisorder { site: 0, .. }));
    }

    #[test]
    fn pattern_means() {
        let lattice = Lattice::grid3x3_ab().unwrap();
        let means = BTreeMap::from([(Sublattice::A, 12.58), (Sublattice::B, 13.80)]);
        let model = DisorderModel::new(DisorderScheme::Pattern { means, delta_e_j: 0.0 }, 0);
        let e_j = sample_disorder(&model, &lattice, 0.33, 0.0).unwrap();
        assert_eq!(e_j[0], 12.58);
        assert_eq!(e_j[1], 13.80);
        assert!(sample_disorder(&model, &Lattice::grid3x3().unwrap(), 0.33, 0.0).is_err());
    }
}
