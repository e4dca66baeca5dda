//! Walsh-Hadamard analysis of computational levels.
//!
//! Bit `i` of a label is site `i`; bitstrings are printed site 0 first.
//! `c_b = 2^-N sum_b' (-1)^{popcount(b & b')} E_b'`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{DiagnosticsError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalshSpectrum {
    pub n_sites: usize,
    /// `E_b` indexed by label.
    pub levels: Vec<f64>,
    /// `c_b` indexed by label.
    pub coefficients: Vec<f64>,
    /// Worst overlap met while tracking each label; 1 when not tracked.
    pub tracking_quality: Vec<f64>,
}

impl WalshSpectrum {
    pub fn from_levels(n_sites: usize, levels: Vec<f64>, tracking_quality: Option<Vec<f64>>) -> Result<Self> {
        let coefficients = walsh_transform(&levels)?;
        if coefficients.len() != 1 << n_sites {
            return Err(DiagnosticsError::IncompleteLevels { expected: 1 << n_sites, got: levels.len() });
        }
        let tracking_quality = tracking_quality.unwrap_or_else(|| vec![1.0; levels.len()]);
        if tracking_quality.len() != levels.len() {
            return Err(DiagnosticsError::LengthMismatch(tracking_quality.len(), levels.len()));
        }
        Ok(Self { n_sites, levels, coefficients, tracking_quality })
    }

    pub fn min_quality(&self) -> f64 {
        self.tracking_quality.iter().copied().fold(1.0, f64::min)
    }
}

pub fn bitstring(label: usize, n_sites: usize) -> String {
    (0..n_sites).map(|i| if label >> i & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn parse_bitstring(text: &str) -> Result<usize> {
    if text.is_empty() || text.len() > 63 {
        return Err(DiagnosticsError::InvalidInput(format!("bad bitstring `{text}`")));
    }
    text.chars().enumerate().try_fold(0usize, |acc, (i, ch)| match ch {
        '0' => Ok(acc),
        '1' => Ok(acc | 1 << i),
        _ => Err(DiagnosticsError::InvalidInput(format!("bad bitstring `{text}`"))),
    })
}

fn butterfly(values: &mut [f64]) {
    let n = values.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (values[i], values[i + h]);
                values[i] = a + b;
                values[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

fn check_len(len: usize) -> Result<()> {
    if len == 0 || !len.is_power_of_two() {
        return Err(DiagnosticsError::IncompleteLevels {
            expected: len.max(1).next_power_of_two(),
            got: len,
        });
    }
    Ok(())
}

/// Levels to coefficients.
pub fn walsh_transform(levels: &[f64]) -> Result<Vec<f64>> {
    check_len(levels.len())?;
    let mut c = levels.to_vec();
    butterfly(&mut c);
    let scale = 1.0 / levels.len() as f64;
    c.iter_mut().for_each(|x| *x *= scale);
    Ok(c)
}

/// Coefficients back to levels.
pub fn inverse_walsh_transform(coefficients: &[f64]) -> Result<Vec<f64>> {
    check_len(coefficients.len())?;
    let mut e = coefficients.to_vec();
    butterfly(&mut e);
    Ok(e)
}

/// Largest index distance between two set bits; 0 for weight below 2.
pub fn max_bit_distance(label: usize) -> usize {
    if label.count_ones() < 2 {
        return 0;
    }
    (usize::BITS - 1 - label.leading_zeros()) as usize - label.trailing_zeros() as usize
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalshGroup {
    pub members: Vec<usize>,
    pub mean_abs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalshGroups {
    /// Weight-1 coefficients, by site.
    pub single: Vec<f64>,
    /// Weight >= 2 labels keyed by the distance between their outermost 1-bits.
    pub by_distance: BTreeMap<usize, WalshGroup>,
}

impl WalshGroups {
    pub fn nearest_neighbour(&self) -> Option<f64> {
        self.by_distance.get(&1).map(|g| g.mean_abs)
    }
}

pub fn group_walsh(coefficients: &[f64]) -> Result<WalshGroups> {
    check_len(coefficients.len())?;
    let n_sites = coefficients.len().trailing_zeros() as usize;
    let single = (0..n_sites).map(|i| coefficients[1 << i]).collect();
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for label in (0..coefficients.len()).filter(|b| b.count_ones() >= 2) {
        members.entry(max_bit_distance(label)).or_default().push(label);
    }
    let by_distance = members
        .into_iter()
        .map(|(d, members)| {
            let mean_abs = members.iter().map(|&b| coefficients[b].abs()).sum::<f64>() / members.len() as f64;
            (d, WalshGroup { members, mean_abs })
        })
        .collect();
    Ok(WalshGroups { single, by_distance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn levels_from(pairs: &[(&str, f64)]) -> Vec<f64> {
        let mut e = vec![0.0; 1 << pairs[0].0.len()];
        for (b, v) in pairs {
            e[parse_bitstring(b).unwrap()] = *v;
        }
        e
    }

    #[test]
    fn additive_levels_have_no_interaction() {
        let c = walsh_transform(&levels_from(&[("00", 0.0), ("01", 5.0), ("10", 5.0), ("11", 10.0)])).unwrap();
        assert_eq!(c[3], 0.0);
    }

    #[test]
    fn two_site_interaction() {
        let e = levels_from(&[("00", 0.0), ("01", 5.0), ("10", 5.1), ("11", 10.2)]);
        let c = walsh_transform(&e).unwrap();
        assert!((c[0b11] - (0.0 - 5.0 - 5.1 + 10.2) / 4.0).abs() < 1e-15);
        assert!((c[0b11] - 0.025).abs() < 1e-12);
    }

    #[test]
    fn bitstrings_print_site_zero_first() {
        assert_eq!(bitstring(0b00110, 5), "01100");
        assert_eq!(parse_bitstring("01101").unwrap(), 0b10110);
        assert!(parse_bitstring("0121").is_err());
    }

    #[test]
    fn distance_groups() {
        let g = group_walsh(&vec![0.0; 32]).unwrap();
        let far = &g.by_distance[&4].members;
        assert_eq!(far.len(), 8);
        assert!(far.iter().all(|&b| b & 1 == 1 && b & 16 == 16));
        assert_eq!(g.by_distance[&1].members.len(), 4);
        assert_eq!(g.by_distance.values().map(|g| g.members.len()).sum::<usize>(), 32 - 1 - 5);
        assert_eq!(max_bit_distance(0b10110), 3);
    }

    #[test]
    fn rejects_incomplete_levels() {
        assert!(matches!(walsh_transform(&[1.0; 6]), Err(DiagnosticsError::IncompleteLevels { expected: 8, got: 6 })));
        assert!(walsh_transform(&[]).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(levels in proptest::collection::vec(-10.0f64..10.0, 32)) {
            let back = inverse_walsh_transform(&walsh_transform(&levels).unwrap()).unwrap();
            for (a, b) in levels.iter().zip(&back) {
                prop_assert!((a - b).abs() < 1e-10);
            }
        }

        #[test]
        fn shift_only_moves_the_constant(levels in proptest::collection::vec(-10.0f64..10.0, 16), shift in -100.0f64..100.0) {
            let a = walsh_transform(&levels).unwrap();
            let shifted: Vec<f64> = levels.iter().map(|e| e + shift).collect();
            let b = walsh_transform(&shifted).unwrap();
            prop_assert!((b[0] - a[0] - shift).abs() < 1e-12);
            for k in 1..16 {
                prop_assert!((a[k] - b[k]).abs() < 1e-12);
            }
        }

        #[test]
        fn single_bit_fields_have_no_couplings(h in proptest::collection::vec(-5.0f64..5.0, 6)) {
            let levels: Vec<f64> = (0..64usize)
                .map(|b| (0..6).map(|i| if b >> i & 1 == 1 { -h[i] } else { h[i] }).sum())
                .collect();
            let c = walsh_transform(&levels).unwrap();
            for (b, v) in c.iter().enumerate().filter(|(b, _)| b.count_ones() >= 2) {
                prop_assert!(v.abs() < 1e-12, "c_{b} = {v}");
            }
            let g = group_walsh(&c).unwrap();
            prop_assert!(g.by_distance.values().all(|g| g.mean_abs < 1e-12));
        }
    }
}
