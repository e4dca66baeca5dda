//! Dense symmetric diagonalization and excitation-bundle tagging.
//!
//! The eigensolver is faer's self-adjoint decomposition (Householder
//! tridiagonalization followed by a divide-and-conquer/QR stage), O(dim^3) in
//! time and O(dim^2) in memory. Dimensions up to ~2e4 fit in a few GB.

use std::collections::BTreeMap;
use std::ops::Range;

use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use crate::basis::ManyBodyBasis;
use crate::error::{ModelError, Result};

#[derive(Clone, Debug, Default)]
pub struct SpectrumResult {
    /// Ascending (GHz).
    pub eigenvalues: Vec<f64>,
    /// Columns aligned with `eigenvalues`, rows in basis order.
    pub eigenvectors: Option<Mat<f64>>,
    pub bundle_index: Option<Vec<usize>>,
    pub metadata: BTreeMap<String, String>,
}

impl SpectrumResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn vector(&self, alpha: usize) -> Option<Vec<f64>> {
        let v = self.eigenvectors.as_ref()?;
        Some((0..v.nrows()).map(|r| v[(r, alpha)]).collect())
    }
}

pub fn diagonalize(h: &Mat<f64>, want_vectors: bool) -> Result<SpectrumResult> {
    let dim = h.nrows();
    if h.ncols() != dim {
        return Err(ModelError::DimensionMismatch(format!("{}x{} matrix is not square", dim, h.ncols())));
    }
    for c in 0..dim {
        for r in (c + 1)..dim {
            if h[(r, c)] != h[(c, r)] {
                return Err(ModelError::DimensionMismatch(format!("matrix is not symmetric at ({r},{c})")));
            }
        }
    }
    if dim == 0 {
        return Ok(SpectrumResult::default());
    }
    let (eigenvalues, eigenvectors) = if want_vectors {
        let evd = h.self_adjoint_eigen(Side::Lower).map_err(|_| ModelError::NoConvergence { dim })?;
        let values: Vec<f64> = (0..dim).map(|i| evd.S()[i]).collect();
        (values, Some(evd.U().to_owned()))
    } else {
        let values = h.self_adjoint_eigenvalues(Side::Lower).map_err(|_| ModelError::NoConvergence { dim })?;
        (values, None)
    };
    if eigenvalues.iter().any(|e| !e.is_finite()) {
        return Err(ModelError::NoConvergence { dim });
    }
    debug_assert!(eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    Ok(SpectrumResult { eigenvalues, eigenvectors, bundle_index: None, metadata: BTreeMap::new() })
}

/// The block of sorted eigenvalues assigned to one excitation bundle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleTag {
    pub k: usize,
    pub range: Range<usize>,
    pub gap_below: Option<f64>,
    pub gap_above: Option<f64>,
    pub max_internal_spacing: f64,
    /// Set when a neighbouring gap is not larger than the widest internal
    /// spacing, i.e. the counting assignment is not backed by a clear gap.
    pub overlap: bool,
}

/// Assigns the `M_k` eigenvalues following all lower strata of the basis to
/// bundle `k`, where `M_k` is the number of basis states with total excitation `k`.
pub fn select_bundle(spectrum: &SpectrumResult, k: usize, basis: &ManyBodyBasis) -> Result<BundleTag> {
    if spectrum.len() != basis.len() {
        return Err(ModelError::DimensionMismatch(format!(
            "{} eigenvalues for a basis of {} states",
            spectrum.len(),
            basis.len()
        )));
    }
    let counts = basis.stratum_counts();
    let size = *counts.get(&k).ok_or_else(|| ModelError::BundleUnavailable {
        k,
        reason: format!("basis holds strata {:?}", counts.keys().collect::<Vec<_>>()),
    })?;
    let offset: usize = counts.range(..k).map(|(_, &c)| c).sum();
    let range = offset..offset + size;
    let e = &spectrum.eigenvalues;
    let max_internal_spacing = e[range.clone()].windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let gap_below = (offset > 0).then(|| e[offset] - e[offset - 1]);
    let gap_above = (range.end < e.len()).then(|| e[range.end] - e[range.end - 1]);
    let overlap = [gap_below, gap_above].iter().flatten().any(|&g| g <= max_internal_spacing);
    Ok(BundleTag { k, range, gap_below, gap_above, max_internal_spacing, overlap })
}

/// Per-eigenvalue bundle label obtained by counting strata from the bottom.
pub fn tag_bundles(spectrum: &mut SpectrumResult, basis: &ManyBodyBasis) -> Result<()> {
    if spectrum.len() != basis.len() {
        return Err(ModelError::DimensionMismatch(format!(
            "{} eigenvalues for a basis of {} states",
            spectrum.len(),
            basis.len()
        )));
    }
    let tags = basis
        .stratum_counts()
        .into_iter()
        .flat_map(|(k, count)| std::iter::repeat_n(k, count))
        .collect();
    spectrum.bundle_index = Some(tags);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::enumerate_basis;
    use crate::hamiltonian::build_many_body_hamiltonian;
    use crate::lattice::Lattice;
    use crate::transmon::{solve_single_transmon, TransmonParams};

    #[test]
    fn one_by_one() {
        let h = Mat::from_fn(1, 1, |_, _| 3.5);
        let s = diagonalize(&h, true).unwrap();
        assert_eq!(s.eigenvalues, vec![3.5]);
        assert_eq!(s.eigenvectors.unwrap()[(0, 0)].abs(), 1.0);
    }

    #[test]
    fn diagonal_matrix_sorted_with_permuted_identity() {
        let diag = [3.0, -1.0, 2.0, 0.5];
        let h = Mat::from_fn(4, 4, |r, c| if r == c { diag[r] } else { 0.0 });
        let s = diagonalize(&h, true).unwrap();
        assert_eq!(s.eigenvalues, vec![-1.0, 0.5, 2.0, 3.0]);
        let v = s.eigenvectors.unwrap();
        let order = [1, 3, 2, 0];
        for (col, &row) in order.iter().enumerate() {
            for r in 0..4 {
                let expected = if r == row { 1.0 } else { 0.0 };
                assert!((v[(r, col)].abs() - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn two_level_closed_form() {
        let (g, delta) = (0.3, 1.7);
        let h = Mat::from_fn(2, 2, |r, c| match (r, c) {
            (0, 0) => 0.0,
            (1, 1) => delta,
            _ => g,
        });
        let s = diagonalize(&h, false).unwrap();
        let root = (delta * delta + 4.0 * g * g).sqrt();
        assert!((s.eigenvalues[0] - (delta - root) / 2.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] - (delta + root) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_asymmetric() {
        let h = Mat::from_fn(2, 2, |r, c| (r + 2 * c) as f64);
        assert!(diagonalize(&h, false).is_err());
    }

    #[test]
    fn eigenvectors_normalized() {
        let h = Mat::from_fn(30, 30, |r, c| ((r * 7 + c * 7 + r * c) % 11) as f64 - 5.0);
        let s = diagonalize(&h, true).unwrap();
        let v = s.eigenvectors.unwrap();
        for c in 0..30 {
            let norm: f64 = (0..30).map(|r| v[(r, c)] * v[(r, c)]).sum();
            assert!((norm - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn bundles_in_decoupled_limit() {
        let lattice = Lattice::chain(4).unwrap();
        let e_j = [12.0, 13.1, 12.6, 11.8];
        let sols: Vec<_> = e_j
            .iter()
            .map(|&ej| solve_single_transmon(&TransmonParams::new(0.25, ej, 15, 4).unwrap()).unwrap())
            .collect();
        let basis = enumerate_basis(4, 4, Some((0, 3))).unwrap();
        let h = build_many_body_hamiltonian(&sols, &lattice, 0.0, &basis).unwrap();
        let mut s = diagonalize(&h, false).unwrap();
        for k in 0..=3 {
            let tag = select_bundle(&s, k, &basis).unwrap();
            assert!(!tag.overlap);
            let mut expected: Vec<f64> = (0..basis.len())
                .filter(|&i| basis.excitation(i) == k)
                .map(|i| h[(i, i)])
                .collect();
            expected.sort_by(f64::total_cmp);
            for (a, b) in s.eigenvalues[tag.range.clone()].iter().zip(&expected) {
                assert!((a - b).abs() < 1e-10);
            }
        }
        let ground = select_bundle(&s, 0, &basis).unwrap();
        assert_eq!(ground.range, 0..1);
        assert!(select_bundle(&s, 4, &basis).is_err());
        tag_bundles(&mut s, &basis).unwrap();
        assert_eq!(s.bundle_index.as_ref().unwrap()[0], 0);
        assert_eq!(s.bundle_index.as_ref().unwrap()[1..5], [1, 1, 1, 1]);
    }
}
