//! Truncated product-state basis.
//!
//! States are occupation tuples `(n_1, ..., n_N)` with `0 <= n_i < d`,
//! enumerated in lexicographic order (site 0 most significant). An optional
//! excitation window keeps only states with `k_min <= sum n_i <= k_max`, and
//! an optional parity keeps only states whose total excitation has that
//! parity. The charge coupling changes the total excitation by an even amount,
//! so each parity sector is an invariant block of the Hamiltonian.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

pub const DEFAULT_BASIS_CAP: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub n_sites: usize,
    /// Levels per site.
    pub levels: usize,
    /// Inclusive bounds on the total excitation.
    pub window: Option<(usize, usize)>,
    /// Keep only states with `sum n_i % 2 == parity`.
    pub parity: Option<usize>,
}

impl BasisSpec {
    pub fn full(n_sites: usize, levels: usize) -> Self {
        Self { n_sites, levels, window: None, parity: None }
    }

    pub fn window(n_sites: usize, levels: usize, k_min: usize, k_max: usize) -> Self {
        Self { n_sites, levels, window: Some((k_min, k_max)), parity: None }
    }

    pub fn with_parity(self, parity: usize) -> Self {
        Self { parity: Some(parity % 2), ..self }
    }

    fn admits(&self, total: usize) -> bool {
        self.window.is_none_or(|(lo, hi)| lo <= total && total <= hi)
            && self.parity.is_none_or(|p| total % 2 == p)
    }
}

#[derive(Clone, Debug)]
pub struct ManyBodyBasis {
    spec: BasisSpec,
    /// Flattened occupations, `n_sites` entries per state.
    occupations: Vec<u8>,
    totals: Vec<usize>,
    lookup: HashMap<u64, usize>,
    strides: Vec<u64>,
}

/// Number of tuples in `0..levels` over `n_sites` sites with each total excitation.
pub fn stratum_sizes(n_sites: usize, levels: usize) -> Vec<u128> {
    let max_total = n_sites * (levels.saturating_sub(1));
    let mut counts = vec![0u128; max_total + 1];
    counts[0] = 1;
    for site in 0..n_sites {
        let mut next = vec![0u128; max_total + 1];
        let reach = site * (levels - 1);
        for (total, &c) in counts.iter().enumerate().take(reach + 1) {
            if c == 0 {
                continue;
            }
            for n in 0..levels {
                next[total + n] += c;
            }
        }
        counts = next;
    }
    counts
}

/// `C(n, k)` in exact integer arithmetic.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

pub fn enumerate_basis(n_sites: usize, levels: usize, window: Option<(usize, usize)>) -> Result<ManyBodyBasis> {
    ManyBodyBasis::new(BasisSpec { n_sites, levels, window, parity: None }, DEFAULT_BASIS_CAP)
}

impl ManyBodyBasis {
    pub fn new(spec: BasisSpec, cap: usize) -> Result<Self> {
        if spec.n_sites == 0 {
            return Err(ModelError::InvalidBasis("basis needs at least one site".into()));
        }
        if spec.levels < 2 || spec.levels > u8::MAX as usize {
            return Err(ModelError::InvalidBasis(format!("levels per site must lie in 2..=255, got {}", spec.levels)));
        }
        if let Some((lo, hi)) = spec.window {
            if lo > hi {
                return Err(ModelError::InvalidBasis(format!("empty window [{lo}, {hi}]")));
            }
        }
        let code_space = (spec.levels as u64).checked_pow(spec.n_sites as u32);
        if code_space.is_none() {
            return Err(ModelError::InvalidBasis(format!(
                "{}^{} product states exceed the 64-bit index space",
                spec.levels, spec.n_sites
            )));
        }

        let size: u128 = stratum_sizes(spec.n_sites, spec.levels)
            .iter()
            .enumerate()
            .filter(|(total, _)| spec.admits(*total))
            .map(|(_, &c)| c)
            .sum();
        if size > cap as u128 {
            return Err(ModelError::BasisTooLarge { size: size.min(usize::MAX as u128) as usize, cap });
        }
        let size = size as usize;

        let n = spec.n_sites;
        let mut strides = vec![1u64; n];
        for site in (0..n.saturating_sub(1)).rev() {
            strides[site] = strides[site + 1] * spec.levels as u64;
        }

        let mut basis = Self {
            spec,
            occupations: Vec::with_capacity(size * n),
            totals: Vec::with_capacity(size),
            lookup: HashMap::with_capacity(size),
            strides,
        };
        let (k_min, k_max) = spec.window.unwrap_or((0, n * (spec.levels - 1)));
        let mut current = vec![0u8; n];
        basis.fill(&mut current, 0, 0, k_min, k_max);
        debug_assert_eq!(basis.len(), size);
        Ok(basis)
    }

    fn fill(&mut self, current: &mut [u8], site: usize, total: usize, k_min: usize, k_max: usize) {
        let n = self.spec.n_sites;
        if site == n {
            if self.spec.admits(total) {
                let code = self.encode(current);
                self.lookup.insert(code, self.totals.len());
                self.occupations.extend_from_slice(current);
                self.totals.push(total);
            }
            return;
        }
        let remaining = n - site - 1;
        let top = self.spec.levels - 1;
        for level in 0..=top {
            let t = total + level;
            if t > k_max {
                break;
            }
            if t + remaining * top < k_min {
                continue;
            }
            current[site] = level as u8;
            self.fill(current, site + 1, t, k_min, k_max);
        }
        current[site] = 0;
    }

    #[inline]
    fn encode(&self, occupation: &[u8]) -> u64 {
        occupation.iter().zip(&self.strides).map(|(&o, &s)| o as u64 * s).sum()
    }

    pub fn spec(&self) -> BasisSpec {
        self.spec
    }

    pub fn n_sites(&self) -> usize {
        self.spec.n_sites
    }

    pub fn levels(&self) -> usize {
        self.spec.levels
    }

    pub fn window(&self) -> Option<(usize, usize)> {
        self.spec.window
    }

    pub fn len(&self) -> usize {
        self.totals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.totals.is_empty()
    }

    #[inline]
    pub fn state(&self, index: usize) -> &[u8] {
        let n = self.spec.n_sites;
        &self.occupations[index * n..(index + 1) * n]
    }

    pub fn states(&self) -> impl Iterator<Item = &[u8]> {
        self.occupations.chunks_exact(self.spec.n_sites)
    }

    #[inline]
    pub fn excitation(&self, index: usize) -> usize {
        self.totals[index]
    }

    #[inline]
    pub fn index_of(&self, occupation: &[u8]) -> Option<usize> {
        if occupation.len() != self.spec.n_sites || occupation.iter().any(|&o| o as usize >= self.spec.levels) {
            return None;
        }
        self.lookup.get(&self.encode(occupation)).copied()
    }

    /// Index of the product state with site `i` occupied iff bit `i` of `mask` is set.
    pub fn computational_index(&self, mask: u64) -> Option<usize> {
        let occupation: Vec<u8> = (0..self.spec.n_sites).map(|i| ((mask >> i) & 1) as u8).collect();
        self.index_of(&occupation)
    }

    /// Number of basis states per total excitation present in the basis.
    pub fn stratum_counts(&self) -> BTreeMap<usize, usize> {
        let mut counts = BTreeMap::new();
        for &t in &self.totals {
            *counts.entry(t).or_insert(0) += 1;
        }
        counts
    }

    pub fn stratum_count(&self, k: usize) -> usize {
        self.totals.iter().filter(|&&t| t == k).count()
    }
}
