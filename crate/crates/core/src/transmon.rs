//! Single transmon in the charge basis.
//!
//! The charge basis |m>, m = -n_max..n_max, carries `4 E_C m^2` on the
//! diagonal and `-E_J/2` between neighbouring charge states. The Hamiltonian
//! commutes with the reflection m -> -m, so it is diagonalized separately in
//! the even and odd reflection sectors. Eigenstates then have definite
//! parity, levels alternate parity (ground state even), and the charge
//! operator only connects levels of opposite parity.

use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::lattice::Lattice;

/// Level shift tolerated when the charge cutoff grows by [`CUTOFF_PROBE_STEP`].
pub const DEFAULT_CUTOFF_TOLERANCE: f64 = 1e-8;
pub const CUTOFF_PROBE_STEP: usize = 4;
pub const MIN_CHARGE_CUTOFF: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransmonParams {
    /// Charging energy (GHz).
    pub e_c: f64,
    /// Josephson energy (GHz).
    pub e_j: f64,
    /// Charge basis spans `-n_max..=n_max`.
    pub n_max: usize,
    /// Number of eigenstates retained.
    pub levels: usize,
}

impl TransmonParams {
    pub fn new(e_c: f64, e_j: f64, n_max: usize, levels: usize) -> Result<Self> {
        let params = Self { e_c, e_j, n_max, levels };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_c > 0.0 && self.e_c.is_finite()) {
            return Err(ModelError::InvalidParams(format!("E_C must be positive, got {}", self.e_c)));
        }
        if !(self.e_j >= 0.0 && self.e_j.is_finite()) {
            return Err(ModelError::InvalidParams(format!("E_J must be non-negative, got {}", self.e_j)));
        }
        if self.n_max < MIN_CHARGE_CUTOFF {
            return Err(ModelError::InvalidParams(format!(
                "charge cutoff n_max must be at least {MIN_CHARGE_CUTOFF}, got {}",
                self.n_max
            )));
        }
        if self.levels == 0 || self.levels > 2 * self.n_max + 1 {
            return Err(ModelError::InvalidParams(format!(
                "levels kept must lie in 1..={}, got {}",
                2 * self.n_max + 1,
                self.levels
            )));
        }
        Ok(())
    }

    pub fn charge_dim(&self) -> usize {
        2 * self.n_max + 1
    }
}

/// Lowest levels of one transmon and the charge operator in its eigenbasis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleTransmonSolution {
    /// Energies relative to the ground state, ascending (GHz).
    pub levels: Vec<f64>,
    /// Row-major `levels x levels` matrix of <k|n|l>.
    charge: Vec<f64>,
}

impl SingleTransmonSolution {
    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    /// Matrix element <k|n|l>.
    #[inline]
    pub fn charge(&self, k: usize, l: usize) -> f64 {
        self.charge[k * self.levels.len() + l]
    }

    pub fn transition_frequency(&self) -> Option<f64> {
        (self.levels.len() >= 2).then(|| self.levels[1] - self.levels[0])
    }

    /// Second difference `(e2 - e1) - (e1 - e0)`.
    pub fn anharmonicity(&self) -> Option<f64> {
        (self.levels.len() >= 3).then(|| self.levels[2] - 2.0 * self.levels[1] + self.levels[0])
    }

    /// Keeps only the lowest `d` levels.
    pub fn truncated(&self, d: usize) -> Self {
        let d = d.min(self.dim());
        let n = self.dim();
        let mut charge = Vec::with_capacity(d * d);
        for k in 0..d {
            charge.extend_from_slice(&self.charge[k * n..k * n + d]);
        }
        Self { levels: self.levels[..d].to_vec(), charge }
    }
}

/// Solves one transmon and verifies that the retained levels are converged in
/// the charge cutoff to [`DEFAULT_CUTOFF_TOLERANCE`].
pub fn solve_single_transmon(params: &TransmonParams) -> Result<SingleTransmonSolution> {
    solve_single_transmon_with_tolerance(params, DEFAULT_CUTOFF_TOLERANCE)
}

pub fn solve_single_transmon_with_tolerance(
    params: &TransmonParams,
    tolerance: f64,
) -> Result<SingleTransmonSolution> {
    let solution = solve_unchecked(params)?;
    let probe = solve_unchecked(&TransmonParams {
        n_max: params.n_max + CUTOFF_PROBE_STEP,
        ..*params
    })?;
    for (level, (a, b)) in solution.levels.iter().zip(&probe.levels).enumerate() {
        let shift = (a - b).abs();
        if shift > tolerance {
            return Err(ModelError::CutoffTooSmall {
                n_max: params.n_max,
                level,
                shift,
                tolerance,
            });
        }
    }
    Ok(solution)
}

/// Solves one transmon at the given cutoff without the convergence probe.
pub fn solve_unchecked(params: &TransmonParams) -> Result<SingleTransmonSolution> {
    params.validate()?;
    let n_max = params.n_max;
    let half_j = 0.5 * params.e_j;
    let charging = |m: usize| 4.0 * params.e_c * (m * m) as f64;

    // Even sector: |0>, (|m> + |-m>)/sqrt2 for m = 1..n_max.
    let even = Mat::<f64>::from_fn(n_max + 1, n_max + 1, |r, c| {
        if r == c {
            charging(r)
        } else if r.abs_diff(c) == 1 {
            if r.min(c) == 0 {
                -half_j * std::f64::consts::SQRT_2
            } else {
                -half_j
            }
        } else {
            0.0
        }
    });
    // Odd sector: (|m> - |-m>)/sqrt2 for m = 1..n_max (row r <-> m = r + 1).
    let odd = Mat::<f64>::from_fn(n_max, n_max, |r, c| {
        if r == c {
            charging(r + 1)
        } else if r.abs_diff(c) == 1 {
            -half_j
        } else {
            0.0
        }
    });
    let even = sector_eigen(&even)?;
    let odd = sector_eigen(&odd)?;

    let d = params.levels;
    // Level k lives in the even sector for even k, odd sector for odd k.
    let mut levels = Vec::with_capacity(d);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(d);
    for k in 0..d {
        let (values, vecs) = if k % 2 == 0 { &even } else { &odd };
        levels.push(values[k / 2]);
        vectors.push(vecs[k / 2].clone());
    }
    debug_assert!(levels.windows(2).all(|w| w[1] >= w[0] - 1e-9 * (1.0 + w[0].abs())));

    // <even|n|odd> = sum_{m>=1} m u_even(m) u_odd(m); even vectors include m = 0.
    let cross = |even_vec: &[f64], odd_vec: &[f64]| -> f64 {
        (1..=n_max).map(|m| m as f64 * even_vec[m] * odd_vec[m - 1]).sum()
    };
    let element = |vectors: &[Vec<f64>], k: usize, l: usize| -> f64 {
        match (k % 2, l % 2) {
            (0, 1) => cross(&vectors[k], &vectors[l]),
            (1, 0) => cross(&vectors[l], &vectors[k]),
            _ => 0.0,
        }
    };

    // Gauge: ground state with a positive dominant component, then every
    // following state oriented so that <k-1|n|k> > 0.
    orient_dominant_positive(&mut vectors[0]);
    for k in 1..d {
        let link = element(&vectors, k - 1, k);
        if link < 0.0 {
            vectors[k].iter_mut().for_each(|x| *x = -*x);
        } else if link == 0.0 {
            orient_dominant_positive(&mut vectors[k]);
        }
    }

    let mut charge = vec![0.0; d * d];
    for k in 0..d {
        for l in (k + 1)..d {
            let value = element(&vectors, k, l);
            charge[k * d + l] = value;
            charge[l * d + k] = value;
        }
    }

    let ground = levels[0];
    levels.iter_mut().for_each(|e| *e -= ground);
    Ok(SingleTransmonSolution { levels, charge })
}

type SectorEigen = (Vec<f64>, Vec<Vec<f64>>);

fn sector_eigen(matrix: &Mat<f64>) -> Result<SectorEigen> {
    let dim = matrix.nrows();
    let evd = matrix
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| ModelError::NoConvergence { dim })?;
    let values: Vec<f64> = (0..dim).map(|i| evd.S()[i]).collect();
    let u = evd.U();
    let vectors = (0..dim).map(|c| (0..dim).map(|r| u[(r, c)]).collect()).collect();
    Ok((values, vectors))
}

fn orient_dominant_positive(v: &mut [f64]) {
    let dominant = v
        .iter()
        .copied()
        .fold(0.0_f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
    if dominant < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Rotating-wave scales of the weakly anharmonic limit: oscillator frequencies
/// `nu_i = sqrt(8 E_J_i E_C)` and nearest-neighbour hoppings
/// `t_ij = T / (4 sqrt(2 E_C)) (E_J_i E_J_j)^(1/4)`.
///
/// Reporting only; the simulated Hamiltonian never uses these.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveScales {
    pub frequencies: Vec<f64>,
    pub hoppings: Vec<((usize, usize), f64)>,
}

pub fn effective_scales(e_c: f64, e_j: &[f64], coupling: f64, lattice: &Lattice) -> Result<EffectiveScales> {
    if e_j.len() != lattice.n_sites() {
        return Err(ModelError::DimensionMismatch(format!(
            "{} Josephson energies for {} sites",
            e_j.len(),
            lattice.n_sites()
        )));
    }
    if let Some(bad) = e_j.iter().find(|&&x| x <= 0.0) {
        return Err(ModelError::InvalidParams(format!("E_J must be positive, got {bad}")));
    }
    if e_c <= 0.0 {
        return Err(ModelError::InvalidParams(format!("E_C must be positive, got {e_c}")));
    }
    let frequencies = e_j.iter().map(|&ej| (8.0 * ej * e_c).sqrt()).collect();
    let prefactor = coupling / (4.0 * (2.0 * e_c).sqrt());
    let hoppings = lattice
        .edges()
        .iter()
        .map(|&(i, j)| ((i, j), prefactor * (e_j[i] * e_j[j]).powf(0.25)))
        .collect();
    Ok(EffectiveScales { frequencies, hoppings })
}
