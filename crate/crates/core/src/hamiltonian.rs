//! Many-body Hamiltonian in a truncated product basis.
//!
//! `H = sum_i sum_k eps_i^(k) |k><k|_i + T sum_<ij> n_i n_j`, with each site
//! expanded in its own eigenbasis. Matrix elements that would leave the basis
//! (window or parity sector) are dropped.

use faer::Mat;

use crate::basis::ManyBodyBasis;
use crate::error::{ModelError, Result};
use crate::lattice::Lattice;
use crate::transmon::SingleTransmonSolution;

/// `H(T) = diag(diagonal) + T * coupling`.
#[derive(Clone, Debug)]
pub struct HamiltonianParts {
    pub diagonal: Vec<f64>,
    pub coupling: Mat<f64>,
}

impl HamiltonianParts {
    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn at(&self, coupling_strength: f64) -> Mat<f64> {
        let dim = self.dim();
        let mut h = Mat::<f64>::from_fn(dim, dim, |r, c| coupling_strength * self.coupling[(r, c)]);
        for (i, &e) in self.diagonal.iter().enumerate() {
            h[(i, i)] += e;
        }
        h
    }
}

pub fn build_many_body_hamiltonian(
    solutions: &[SingleTransmonSolution],
    lattice: &Lattice,
    coupling_strength: f64,
    basis: &ManyBodyBasis,
) -> Result<Mat<f64>> {
    Ok(hamiltonian_parts(solutions, lattice, basis)?.at(coupling_strength))
}

pub fn hamiltonian_parts(
    solutions: &[SingleTransmonSolution],
    lattice: &Lattice,
    basis: &ManyBodyBasis,
) -> Result<HamiltonianParts> {
    let n = basis.n_sites();
    let d = basis.levels();
    if solutions.len() != n || lattice.n_sites() != n {
        return Err(ModelError::DimensionMismatch(format!(
            "{} site solutions, {} lattice sites, {} basis sites",
            solutions.len(),
            lattice.n_sites(),
            n
        )));
    }
    if let Some((site, s)) = solutions.iter().enumerate().find(|(_, s)| s.dim() < d) {
        return Err(ModelError::DimensionMismatch(format!(
            "site {site} keeps {} levels but the basis needs {d}",
            s.dim()
        )));
    }

    // Non-zero charge transitions per site and level: (target level, <from|n|to>).
    let transitions: Vec<Vec<Vec<(u8, f64)>>> = solutions
        .iter()
        .map(|sol| {
            (0..d)
                .map(|from| {
                    (0..d)
                        .filter(|&to| (to + from) % 2 == 1)
                        .map(|to| (to as u8, sol.charge(from, to)))
                        .filter(|&(_, v)| v != 0.0)
                        .collect()
                })
                .collect()
        })
        .collect();

    let dim = basis.len();
    let diagonal: Vec<f64> = (0..dim)
        .map(|s| {
            basis
                .state(s)
                .iter()
                .zip(solutions)
                .map(|(&k, sol)| sol.levels[k as usize])
                .sum()
        })
        .collect();

    let mut coupling = Mat::<f64>::zeros(dim, dim);
    let mut scratch = vec![0u8; n];
    for s in 0..dim {
        scratch.copy_from_slice(basis.state(s));
        for &(i, j) in lattice.edges() {
            let (x, y) = (scratch[i], scratch[j]);
            for &(a, na) in &transitions[i][x as usize] {
                scratch[i] = a;
                for &(b, nb) in &transitions[j][y as usize] {
                    scratch[j] = b;
                    if let Some(target) = basis.index_of(&scratch) {
                        coupling[(target, s)] += na * nb;
                    }
                }
                scratch[j] = y;
            }
            scratch[i] = x;
        }
    }
    Ok(HamiltonianParts { diagonal, coupling })
}
