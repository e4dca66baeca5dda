//! Diabatic tracking of labeled eigenstates through a parameter sweep.
//!
//! Labels start on known vectors and are carried from step to step by
//! eigenvector overlap, assigned greedily over the full overlap matrix.
//! Narrow anticrossings are stepped over, so labels follow the diabatic
//! states; the step shrinks when the best overlap of some label drops.

use faer::Mat;
use serde::{Deserialize, Serialize};
use transmon_core::basis::BasisSpec;
use transmon_core::units::MHZ;
use transmon_core::{diagonalize, hamiltonian_parts, HamiltonianParts, Lattice, ManyBodyBasis, SingleTransmonSolution};

use crate::error::{DiagnosticsError, Result};
use crate::walsh::WalshSpectrum;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepPolicy {
    /// Largest parameter step (GHz for the coupling).
    pub max_step: f64,
    /// Steps are not halved below this.
    pub min_step: f64,
    /// Halve the step when any label's overlap falls below this.
    pub refine_below: f64,
    /// Labels whose overlap falls below this are ambiguous.
    pub ambiguous_below: f64,
}

impl Default for StepPolicy {
    fn default() -> Self {
        Self { max_step: 0.1 * MHZ, min_step: 0.1 * MHZ / 64.0, refine_below: 0.9, ambiguous_below: 0.5 }
    }
}

impl StepPolicy {
    fn validate(&self) -> Result<()> {
        let ok = self.max_step > 0.0
            && self.min_step > 0.0
            && self.min_step <= self.max_step
            && (0.0..=1.0).contains(&self.ambiguous_below)
            && (0.0..=1.0).contains(&self.refine_below);
        if ok {
            Ok(())
        } else {
            Err(DiagnosticsError::InvalidInput(format!("bad step policy {self:?}")))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackedLevels {
    pub parameter: f64,
    pub energies: Vec<f64>,
    /// Worst overlap met by each label up to this point.
    pub quality: Vec<f64>,
    pub steps: usize,
}

impl TrackedLevels {
    pub fn ambiguous(&self, policy: &StepPolicy) -> bool {
        self.quality.iter().any(|&q| q < policy.ambiguous_below)
    }
}

/// Assigns each label a distinct column, taking the largest overlaps first.
/// `overlaps` is labels x states.
fn greedy_assignment(overlaps: &Mat<f64>) -> Vec<(usize, f64)> {
    let (labels, states) = (overlaps.nrows(), overlaps.ncols());
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(labels * states);
    for s in 0..states {
        for l in 0..labels {
            pairs.push((overlaps[(l, s)].abs(), l, s));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut result = vec![(usize::MAX, 0.0); labels];
    let mut taken = vec![false; states];
    let mut left = labels;
    for (o, l, s) in pairs {
        if left == 0 {
            break;
        }
        if result[l].0 == usize::MAX && !taken[s] {
            result[l] = (s, o);
            taken[s] = true;
            left -= 1;
        }
    }
    result
}

/// Follows the columns of `initial` (orthonormal, one per label) through
/// `h_at(x)` from `start` to each of the ascending `targets`.
pub fn track_levels<F>(
    mut h_at: F,
    start: f64,
    initial: Mat<f64>,
    initial_energies: Vec<f64>,
    targets: &[f64],
    policy: &StepPolicy,
) -> Result<Vec<TrackedLevels>>
where
    F: FnMut(f64) -> Mat<f64>,
{
    policy.validate()?;
    let labels = initial.ncols();
    if initial_energies.len() != labels {
        return Err(DiagnosticsError::LengthMismatch(initial_energies.len(), labels));
    }
    if targets.windows(2).any(|w| w[1] < w[0]) || targets.first().is_some_and(|&t| t < start) {
        return Err(DiagnosticsError::InvalidInput("targets must ascend from the start value".into()));
    }
    let mut x = start;
    let mut vectors = initial;
    let mut energies = initial_energies;
    let mut quality = vec![1.0f64; labels];
    let mut step = policy.max_step;
    let mut steps = 0;
    let mut out = Vec::with_capacity(targets.len());
    for &target in targets {
        while x < target {
            let this_step = step.min(target - x);
            let next = if target - x <= this_step * (1.0 + 1e-9) { target } else { x + this_step };
            let spectrum = diagonalize(&h_at(next), true)?;
            let u = spectrum.eigenvectors.expect("vectors requested");
            let overlaps = vectors.transpose() * &u;
            let assignment = greedy_assignment(&overlaps);
            let worst = assignment.iter().map(|a| a.1).fold(1.0, f64::min);
            if worst < policy.refine_below && this_step > policy.min_step {
                step = (this_step / 2.0).max(policy.min_step);
                continue;
            }
            vectors = Mat::from_fn(u.nrows(), labels, |r, l| u[(r, assignment[l].0)]);
            for (l, &(s, o)) in assignment.iter().enumerate() {
                energies[l] = spectrum.eigenvalues[s];
                quality[l] = quality[l].min(o);
            }
            x = next;
            steps += 1;
            if worst >= policy.refine_below {
                step = (step * 2.0).min(policy.max_step);
            }
        }
        out.push(TrackedLevels { parameter: target, energies: energies.clone(), quality: quality.clone(), steps });
    }
    Ok(out)
}

struct Sector {
    parts: HamiltonianParts,
    /// Computational labels living in this sector and their basis indices.
    labels: Vec<usize>,
    indices: Vec<usize>,
}

/// The coupled array split into its two excitation-parity blocks, with the
/// `2^N` computational product states located in each.
pub struct ComputationalSystem {
    n_sites: usize,
    sectors: Vec<Sector>,
}

impl ComputationalSystem {
    /// Basis: `levels` per site, total excitation at most `max_excitation`.
    pub fn new(
        solutions: &[SingleTransmonSolution],
        lattice: &Lattice,
        levels: usize,
        max_excitation: usize,
    ) -> Result<Self> {
        let n = lattice.n_sites();
        if levels < 2 || max_excitation < n {
            return Err(DiagnosticsError::InvalidInput(format!(
                "computational states need >= 2 levels and an excitation window reaching {n}"
            )));
        }
        if n > 20 {
            return Err(DiagnosticsError::InvalidInput(format!("{n} sites is too many for 2^N labels")));
        }
        let solutions: Vec<_> = solutions.iter().map(|s| s.truncated(levels.min(s.dim()))).collect();
        let mut sectors = Vec::with_capacity(2);
        for parity in 0..2 {
            let spec = BasisSpec::window(n, levels, 0, max_excitation).with_parity(parity);
            let basis = ManyBodyBasis::new(spec, transmon_core::DEFAULT_BASIS_CAP)?;
            let parts = hamiltonian_parts(&solutions, lattice, &basis)?;
            let labels: Vec<usize> = (0..1usize << n).filter(|b| b.count_ones() as usize % 2 == parity).collect();
            let indices = labels
                .iter()
                .map(|&b| basis.computational_index(b as u64).expect("window holds all computational states"))
                .collect();
            sectors.push(Sector { parts, labels, indices });
        }
        Ok(Self { n_sites: n, sectors })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn sector_dims(&self) -> Vec<usize> {
        self.sectors.iter().map(|s| s.parts.dim()).collect()
    }

    /// Levels of the decoupled array.
    pub fn bare_levels(&self) -> Vec<f64> {
        let mut e = vec![0.0; 1 << self.n_sites];
        for s in &self.sectors {
            for (&b, &i) in s.labels.iter().zip(&s.indices) {
                e[b] = s.parts.diagonal[i];
            }
        }
        e
    }
}

/// Tracks all computational states from T = 0 to each ascending coupling in
/// `targets` and returns their Walsh spectra.
pub fn track_computational_states(
    system: &ComputationalSystem,
    targets: &[f64],
    policy: &StepPolicy,
) -> Result<Vec<WalshSpectrum>> {
    let n_labels = 1usize << system.n_sites;
    let mut levels = vec![vec![0.0; n_labels]; targets.len()];
    let mut quality = vec![vec![1.0; n_labels]; targets.len()];
    for sector in &system.sectors {
        let dim = sector.parts.dim();
        let initial = Mat::from_fn(dim, sector.labels.len(), |r, l| if r == sector.indices[l] { 1.0 } else { 0.0 });
        let energies = sector.indices.iter().map(|&i| sector.parts.diagonal[i]).collect();
        let tracked = track_levels(|t| sector.parts.at(t), 0.0, initial, energies, targets, policy)?;
        for (p, snapshot) in tracked.iter().enumerate() {
            for (l, &b) in sector.labels.iter().enumerate() {
                levels[p][b] = snapshot.energies[l];
                quality[p][b] = snapshot.quality[l];
            }
        }
    }
    levels
        .into_iter()
        .zip(quality)
        .map(|(e, q)| WalshSpectrum::from_levels(system.n_sites, e, Some(q)))
        .collect()
}
