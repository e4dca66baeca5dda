//! One disorder realization: sample, solve, assemble, diagonalize, diagnose.

use transmon_core::transmon::solve_single_transmon_with_tolerance;
use transmon_core::{
    build_many_body_hamiltonian, diagonalize, sample_disorder, select_bundle, DisorderModel, DisorderScheme,
    Lattice, ManyBodyBasis, ModelError, SingleTransmonSolution, TransmonParams, DEFAULT_BASIS_CAP,
};
use transmon_core::basis::BasisSpec;
use transmon_diagnostics::{
    analyze_multiplet, ipr, select_permutation_multiplet, spacing_ratios, track_computational_states,
    ComputationalSystem, DiagnosticsError,
};

use crate::config::{task_seed, Diagnostic, Param, PointParams, SweepConfig};
use crate::error::{Result, SweepError};
use crate::record::{
    MultipletRecord, Outcome, RatioHistogram, SpectralRecord, TaskKey, TaskKind, TaskRecord, WalshPoint, WalshRecord,
};

/// A validated config with everything shared between tasks built once.
pub struct PreparedSweep {
    pub config: SweepConfig,
    pub lattice: Lattice,
    basis: Option<ManyBodyBasis>,
    multiplet: Option<Vec<usize>>,
    walsh_dims: Option<Vec<usize>>,
}

const SPECTRAL: [Diagnostic; 4] = [Diagnostic::Kl, Diagnostic::Ipr, Diagnostic::Multiplet, Diagnostic::Levels];

impl PreparedSweep {
    pub fn new(config: &SweepConfig) -> Result<Self> {
        let mut config = config.clone();
        config.resolve()?;
        let lattice = config.system.lattice()?;
        let s = &config.system;
        let spectral = config.diagnostics.iter().any(|d| SPECTRAL.contains(d));
        let basis = if spectral {
            let (lo, hi) = s.window();
            let mut spec = BasisSpec::window(lattice.n_sites(), s.levels(), lo, hi);
            if hi - lo >= 1 {
                spec = spec.with_parity(s.bundle % 2);
            }
            Some(ManyBodyBasis::new(spec, DEFAULT_BASIS_CAP)?)
        } else {
            None
        };
        let multiplet = match (&basis, &config.multiplet) {
            (Some(b), Some(m)) if config.diagnostics.contains(&Diagnostic::Multiplet) => {
                Some(select_permutation_multiplet(b, lattice.pattern(), &m.counts)?)
            }
            _ => None,
        };
        let walsh_dims = if config.diagnostics.contains(&Diagnostic::Walsh) {
            let n = lattice.n_sites();
            let max = config.walsh.max_excitation.unwrap_or(n + 2);
            let dims = (0..2)
                .map(|p| {
                    ManyBodyBasis::new(BasisSpec::window(n, config.walsh.levels, 0, max).with_parity(p), DEFAULT_BASIS_CAP)
                        .map(|b| b.len())
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Some(dims)
        } else {
            None
        };
        Ok(Self { config, lattice, basis, multiplet, walsh_dims })
    }

    pub fn basis(&self) -> Option<&ManyBodyBasis> {
        self.basis.as_ref()
    }

    pub fn multiplet(&self) -> Option<&[usize]> {
        self.multiplet.as_deref()
    }

    fn wants(&self, d: Diagnostic) -> bool {
        self.config.diagnostics.contains(&d)
    }

    /// Every task of the ensemble slice selected by the config, in key order.
    pub fn tasks(&self) -> Vec<TaskKey> {
        let (ni, nj) = self.config.shape();
        let mut keys = Vec::new();
        let t_axis = self.config.axis(Param::T).map(|(pos, _)| pos);
        for r in self.config.realization_indices() {
            for i in 0..ni {
                for j in 0..nj {
                    if self.basis.is_some() {
                        keys.push(TaskKey { kind: TaskKind::Spectral, i, j, r });
                    }
                    let on_t_origin = match t_axis {
                        Some(0) => i == 0,
                        Some(_) => j == 0,
                        None => true,
                    };
                    if self.walsh_dims.is_some() && on_t_origin {
                        keys.push(TaskKey { kind: TaskKind::Walsh, i, j, r });
                    }
                }
            }
        }
        keys.sort();
        keys
    }

    /// Rough peak memory of one task (bytes).
    pub fn task_bytes(&self) -> u64 {
        let dense = |dim: usize, copies: u64| (dim as u64).pow(2) * 8 * copies;
        let spectral = self.basis.as_ref().map_or(0, |b| {
            let vectors = self.wants(Diagnostic::Ipr) || self.wants(Diagnostic::Multiplet);
            dense(b.len(), if vectors { 4 } else { 2 })
        });
        let walsh = self.walsh_dims.as_ref().map_or(0, |d| d.iter().map(|&n| dense(n, 5)).sum());
        spectral.max(walsh) + (64 << 20)
    }

    fn scheme_at(&self, p: &PointParams) -> DisorderScheme {
        let mut scheme = self.config.system.scheme.clone();
        if let Some(delta) = p.delta_e_j {
            match &mut scheme {
                DisorderScheme::FixedSigma { delta_e_j } | DisorderScheme::Pattern { delta_e_j, .. } => *delta_e_j = delta,
                _ => {}
            }
        }
        scheme
    }

    /// Site solutions of realization `seed` at point `p`.
    pub fn realization(&self, p: &PointParams, seed: u64, levels: usize) -> Result<(Vec<f64>, Vec<SingleTransmonSolution>)> {
        let s = &self.config.system;
        let model = DisorderModel { scheme: self.scheme_at(p), seed, min_ej_over_ec: s.min_ej_over_ec };
        let e_j = sample_disorder(&model, &self.lattice, s.e_c, p.e_j)?;
        let solutions = e_j
            .iter()
            .map(|&e| solve_single_transmon_with_tolerance(&TransmonParams::new(s.e_c, e, s.n_max, levels)?, s.cutoff_tolerance))
            .collect::<std::result::Result<Vec<_>, ModelError>>()?;
        Ok((e_j, solutions))
    }

    pub fn run_task(&self, key: TaskKey) -> TaskRecord {
        let seed = task_seed(self.config.master_seed, key.i, key.j, key.r);
        let outcome = match key.kind {
            TaskKind::Spectral => self.spectral(key, seed).map(Outcome::Spectral),
            TaskKind::Walsh => self.walsh(key, seed).map(Outcome::Walsh),
        };
        let outcome = outcome.unwrap_or_else(|e| Outcome::Failed {
            numerical: !matches!(e, SweepError::Config(_)),
            error: e.to_string(),
        });
        TaskRecord { key, seed, outcome }
    }

    fn spectral(&self, key: TaskKey, seed: u64) -> Result<SpectralRecord> {
        let basis = self.basis.as_ref().expect("spectral tasks need a basis");
        let p = self.config.point(key.i, key.j);
        let bins = self.config.bins;
        let (_, solutions) = self.realization(&p, seed, self.config.system.levels())?;
        let h = build_many_body_hamiltonian(&solutions, &self.lattice, p.t, basis)?;
        let vectors = self.wants(Diagnostic::Ipr) || self.wants(Diagnostic::Multiplet);
        let spectrum = diagonalize(&h, vectors)?;
        drop(h);
        let tag = select_bundle(&spectrum, self.config.system.bundle, basis)?;
        let levels = &spectrum.eigenvalues[tag.range.clone()];
        let ratios = if self.wants(Diagnostic::Kl) {
            let sample = match spacing_ratios(levels) {
                Ok(s) => s,
                Err(DiagnosticsError::AllDegenerate { count }) => {
                    transmon_diagnostics::RatioSample { merged_levels: count - 1, ..Default::default() }
                }
                Err(e) => return Err(e.into()),
            };
            Some(RatioHistogram::from_sample(&sample, bins))
        } else {
            None
        };
        let ipr_value = if self.wants(Diagnostic::Ipr) { Some(ipr(&spectrum, tag.range.clone())?) } else { None };
        let multiplet = match &self.multiplet {
            Some(indices) => {
                let m = analyze_multiplet(&spectrum, indices)?;
                Some(MultipletRecord {
                    ipr: m.ipr,
                    ratios: m.ratios.as_ref().map(|s| RatioHistogram::from_sample(s, bins)),
                    min_weight: m.weights.iter().copied().fold(1.0, f64::min),
                })
            }
            None => None,
        };
        Ok(SpectralRecord {
            bundle_size: tag.range.len(),
            bundle_overlap: tag.overlap,
            ratios,
            ipr: ipr_value,
            multiplet,
            levels: (self.wants(Diagnostic::Levels) && key.r == 0).then(|| levels.to_vec()),
        })
    }

    fn walsh(&self, key: TaskKey, seed: u64) -> Result<WalshRecord> {
        let w = &self.config.walsh;
        let p = self.config.point(key.i, key.j);
        let (_, solutions) = self.realization(&p, seed, w.levels)?;
        let n = self.lattice.n_sites();
        let system = ComputationalSystem::new(&solutions, &self.lattice, w.levels, w.max_excitation.unwrap_or(n + 2))?;
        let mut couplings: Vec<(usize, f64)> = match self.config.axis(Param::T) {
            Some((_, axis)) => axis.values.iter().copied().enumerate().collect(),
            None => vec![(0, p.t)],
        };
        couplings.sort_by(|a, b| a.1.total_cmp(&b.1));
        let targets: Vec<f64> = couplings.iter().map(|c| c.1).collect();
        let spectra = track_computational_states(&system, &targets, &w.policy)?;
        let mut points: Vec<WalshPoint> = couplings
            .iter()
            .zip(spectra)
            .map(|(&(t_index, t), s)| WalshPoint { t_index, t, min_quality: s.min_quality(), coefficients: s.coefficients })
            .collect();
        points.sort_by_key(|p| p.t_index);
        Ok(WalshRecord { points })
    }
}
