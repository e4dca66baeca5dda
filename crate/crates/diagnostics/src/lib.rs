//! Diagnostics for transmon-array spectra: folded spacing ratios and their
//! KL distance to Poisson and GOE references, inverse participation ratios,
//! diabatic tracking of computational states with Walsh analysis, data
//! collapse fits and permutation multiplets.

pub mod collapse;
pub mod error;
pub mod io;
pub mod ipr;
pub mod kl;
pub mod multiplet;
pub mod ratios;
pub mod reference;
pub mod tracking;
pub mod walsh;

pub use collapse::{fit_collapse_exponent, CollapseFit, CollapseOptions, Trace};
pub use error::{DiagnosticsError, Result};
pub use ipr::{ipr, state_ipr};
pub use kl::{kl_divergence, normalized_kl, KlReport, DEFAULT_BINS};
pub use multiplet::{analyze_multiplet, select_permutation_multiplet, MultipletAnalysis};
pub use ratios::{spacing_ratios, RatioSample};
pub use reference::{reference_distribution, Ensemble};
pub use tracking::{track_computational_states, track_levels, ComputationalSystem, StepPolicy};
pub use walsh::{group_walsh, inverse_walsh_transform, walsh_transform, WalshGroups, WalshSpectrum};
