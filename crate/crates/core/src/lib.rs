//! Disordered arrays of capacitively coupled transmons.
//!
//! Each site is solved exactly in the charge basis; the array Hamiltonian is
//! then assembled in a truncated product basis of single-site eigenstates
//! and diagonalized densely.

pub mod basis;
pub mod disorder;
pub mod error;
pub mod hamiltonian;
pub mod lattice;
pub mod seed;
pub mod spectrum;
pub mod transmon;
pub mod units;

pub use basis::{binomial, enumerate_basis, BasisSpec, ManyBodyBasis, DEFAULT_BASIS_CAP};
pub use disorder::{frequency_spread, sample_disorder, DisorderModel, DisorderScheme};
pub use error::{ModelError, Result};
pub use hamiltonian::{build_many_body_hamiltonian, hamiltonian_parts, HamiltonianParts};
pub use lattice::{build_lattice, Geometry, GeometryTag, Lattice, Sublattice};
pub use spectrum::{diagonalize, select_bundle, tag_bundles, BundleTag, SpectrumResult};
pub use transmon::{effective_scales, solve_single_transmon, SingleTransmonSolution, TransmonParams};

pub use faer;
