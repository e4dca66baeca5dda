use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use transmon_core::basis::BasisSpec;
use transmon_core::transmon::solve_single_transmon_with_tolerance;
use transmon_core::{
    build_lattice, build_many_body_hamiltonian, diagonalize, sample_disorder, select_bundle, DisorderModel,
    DisorderScheme, Geometry, ManyBodyBasis, TransmonParams, DEFAULT_BASIS_CAP,
};
use transmon_diagnostics::io::write_spectrum;
use transmon_diagnostics::{ipr, normalized_kl, spacing_ratios, DEFAULT_BINS};

use crate::error::{CliError, Result};
use crate::manifest::{OutputDir, RunManifest};
use crate::sweep_args::{energy, parse_scheme};

fn parse_window(text: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = text.split_once(':').ok_or("expected LO:HI")?;
    Ok((a.trim().parse().map_err(|_| "bad LO")?, b.trim().parse().map_err(|_| "bad HI")?))
}

#[derive(clap::Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Options {
    #[arg(long, default_value = "chain:10")]
    pub geometry: String,
    #[arg(long, value_parser = energy, default_value = "0.25")]
    pub ec: f64,
    /// Mean Josephson energy (unused by pattern disorder).
    #[arg(long, value_parser = energy, default_value = "44")]
    pub ej: f64,
    #[arg(long, value_parser = energy, default_value = "10MHz")]
    pub t: f64,
    #[arg(long, value_parser = parse_scheme, default_value = "a")]
    pub scheme: DisorderScheme,
    /// Disorder seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Excitation bundle to select.
    #[arg(long, default_value_t = 5)]
    pub bundle: usize,
    /// Excitation window LO:HI of the basis (default: the bundle alone).
    #[arg(long, value_parser = parse_window)]
    pub window: Option<(usize, usize)>,
    /// Levels kept per site (default: window top + 3).
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long, default_value_t = 15)]
    pub nmax: usize,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
}

#[derive(clap::Args, Clone, Debug)]
pub struct Args {
    #[command(flatten)]
    pub options: Options,
    /// Write `spectrum.txt` (bundle eigenvalues) and a manifest here.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

pub struct Computed {
    pub e_j: Vec<f64>,
    pub basis_size: usize,
    pub bundle: Vec<f64>,
    pub text: String,
}

pub fn compute(o: &Options) -> Result<Computed> {
    let lattice = build_lattice(&Geometry::parse(&o.geometry)?)?;
    let (lo, hi) = o.window.unwrap_or((o.bundle, o.bundle));
    if lo > o.bundle || o.bundle > hi {
        return Err(CliError::Config(format!("window {lo}:{hi} does not contain bundle {}", o.bundle)));
    }
    let levels = o.levels.unwrap_or(hi + 3);
    let e_j = sample_disorder(&DisorderModel::new(o.scheme.clone(), o.seed), &lattice, o.ec, o.ej)?;
    let solutions = e_j
        .iter()
        .map(|&e| {
            solve_single_transmon_with_tolerance(
                &TransmonParams::new(o.ec, e, o.nmax, levels)?,
                transmon_core::transmon::DEFAULT_CUTOFF_TOLERANCE,
            )
        })
        .collect::<transmon_core::Result<Vec<_>>>()?;
    let mut spec = BasisSpec::window(lattice.n_sites(), levels, lo, hi);
    if hi > lo {
        spec = spec.with_parity(o.bundle % 2);
    }
    let basis = ManyBodyBasis::new(spec, DEFAULT_BASIS_CAP)?;
    let h = build_many_body_hamiltonian(&solutions, &lattice, o.t, &basis)?;
    let spectrum = diagonalize(&h, true)?;
    let tag = select_bundle(&spectrum, o.bundle, &basis)?;
    let bundle = spectrum.eigenvalues[tag.range.clone()].to_vec();

    let mut text = String::new();
    let _ = writeln!(text, "{} sites, basis of {} states, bundle {} with {} levels", lattice.n_sites(), basis.len(), o.bundle, bundle.len());
    let ej_text: Vec<String> = e_j.iter().map(|e| format!("{e:.4}")).collect();
    let _ = writeln!(text, "E_J = [{}] GHz", ej_text.join(", "));
    let _ = writeln!(
        text,
        "bundle spans [{:.6}, {:.6}] GHz; gaps below/above {:?} / {:?} GHz; overlap {}",
        bundle.first().copied().unwrap_or(f64::NAN),
        bundle.last().copied().unwrap_or(f64::NAN),
        tag.gap_below,
        tag.gap_above,
        tag.overlap
    );
    let _ = writeln!(text, "mean IPR in bundle = {:.6}", ipr(&spectrum, tag.range.clone())?);
    match spacing_ratios(&bundle) {
        Ok(s) => {
            let _ = writeln!(text, "mean ratio <R> = {:.6} over {} ratios ({} levels merged)", s.mean().unwrap_or(f64::NAN), s.len(), s.merged_levels);
            match normalized_kl(&s.values, o.bins) {
                Ok(k) => {
                    let _ = writeln!(text, "normalized KL: vs Poisson {:.4}, vs Wigner-Dyson {:.4}", k.d_vs_poisson_norm, k.d_vs_wigner_dyson_norm);
                }
                Err(e) => {
                    let _ = writeln!(text, "normalized KL unavailable: {e}");
                }
            }
        }
        Err(e) => {
            let _ = writeln!(text, "ratio statistics unavailable: {e}");
        }
    }
    Ok(Computed { e_j, basis_size: basis.len(), bundle, text })
}

pub fn run(options: &Options, out: Option<&Path>) -> Result<Vec<String>> {
    let c = compute(options)?;
    print!("{}", c.text);
    if let Some(dir) = out {
        let mut out = OutputDir::create(dir)?;
        let mut meta = BTreeMap::new();
        meta.insert("geometry".to_string(), options.geometry.clone());
        meta.insert("bundle".to_string(), options.bundle.to_string());
        meta.insert("t_ghz".to_string(), options.t.to_string());
        meta.insert("seed".to_string(), options.seed.to_string());
        meta.insert("basis_size".to_string(), c.basis_size.to_string());
        out.write("spectrum.txt", write_spectrum(&c.bundle, &meta))?;
        out.finish(RunManifest::new("spectrum", options, Some(options.seed))?)?;
    }
    Ok(Vec::new())
}
