//! Command-line front end: single-transmon spectra, many-body spectra,
//! parameter sweeps, Walsh analysis, data collapse and pattern studies.

pub mod commands;
pub mod curves;
pub mod error;
pub mod manifest;
pub mod recipes;
pub mod svg;
pub mod sweep_args;
pub mod table;

use clap::{Parser, Subcommand};

use crate::commands::*;
pub use crate::error::{CliError, Result};

#[derive(Parser, Debug)]
#[command(name = "transmon", version, about = "Spectral statistics of disordered transmon arrays")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Levels and charge matrix elements of one transmon.
    SingleTransmon(single_transmon::Args),
    /// One disorder realization: bundle spectrum, IPR and ratio statistics.
    Spectrum(spectrum::Args),
    /// Pooled ratio statistics of spectrum files.
    Analyze(analyze::Args),
    /// KL and IPR over a parameter grid.
    PhaseDiagram(phase_diagram::Args),
    /// Walsh coefficients of tracked computational states versus coupling.
    Walsh(walsh::Args),
    /// Exponent of the collapse T -> T E_J^mu.
    Collapse(collapse::Args),
    /// Patterned array versus disorder strength.
    PatternStudy(pattern_study::Args),
    /// Combine runs over disjoint realization ranges.
    Merge(merge::Args),
    /// List bundled recipes.
    Recipes(list_recipes::Args),
    /// Run again from a manifest.
    Rerun(rerun::Args),
}

/// Runs a command; the returned flags mark a partial result.
pub fn dispatch(command: &Command) -> Result<Vec<String>> {
    match command {
        Command::SingleTransmon(a) => single_transmon::run(&a.options, a.out.as_deref()),
        Command::Spectrum(a) => spectrum::run(&a.options, a.out.as_deref()),
        Command::Analyze(a) => analyze::run(a),
        Command::PhaseDiagram(a) => phase_diagram::run(a),
        Command::Walsh(a) => walsh::run(a),
        Command::Collapse(a) => collapse::run(a),
        Command::PatternStudy(a) => pattern_study::run(a),
        Command::Merge(a) => merge::run(a),
        Command::Recipes(a) => list_recipes::run(a),
        Command::Rerun(a) => rerun::run(a),
    }
}
