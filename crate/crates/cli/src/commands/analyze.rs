use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use transmon_diagnostics::io::read_spectrum;
use transmon_diagnostics::{normalized_kl, spacing_ratios, KlReport, RatioSample, DEFAULT_BINS};

use crate::error::{CliError, Result};
use crate::manifest::{OutputDir, RunManifest};

#[derive(clap::Args, Clone, Debug, Serialize, Deserialize)]
pub struct Args {
    /// Spectrum files (one level per line, `#` metadata), pooled.
    #[arg(required = true)]
    pub spectra: Vec<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    /// Write `analysis.json` and a manifest here.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub files: usize,
    pub ratios: usize,
    pub merged_levels: usize,
    pub mean_ratio: Option<f64>,
    /// Absent when the sample is too small for the binning.
    pub kl: Option<KlReport>,
}

pub fn analyze(paths: &[PathBuf], bins: usize) -> Result<Analysis> {
    let mut pooled = RatioSample::default();
    for p in paths {
        let text = std::fs::read_to_string(p).map_err(CliError::io(format!("reading {}", p.display())))?;
        let (levels, _) = read_spectrum(&text)?;
        pooled.pool(&spacing_ratios(&levels)?);
    }
    let kl = normalized_kl(&pooled.values, bins).ok();
    Ok(Analysis {
        files: paths.len(),
        ratios: pooled.len(),
        merged_levels: pooled.merged_levels,
        mean_ratio: pooled.mean(),
        kl,
    })
}

pub fn run(args: &Args) -> Result<Vec<String>> {
    let a = analyze(&args.spectra, args.bins)?;
    println!("{} files, {} ratios, {} levels merged", a.files, a.ratios, a.merged_levels);
    if let Some(r) = a.mean_ratio {
        println!("mean ratio <R> = {r:.6}");
    }
    match &a.kl {
        Some(k) => println!("normalized KL: vs Poisson {:.4}, vs Wigner-Dyson {:.4}", k.d_vs_poisson_norm, k.d_vs_wigner_dyson_norm),
        None => println!("too few ratios for {} bins; KL not computed", args.bins),
    }
    if let Some(dir) = &args.out {
        let mut out = OutputDir::create(dir)?;
        out.write("analysis.json", serde_json::to_string_pretty(&a)?)?;
        let mut manifest = RunManifest::new("analyze", args, None)?;
        manifest.inputs = args.spectra.clone();
        out.finish(manifest)?;
    }
    Ok(Vec::new())
}
