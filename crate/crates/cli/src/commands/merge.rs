use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::commands::collapse::load;
use crate::error::Result;
use crate::manifest::{OutputDir, RunManifest};
use crate::sweep_args::{flags, write_results};

#[derive(clap::Args, Clone, Debug, Serialize, Deserialize)]
pub struct Args {
    /// `results.json` files of runs over disjoint realization ranges.
    #[arg(required = true, num_args = 2..)]
    pub results: Vec<PathBuf>,
    #[arg(long, short)]
    pub out: PathBuf,
}

pub fn run(args: &Args) -> Result<Vec<String>> {
    let merged = load(&args.results)?;
    let mut out = OutputDir::create(&args.out)?;
    write_results(&merged, &mut out)?;
    println!(
        "merged {} files: {} tasks, {}",
        args.results.len(),
        merged.records.len(),
        if merged.is_complete() { "ensemble complete" } else { "ensemble still partial" }
    );
    let mut manifest = RunManifest::new("merge", args, Some(merged.config.master_seed))?;
    manifest.inputs = args.results.clone();
    out.finish(manifest)?;
    Ok(flags(&merged))
}
