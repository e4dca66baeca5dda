use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde_json::Value;
use transmon_sweep::SweepConfig;

use crate::commands::{analyze, collapse, merge, pattern_study, phase_diagram, single_transmon, spectrum, walsh};
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;
use crate::sweep_args::RunArgs;

#[derive(clap::Args, Clone, Debug)]
pub struct Args {
    /// A `manifest.json` written by an earlier run.
    pub manifest: PathBuf,
    /// Output directory (default: `rerun/` next to the manifest).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub ram_gb: Option<f64>,
    #[arg(long, short)]
    pub quiet: bool,
}

fn decode<T: DeserializeOwned>(value: Value) -> Result<T> {
    serde_json::from_value(value).map_err(|e| CliError::Config(format!("manifest config does not fit the subcommand: {e}")))
}

fn with_out(mut value: Value, out: &Path) -> Value {
    value["out"] = serde_json::json!(out);
    value
}

pub fn run(args: &Args) -> Result<Vec<String>> {
    let manifest = RunManifest::read(&args.manifest)?;
    let out = args.out.clone().unwrap_or_else(|| {
        args.manifest.parent().unwrap_or_else(|| Path::new(".")).join("rerun")
    });
    let run = RunArgs { out: out.clone(), threads: args.threads, ram_gb: args.ram_gb, resume: false, quiet: args.quiet };
    let config = manifest.config;
    match manifest.subcommand.as_str() {
        "phase-diagram" => phase_diagram::execute_config(&sweep(config)?, &run),
        "walsh" => walsh::execute_config(&sweep(config)?, &run),
        "pattern-study" => pattern_study::execute_config(&sweep(config)?, &run),
        "single-transmon" => single_transmon::run(&decode(config)?, Some(&out)),
        "spectrum" => spectrum::run(&decode(config)?, Some(&out)),
        "analyze" => analyze::run(&decode(with_out(config, &out))?),
        "merge" => merge::run(&decode(with_out(config, &out))?),
        "collapse" => collapse::run(&decode(with_out(config, &out))?),
        other => Err(CliError::Config(format!("cannot rerun subcommand `{other}`"))),
    }
}

fn sweep(value: Value) -> Result<SweepConfig> {
    let mut config: SweepConfig = decode(value)?;
    config.resolve()?;
    Ok(config)
}
