//! Shared flags of the sweep-backed subcommands and their resolution into a
//! [`SweepConfig`]: file or recipe first, then flag overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use serde_json::{json, Value};
use transmon_core::units::parse_energy;
use transmon_core::{DisorderScheme, Sublattice};
use transmon_sweep::export::{to_csv, write_json};
use transmon_sweep::{resume_sweep, run_sweep, Diagnostic, Param, RunOptions, SweepConfig, SweepResult};

use crate::error::{CliError, Result};
use crate::manifest::OutputDir;
use crate::recipes;

pub fn energy(text: &str) -> std::result::Result<f64, String> {
    parse_energy(text).map_err(|e| e.to_string())
}

/// `a`, `b`, `fixed:<dE_J>` or `pattern:<dE_J>:A=<E_J>,B=<E_J>[,C=<E_J>]`.
pub fn parse_scheme(text: &str) -> std::result::Result<DisorderScheme, String> {
    let t = text.trim();
    match t.to_ascii_lowercase().as_str() {
        "a" => return Ok(DisorderScheme::A),
        "b" => return Ok(DisorderScheme::B),
        _ => {}
    }
    if let Some(rest) = t.strip_prefix("fixed:") {
        return Ok(DisorderScheme::FixedSigma { delta_e_j: energy(rest)? });
    }
    if let Some(rest) = t.strip_prefix("pattern:") {
        let (delta, means) = rest.split_once(':').ok_or("pattern needs `pattern:<dE_J>:A=..,B=..`")?;
        let mut map = BTreeMap::new();
        for part in means.split(',') {
            let (label, value) = part.split_once('=').ok_or_else(|| format!("bad sublattice mean `{part}`"))?;
            let mut chars = label.trim().chars();
            let s = match (chars.next().and_then(Sublattice::from_char), chars.next()) {
                (Some(s), None) => s,
                _ => return Err(format!("unknown sublattice `{label}`")),
            };
            map.insert(s, energy(value)?);
        }
        return Ok(DisorderScheme::Pattern { means: map, delta_e_j: energy(delta)? });
    }
    Err(format!("unknown disorder scheme `{text}` (use a, b, fixed:<dE_J> or pattern:<dE_J>:A=..,B=..)"))
}

fn parse_range(text: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = text.split_once("..").ok_or("expected START..END")?;
    let a = a.trim().parse().map_err(|_| format!("bad range start `{a}`"))?;
    let b = b.trim().parse().map_err(|_| format!("bad range end `{b}`"))?;
    Ok((a, b))
}

#[derive(Args, Clone, Debug, Default)]
pub struct SweepArgs {
    /// Sweep config, recipe file or run manifest (JSON).
    #[arg(long, conflicts_with = "recipe")]
    pub config: Option<PathBuf>,
    /// Bundled recipe; `transmon recipes` lists them.
    #[arg(long)]
    pub recipe: Option<String>,
    /// Lattice, e.g. chain:10, surface7, grid3x3:ab.
    #[arg(long)]
    pub geometry: Option<String>,
    /// Charging energy (GHz unless suffixed).
    #[arg(long, value_parser = energy)]
    pub ec: Option<f64>,
    /// Mean Josephson energy.
    #[arg(long, value_parser = energy)]
    pub ej: Option<f64>,
    /// Coupling, e.g. 3MHz.
    #[arg(long, value_parser = energy)]
    pub t: Option<f64>,
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: Option<DisorderScheme>,
    /// Excitation bundle analysed.
    #[arg(long)]
    pub bundle: Option<usize>,
    /// Coupling axis values, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = energy)]
    pub t_values: Vec<f64>,
    /// Josephson-energy axis values, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = energy)]
    pub ej_values: Vec<f64>,
    /// Disorder-strength axis values, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = energy)]
    pub delta_values: Vec<f64>,
    /// Diagnostics to compute, comma separated (kl, ipr, levels, multiplet, walsh).
    #[arg(long, value_delimiter = ',')]
    pub diagnostics: Vec<String>,
    #[arg(long)]
    pub realizations: Option<usize>,
    /// Only run realizations START..END (merge partial runs with `transmon merge`).
    #[arg(long, value_parser = parse_range)]
    pub range: Option<(usize, usize)>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Clone, Debug)]
pub struct RunArgs {
    /// Output directory.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Worker threads (default: TRANSMON_THREADS or all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// RAM cap in GB (default: TRANSMON_RAM_GB or physical memory).
    #[arg(long)]
    pub ram_gb: Option<f64>,
    /// Continue from `<out>/checkpoint.jsonl` instead of starting over.
    #[arg(long)]
    pub resume: bool,
    #[arg(long, short)]
    pub quiet: bool,
}

/// Reads a config document; recipes and manifests are unwrapped to their config.
pub fn load_document(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(format!("reading {}", path.display())))?;
    let value: Value = serde_json::from_str(&text)?;
    Ok(unwrap_document(value))
}

pub fn unwrap_document(value: Value) -> Value {
    let wrapped = value.get("config").is_some() && (value.get("subcommand").is_some() || value.get("command").is_some());
    if wrapped {
        value["config"].clone()
    } else {
        value
    }
}

fn set_axis(doc: &mut Value, name: Param, values: &[f64]) {
    if values.is_empty() {
        return;
    }
    let axes = doc["axes"].as_array_mut().expect("axes array");
    let key = name.name();
    match axes.iter_mut().find(|a| a["name"] == key) {
        Some(axis) => *axis = json!({"name": key, "values": values}),
        None => axes.push(json!({"name": key, "values": values})),
    }
}

impl SweepArgs {
    /// File, recipe or `default`, with every flag applied on top.
    pub fn resolve(&self, default: Option<Value>) -> Result<SweepConfig> {
        let mut doc = match (&self.config, &self.recipe) {
            (Some(path), _) => load_document(path)?,
            (None, Some(name)) => recipes::find(name)?.config.clone(),
            (None, None) => default.unwrap_or_else(|| {
                json!({"system": {"geometry": "chain:5", "e_c": 0.25, "scheme": "a", "bundle": 2},
                       "axes": [], "realizations": 1, "diagnostics": [], "master_seed": 0})
            }),
        };
        if !doc.is_object() {
            return Err(CliError::Config("config must be a JSON object".into()));
        }
        if doc.get("axes").is_none() {
            doc["axes"] = json!([]);
        }
        let sys = &mut doc["system"];
        if !sys.is_object() {
            *sys = json!({});
        }
        if let Some(g) = &self.geometry {
            sys["geometry"] = json!(g);
        }
        if let Some(v) = self.ec {
            sys["e_c"] = json!(v);
        }
        if let Some(v) = self.ej {
            sys["e_j"] = json!(v);
        }
        if let Some(v) = self.t {
            sys["t"] = json!(v);
        }
        if let Some(s) = &self.scheme {
            sys["scheme"] = serde_json::to_value(s)?;
        }
        if let Some(k) = self.bundle {
            sys["bundle"] = json!(k);
            if let Some(obj) = sys.as_object_mut() {
                obj.remove("window");
            }
        }
        set_axis(&mut doc, Param::T, &self.t_values);
        set_axis(&mut doc, Param::EJ, &self.ej_values);
        set_axis(&mut doc, Param::DeltaEJ, &self.delta_values);
        if !self.diagnostics.is_empty() {
            doc["diagnostics"] = json!(self.diagnostics);
        }
        if let Some(n) = self.realizations {
            doc["realizations"] = json!(n);
        }
        if let Some(s) = self.seed {
            doc["master_seed"] = json!(s);
        }
        if let Some((a, b)) = self.range {
            doc["realization_range"] = json!([a, b]);
        }
        let mut config: SweepConfig =
            serde_json::from_value(doc).map_err(|e| CliError::Config(format!("invalid sweep config: {e}")))?;
        if config.diagnostics.is_empty() {
            config.diagnostics = vec![Diagnostic::Kl];
        }
        config.resolve()?;
        Ok(config)
    }
}

/// Adds `required` diagnostics to the config and re-validates it.
pub fn require(config: &mut SweepConfig, required: &[Diagnostic]) -> Result<()> {
    for d in required {
        if !config.diagnostics.contains(d) {
            config.diagnostics.push(*d);
        }
    }
    config.diagnostics.sort();
    config.validate()?;
    Ok(())
}

pub fn run_options(run: &RunArgs, out: &OutputDir) -> RunOptions {
    RunOptions { threads: run.threads, ram_gb: run.ram_gb, checkpoint: Some(out.path("checkpoint.jsonl")), progress: !run.quiet }
}

/// Runs (or resumes) the sweep and writes `results.json` and `points.csv`.
pub fn execute(config: &SweepConfig, run: &RunArgs, out: &mut OutputDir) -> Result<SweepResult> {
    let options = run_options(run, out);
    let checkpoint = out.path("checkpoint.jsonl");
    let result = if run.resume && checkpoint.exists() {
        resume_sweep(&checkpoint, Some(config), &options)?
    } else {
        if run.resume && !run.quiet {
            eprintln!("no checkpoint at {}, starting a fresh sweep", checkpoint.display());
        }
        run_sweep(config, &options)?
    };
    out.record(checkpoint);
    write_results(&result, out)?;
    Ok(result)
}

pub fn write_results(result: &SweepResult, out: &mut OutputDir) -> Result<()> {
    let json_path = out.path("results.json");
    write_json(result, &json_path)?;
    out.record(json_path);
    out.write("points.csv", to_csv(result))?;
    Ok(())
}

/// Conditions that make a finished sweep a partial result.
pub fn flags(result: &SweepResult) -> Vec<String> {
    let mut flags = Vec::new();
    let failed = result.failed_tasks();
    if failed > 0 {
        flags.push(format!("{failed} of {} tasks failed", result.records.len()));
    }
    let overlap: usize = result.points.iter().map(|p| p.bundle_overlap).sum();
    if overlap > 0 {
        flags.push(format!("{overlap} realizations had overlapping bundles"));
    }
    let excluded: usize = result.points.iter().filter_map(|p| p.walsh.as_ref()).map(|w| w.excluded).sum();
    if excluded > 0 {
        flags.push(format!("{excluded} Walsh averages excluded an ambiguously tracked realization"));
    }
    if !result.is_complete() {
        flags.push("only part of the ensemble was run".into());
    }
    flags
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schemes() {
        assert_eq!(parse_scheme("A").unwrap(), DisorderScheme::A);
        assert_eq!(parse_scheme("fixed:7.5").unwrap(), DisorderScheme::FixedSigma { delta_e_j: 7.5 });
        match parse_scheme("pattern:10MHz:A=12.58,B=13.8").unwrap() {
            DisorderScheme::Pattern { means, delta_e_j } => {
                assert!((delta_e_j - 0.01).abs() < 1e-15);
                assert_eq!(means[&Sublattice::B], 13.8);
            }
            s => panic!("{s:?}"),
        }
        assert!(parse_scheme("pattern:1:Q=1").is_err());
        assert!(parse_scheme("c").is_err());
    }

    #[test]
    fn flags_override_the_file() {
        let args = SweepArgs {
            geometry: Some("chain:4".into()),
            t_values: vec![0.001, 0.002],
            ej: Some(20.0),
            realizations: Some(3),
            range: Some((1, 3)),
            ..Default::default()
        };
        let c = args.resolve(None).unwrap();
        assert_eq!(c.system.geometry, "chain:4");
        assert_eq!(c.axes[0].values, vec![0.001, 0.002]);
        assert_eq!(c.realization_range, Some((1, 3)));
        assert_eq!(c.diagnostics, vec![Diagnostic::Kl]);
        let bad = SweepArgs { range: Some((2, 9)), ..args };
        assert!(matches!(bad.resolve(None), Err(CliError::Config(_))));
    }

    #[test]
    fn documents_unwrap() {
        let inner = json!({"a": 1});
        assert_eq!(unwrap_document(json!({"subcommand": "walsh", "config": inner.clone()})), inner);
        assert_eq!(unwrap_document(json!({"command": "walsh", "config": inner.clone()})), inner);
        assert_eq!(unwrap_document(inner.clone()), inner);
    }
}
