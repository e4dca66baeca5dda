use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use transmon_core::units::MHZ;
use transmon_diagnostics::collapse::collapse_residual;
use transmon_diagnostics::{fit_collapse_exponent, CollapseFit, CollapseOptions, Trace};
use transmon_sweep::export::read_json;
use transmon_sweep::{merge_results, Param, SweepResult};

use crate::curves::{point_at, Observable};
use crate::error::{CliError, Result};
use crate::manifest::{OutputDir, RunManifest};
use crate::svg::{LinePlot, Series};

#[derive(clap::Args, Clone, Debug, Serialize, Deserialize)]
pub struct Args {
    /// `results.json` files of a sweep over E_J and T; partial runs are merged.
    #[arg(required = true)]
    pub results: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "kl-poisson")]
    pub observable: Observable,
    #[arg(long, default_value_t = 0.3)]
    pub mu_min: f64,
    #[arg(long, default_value_t = 0.8)]
    pub mu_max: f64,
    #[arg(long, default_value_t = 0.005)]
    pub mu_step: f64,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CollapseReport {
    pub observable: Observable,
    pub config_hash: String,
    pub fit: CollapseFit,
    pub traces: Vec<Trace>,
}

pub fn load(paths: &[PathBuf]) -> Result<SweepResult> {
    let mut merged: Option<SweepResult> = None;
    for p in paths {
        let r = read_json(p)?;
        merged = Some(match merged {
            Some(m) => merge_results(&m, &r)?,
            None => r,
        });
    }
    merged.ok_or_else(|| CliError::Config("no results given".into()))
}

/// One trace per E_J value: the observable against every positive coupling
/// where it is defined.
pub fn traces(result: &SweepResult, observable: Observable) -> Result<Vec<Trace>> {
    let config = &result.config;
    let missing = |p: Param| CliError::Config(format!("the sweep has no {} axis", p.name()));
    let (t_axis, ts) = config.axis(Param::T).ok_or_else(|| missing(Param::T))?;
    let (_, ejs) = config.axis(Param::EJ).ok_or_else(|| missing(Param::EJ))?;
    let mut out = Vec::new();
    for (k, &e_j) in ejs.values.iter().enumerate() {
        let mut trace = Trace { e_j, t: Vec::new(), values: Vec::new() };
        for (i, &t) in ts.values.iter().enumerate() {
            if t <= 0.0 {
                continue;
            }
            if let Some(v) = point_at(result, t_axis, i, k).and_then(|p| observable.of(p)) {
                trace.t.push(t);
                trace.values.push(v);
            }
        }
        out.push(trace);
    }
    Ok(out)
}

pub fn fit(traces: &[Trace], options: &CollapseOptions) -> Result<CollapseFit> {
    Ok(fit_collapse_exponent(traces, options)?)
}

fn residual_plot(fit: &CollapseFit) -> String {
    let (x, y): (Vec<f64>, Vec<f64>) =
        fit.scan.iter().zip(&fit.residuals).filter_map(|(mu, r)| r.map(|r| (*mu, r))).unzip();
    let series = [Series { label: Some("residual".into()), x, y, y_err: None }];
    LinePlot {
        title: "Collapse residual",
        x_label: "mu",
        y_label: "mean variance",
        log_x: false,
        log_y: false,
        series: &series,
        threshold: None,
    }
    .render()
}

fn collapsed_plot(traces: &[Trace], mu: f64, observable: Observable) -> String {
    let series: Vec<Series> = traces
        .iter()
        .map(|tr| Series {
            label: Some(format!("E_J = {}", tr.e_j)),
            x: tr.t.iter().map(|t| t / MHZ * tr.e_j.powf(mu)).collect(),
            y: tr.values.clone(),
            y_err: None,
        })
        .collect();
    let x_label = format!("T E_J^{mu:.3} (MHz GHz^mu)");
    LinePlot {
        title: "Rescaled traces",
        x_label: &x_label,
        y_label: observable.label(),
        log_x: true,
        log_y: false,
        series: &series,
        threshold: Some((0.5, "0.5")),
    }
    .render()
}

pub fn run(args: &Args) -> Result<Vec<String>> {
    let result = load(&args.results)?;
    let traces = traces(&result, args.observable)?;
    let options =
        CollapseOptions { mu_min: args.mu_min, mu_max: args.mu_max, mu_step: args.mu_step, ..CollapseOptions::default() };
    let fit = fit(&traces, &options)?;
    let mut out = OutputDir::create(&args.out)?;
    println!("best mu = {:.3} (residual {:.3e}) for {}", fit.mu, fit.residual, args.observable.label());
    if let Some(r0) = collapse_residual(&traces, 0.0, options.grid_points) {
        println!("residual without rescaling = {r0:.3e}");
    }
    let mut flags = Vec::new();
    if fit.degenerate {
        flags.push("the residual does not depend on mu; the fit is uninformative".into());
    }
    if !result.is_complete() {
        flags.push("only part of the ensemble was run".into());
    }
    out.write("residuals.svg", residual_plot(&fit))?;
    out.write("collapsed.svg", collapsed_plot(&traces, fit.mu, args.observable))?;
    let report = CollapseReport { observable: args.observable, config_hash: result.config_hash.clone(), fit, traces };
    out.write("collapse.json", serde_json::to_string_pretty(&report)?)?;
    let mut manifest = RunManifest::new("collapse", args, Some(result.config.master_seed))?;
    manifest.inputs = args.results.clone();
    out.finish(manifest)?;
    Ok(flags)
}
