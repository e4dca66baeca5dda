use std::fmt::Write as _;

use transmon_sweep::{Diagnostic, Param, PointAggregate, SweepConfig, SweepResult};

use crate::commands::phase_diagram::fmt;
use crate::error::{CliError, Result};
use crate::manifest::{OutputDir, RunManifest};
use crate::recipes;
use crate::svg::{LinePlot, Series};
use crate::sweep_args::{execute, flags, require, RunArgs, SweepArgs};
use crate::table::{cell, opt_cell, Table};

/// Multiplet IPR above which the multiplet stays localized on its permutations.
pub const LOCALIZED_IPR: f64 = 0.9;
/// Multiplet IPR below which the multiplet is mixed.
pub const MIXED_IPR: f64 = 0.5;

#[derive(clap::Args, Clone, Debug)]
pub struct Args {
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Localized,
    Mixed,
    Crossover,
}

pub fn regime(p: &PointAggregate) -> Option<Regime> {
    let ipr = p.multiplet_ipr.as_ref()?.mean;
    Some(if ipr > LOCALIZED_IPR {
        Regime::Localized
    } else if ipr < MIXED_IPR {
        Regime::Mixed
    } else {
        Regime::Crossover
    })
}

/// Points ordered along the disorder-strength axis.
pub fn along_delta(result: &SweepResult) -> Result<Vec<&PointAggregate>> {
    let (axis, a) = result
        .config
        .axis(Param::DeltaEJ)
        .ok_or_else(|| CliError::Config("a pattern study needs a delta_e_j axis".into()))?;
    if result.config.axes.len() != 1 {
        return Err(CliError::Config("a pattern study sweeps delta_e_j alone".into()));
    }
    Ok((0..a.values.len()).filter_map(|i| if axis == 0 { result.point(i, 0) } else { result.point(0, i) }).collect())
}

pub fn table(points: &[&PointAggregate]) -> Table {
    let mut t = Table::new(
        "pattern-study-v1",
        &[
            "delta_e_j",
            "ipr",
            "ipr_stderr",
            "multiplet_ipr",
            "multiplet_ipr_stderr",
            "kl_poisson",
            "kl_wigner_dyson",
            "merged_levels",
            "multiplet_kl_poisson",
            "multiplet_kl_wigner_dyson",
            "multiplet_merged_levels",
        ],
    );
    for p in points {
        let (kl, mkl) = (p.kl.as_ref(), p.multiplet_kl.as_ref());
        t.push(vec![
            opt_cell(p.params.delta_e_j),
            opt_cell(p.ipr.as_ref().map(|e| e.mean)),
            opt_cell(p.ipr.as_ref().and_then(|e| e.stderr)),
            opt_cell(p.multiplet_ipr.as_ref().map(|e| e.mean)),
            opt_cell(p.multiplet_ipr.as_ref().and_then(|e| e.stderr)),
            opt_cell(kl.and_then(|k| k.d_vs_poisson_norm)),
            opt_cell(kl.and_then(|k| k.d_vs_wigner_dyson_norm)),
            kl.map_or(String::new(), |k| k.merged_levels.to_string()),
            opt_cell(mkl.and_then(|k| k.d_vs_poisson_norm)),
            opt_cell(mkl.and_then(|k| k.d_vs_wigner_dyson_norm)),
            mkl.map_or(String::new(), |k| k.merged_levels.to_string()),
        ]);
    }
    t
}

fn levels_table(points: &[&PointAggregate]) -> Table {
    let mut t = Table::new("pattern-levels-v1", &["delta_e_j", "index", "energy"]);
    for p in points {
        for (k, e) in p.levels.iter().flatten().enumerate() {
            t.push(vec![opt_cell(p.params.delta_e_j), k.to_string(), cell(*e)]);
        }
    }
    t
}

fn series(points: &[&PointAggregate], label: &str, f: impl Fn(&PointAggregate) -> Option<(f64, Option<f64>)>) -> Series {
    let mut s = Series { label: Some(label.into()), ..Default::default() };
    let mut err = Vec::new();
    for p in points {
        let (Some(d), Some((v, e))) = (p.params.delta_e_j, f(p)) else { continue };
        if d > 0.0 {
            s.x.push(d);
            s.y.push(v);
            err.push(e.unwrap_or(0.0));
        }
    }
    s.y_err = Some(err);
    s
}

fn plots(points: &[&PointAggregate], out: &mut OutputDir) -> Result<()> {
    let ipr = [
        series(points, "bundle IPR", |p| p.ipr.as_ref().map(|e| (e.mean, e.stderr))),
        series(points, "multiplet IPR", |p| p.multiplet_ipr.as_ref().map(|e| (e.mean, e.stderr))),
    ];
    let plot = LinePlot {
        title: "Participation ratios",
        x_label: "dE_J (GHz)",
        y_label: "IPR",
        log_x: true,
        log_y: false,
        series: &ipr,
        threshold: Some((MIXED_IPR, "0.5")),
    };
    out.write("ipr.svg", plot.render())?;
    let kl = [
        series(points, "vs Poisson", |p| p.multiplet_kl.as_ref()?.d_vs_poisson_norm.map(|v| (v, None))),
        series(points, "vs Wigner-Dyson", |p| p.multiplet_kl.as_ref()?.d_vs_wigner_dyson_norm.map(|v| (v, None))),
    ];
    let plot = LinePlot {
        title: "Multiplet level statistics",
        x_label: "dE_J (GHz)",
        y_label: "normalized KL",
        log_x: true,
        log_y: false,
        series: &kl,
        threshold: None,
    };
    out.write("multiplet_kl.svg", plot.render())?;
    let n_levels = points.iter().filter_map(|p| p.levels.as_ref().map(Vec::len)).max().unwrap_or(0);
    let levels: Vec<Series> = (0..n_levels)
        .map(|k| {
            let mut s = series(points, "", |p| p.levels.as_ref()?.get(k).map(|&e| (e, None)));
            s.label = None;
            s.y_err = None;
            s
        })
        .collect();
    let plot = LinePlot {
        title: "Bundle levels, first realization",
        x_label: "dE_J (GHz)",
        y_label: "energy (GHz)",
        log_x: true,
        log_y: false,
        series: &levels,
        threshold: None,
    };
    out.write("levels.svg", plot.render())?;
    Ok(())
}

pub fn report(points: &[&PointAggregate]) -> String {
    let mut text = String::new();
    for p in points {
        let name = match regime(p) {
            Some(Regime::Localized) => "localized multiplet",
            Some(Regime::Mixed) => "mixed multiplet",
            Some(Regime::Crossover) => "crossover",
            None => "-",
        };
        let _ = writeln!(
            text,
            "dE_J = {:<9} IPR = {:<8} multiplet IPR = {:<8} multiplet KL_WD = {:<8} {name}",
            fmt(p.params.delta_e_j),
            fmt(p.ipr.as_ref().map(|e| e.mean)),
            fmt(p.multiplet_ipr.as_ref().map(|e| e.mean)),
            fmt(p.multiplet_kl.as_ref().and_then(|k| k.d_vs_wigner_dyson_norm)),
        );
    }
    let best = points
        .iter()
        .filter_map(|p| Some((p.params.delta_e_j?, p.multiplet_kl.as_ref()?.d_vs_wigner_dyson_norm?)))
        .min_by(|a, b| a.1.total_cmp(&b.1));
    if let Some((d, v)) = best {
        let _ = writeln!(text, "closest to Wigner-Dyson: multiplet KL = {v:.4} at dE_J = {d}");
    }
    if let Some(p) = points.iter().find(|p| p.params.delta_e_j == Some(0.0)) {
        let _ = writeln!(
            text,
            "degenerate levels merged at dE_J = 0: {} in the bundle, {} in the multiplet",
            p.kl.as_ref().map_or(0, |k| k.merged_levels),
            p.multiplet_kl.as_ref().map_or(0, |k| k.merged_levels)
        );
    }
    text
}

pub fn execute_config(config: &SweepConfig, run: &RunArgs) -> Result<Vec<String>> {
    let mut config = config.clone();
    require(&mut config, &[Diagnostic::Ipr, Diagnostic::Kl, Diagnostic::Levels, Diagnostic::Multiplet])?;
    if config.axis(Param::DeltaEJ).is_none() || config.axes.len() != 1 {
        return Err(CliError::Config("a pattern study sweeps delta_e_j alone".into()));
    }
    let mut out = OutputDir::create(&run.out)?;
    let result = execute(&config, run, &mut out)?;
    let points = along_delta(&result)?;
    out.write("pattern.csv", table(&points).to_csv())?;
    out.write("levels.csv", levels_table(&points).to_csv())?;
    plots(&points, &mut out)?;
    if !run.quiet {
        print!("{}", report(&points));
    }
    out.finish(RunManifest::new("pattern-study", &config, Some(config.master_seed))?)?;
    Ok(flags(&result))
}

pub fn run(args: &Args) -> Result<Vec<String>> {
    let config = args.sweep.resolve(Some(recipes::find("pattern-3x3")?.config))?;
    execute_config(&config, &args.run)
}
