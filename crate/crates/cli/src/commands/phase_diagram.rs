use std::fmt::Write as _;

use transmon_core::units::MHZ;
use transmon_sweep::{Diagnostic, Param, SweepConfig, SweepResult};

use crate::curves::{curves_cross, cuts, point_at, Observable};
use crate::error::Result;
use crate::manifest::{OutputDir, RunManifest};
use crate::svg::{Heatmap, LinePlot, Series};
use crate::sweep_args::{execute, flags, require, RunArgs, SweepArgs};
use crate::table::{opt_cell, Table};

#[derive(clap::Args, Clone, Debug)]
pub struct Args {
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

fn display(p: Param, v: f64) -> f64 {
    if p == Param::T {
        v / MHZ
    } else {
        v
    }
}

fn axis_label(p: Param) -> &'static str {
    match p {
        Param::T => "T (MHz)",
        Param::EJ => "E_J (GHz)",
        Param::DeltaEJ => "dE_J (GHz)",
    }
}

pub fn table(result: &SweepResult) -> Table {
    let mut t = Table::new(
        "phase-diagram-v1",
        &["e_j", "t", "delta_e_j", "kl_poisson", "kl_wigner_dyson", "mean_ratio", "ipr", "ipr_stderr", "tasks", "failed"],
    );
    for p in &result.points {
        let kl = p.kl.as_ref();
        t.push(vec![
            opt_cell(Some(p.params.e_j)),
            opt_cell(Some(p.params.t)),
            opt_cell(p.params.delta_e_j),
            opt_cell(kl.and_then(|k| k.d_vs_poisson_norm)),
            opt_cell(kl.and_then(|k| k.d_vs_wigner_dyson_norm)),
            opt_cell(kl.and_then(|k| k.mean_ratio)),
            opt_cell(p.ipr.as_ref().map(|e| e.mean)),
            opt_cell(p.ipr.as_ref().and_then(|e| e.stderr)),
            p.tasks.to_string(),
            p.failed.to_string(),
        ]);
    }
    t
}

fn observables(config: &SweepConfig) -> Vec<(Observable, &'static str)> {
    let mut v = Vec::new();
    if config.diagnostics.contains(&Diagnostic::Kl) {
        v.push((Observable::KlPoisson, "kl_poisson"));
        v.push((Observable::KlWignerDyson, "kl_wigner_dyson"));
    }
    if config.diagnostics.contains(&Diagnostic::Ipr) {
        v.push((Observable::Ipr, "ipr"));
    }
    v
}

/// Heatmaps for two-axis sweeps, line plots otherwise; returns a summary.
pub fn plots(result: &SweepResult, out: &mut OutputDir) -> Result<String> {
    let config = &result.config;
    let mut summary = String::new();
    let obs = observables(config);
    if config.axes.len() == 2 {
        let x_axis = config.axis(Param::T).map_or(1, |(k, _)| k);
        let y_axis = 1 - x_axis;
        let (xa, ya) = (&config.axes[x_axis], &config.axes[y_axis]);
        let x_ticks: Vec<f64> = xa.values.iter().map(|&v| display(xa.name, v)).collect();
        let y_ticks: Vec<f64> = ya.values.iter().map(|&v| display(ya.name, v)).collect();
        for (o, name) in obs {
            let values: Vec<Vec<Option<f64>>> = (0..ya.values.len())
                .map(|iy| (0..xa.values.len()).map(|ix| point_at(result, x_axis, ix, iy).and_then(|p| o.of(p))).collect())
                .collect();
            let svg = Heatmap {
                title: o.label(),
                x_label: axis_label(xa.name),
                y_label: axis_label(ya.name),
                x_ticks: &x_ticks,
                y_ticks: &y_ticks,
                values: &values,
                range: (0.0, 1.0),
                contour: Some(0.5),
            }
            .render();
            out.write(&format!("{name}.svg"), svg)?;
        }
        return Ok(summary);
    }
    let cut = cuts(result, config.axes[0].name)?;
    let name = config.axes[0].name;
    let x: Vec<f64> = cut.x.iter().map(|&v| display(name, v)).collect();
    let mut series = Vec::new();
    let mut curves = Vec::new();
    for (o, _) in &obs {
        let y: Vec<Option<f64>> = (0..x.len()).map(|i| result.point(i, 0).and_then(|p| o.of(p))).collect();
        series.push(Series {
            label: Some(o.label().to_string()),
            x: x.iter().zip(&y).filter(|(_, y)| y.is_some()).map(|(x, _)| *x).collect(),
            y: y.iter().flatten().copied().collect(),
            y_err: None,
        });
        curves.push(y);
    }
    if curves.len() >= 2 {
        match curves_cross(&x, &curves[0], &curves[1]) {
            Some(c) => {
                let _ = writeln!(summary, "KL curves cross at {} = {c:.4}", axis_label(name));
            }
            None => {
                let _ = writeln!(summary, "KL curves do not cross on this grid");
            }
        }
    }
    let svg = LinePlot {
        title: "Ensemble-averaged statistics",
        x_label: axis_label(name),
        y_label: "normalized value",
        log_x: x.iter().all(|&v| v > 0.0),
        log_y: false,
        series: &series,
        threshold: Some((0.5, "0.5")),
    }
    .render();
    out.write("curves.svg", svg)?;
    Ok(summary)
}

pub fn execute_config(config: &SweepConfig, run: &RunArgs) -> Result<Vec<String>> {
    let mut config = config.clone();
    require(&mut config, &[Diagnostic::Kl])?;
    let mut out = OutputDir::create(&run.out)?;
    let result = execute(&config, run, &mut out)?;
    out.write("phase.csv", table(&result).to_csv())?;
    let summary = plots(&result, &mut out)?;
    if !run.quiet {
        for p in &result.points {
            let kl = p.kl.as_ref();
            println!(
                "E_J={:<8.4} T={:<9.3}MHz  KL_P={:<8} KL_WD={:<8} IPR={:<8}  ({} tasks)",
                p.params.e_j,
                p.params.t / MHZ,
                fmt(kl.and_then(|k| k.d_vs_poisson_norm)),
                fmt(kl.and_then(|k| k.d_vs_wigner_dyson_norm)),
                fmt(p.ipr.as_ref().map(|e| e.mean)),
                p.tasks
            );
        }
        print!("{summary}");
    }
    out.finish(RunManifest::new("phase-diagram", &config, Some(config.master_seed))?)?;
    Ok(flags(&result))
}

pub fn fmt(v: Option<f64>) -> String {
    v.map_or("-".into(), |v| format!("{v:.4}"))
}

pub fn run(args: &Args) -> Result<Vec<String>> {
    let config = args.sweep.resolve(None)?;
    execute_config(&config, &args.run)
}
