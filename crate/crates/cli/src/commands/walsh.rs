use std::fmt::Write as _;

use transmon_core::units::MHZ;
use transmon_diagnostics::walsh::bitstring;
use transmon_sweep::{Diagnostic, Outcome, Param, SweepConfig, SweepResult, TaskKind};

use crate::curves::{crossing, point_at};
use crate::error::{CliError, Result};
use crate::manifest::{OutputDir, RunManifest};
use crate::recipes;
use crate::svg::{LinePlot, Series};
use crate::sweep_args::{execute, flags, require, RunArgs, SweepArgs};
use crate::table::{cell, opt_cell, Table};

/// Nearest-neighbour coefficient level the crossing is reported against (100 kHz).
pub const THRESHOLD: f64 = 1e-4;

#[derive(clap::Args, Clone, Debug)]
pub struct Args {
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

/// Grouped coefficient magnitudes at every grid point.
pub fn table(result: &SweepResult) -> Table {
    let mut t = Table::new("walsh-groups-v1", &["e_j", "t", "group", "mean_abs", "stderr", "count", "excluded"]);
    for p in &result.points {
        let Some(w) = &p.walsh else { continue };
        let groups = w
            .by_distance
            .iter()
            .map(|(d, e)| (format!("distance_{d}"), e))
            .chain(w.single.iter().enumerate().map(|(s, e)| (format!("site_{s}"), e)));
        for (name, e) in groups {
            t.push(vec![
                cell(p.params.e_j),
                cell(p.params.t),
                name,
                cell(e.mean),
                opt_cell(e.stderr),
                e.count.to_string(),
                w.excluded.to_string(),
            ]);
        }
    }
    t
}

/// Every coefficient of realization `r` (first grid line) along the coupling axis.
pub fn coefficients(result: &SweepResult, r: usize) -> Table {
    let n = result.config.system.lattice().map(|l| l.n_sites()).unwrap_or(0);
    let mut t = Table::new("walsh-coefficients-v1", &["t", "label", "bits", "coefficient", "min_quality"]);
    let rec = result.records.iter().find(|rec| rec.key.kind == TaskKind::Walsh && rec.key.r == r);
    if let Some(Outcome::Walsh(w)) = rec.map(|rec| &rec.outcome) {
        for pt in &w.points {
            for (label, c) in pt.coefficients.iter().enumerate() {
                t.push(vec![cell(pt.t), label.to_string(), bitstring(label, n), cell(*c), cell(pt.min_quality)]);
            }
        }
    }
    t
}

/// Coupling axis index and the lines along it.
fn lines(config: &SweepConfig) -> Result<(usize, usize)> {
    let (axis, _) = config.axis(Param::T).ok_or_else(|| CliError::Config("a Walsh sweep needs a coupling (t) axis".into()))?;
    let others = if config.axes.len() == 2 { config.axes[1 - axis].values.len() } else { 1 };
    Ok((axis, others))
}

/// `(x in MHz, nearest-neighbour mean)` along line `k`.
pub fn nearest_neighbour_curve(result: &SweepResult, k: usize) -> Result<(Vec<f64>, Vec<Option<f64>>)> {
    let (axis, _) = lines(&result.config)?;
    let values = &result.config.axes[axis].values;
    let x = values.iter().map(|t| t / MHZ).collect();
    let y = (0..values.len())
        .map(|i| point_at(result, axis, i, k).and_then(|p| p.walsh.as_ref()?.nearest_neighbour().map(|e| e.mean)))
        .collect();
    Ok((x, y))
}

/// Coupling (MHz) where the nearest-neighbour average first reaches [`THRESHOLD`].
pub fn threshold_crossing(result: &SweepResult, k: usize) -> Result<Option<f64>> {
    let (x, y) = nearest_neighbour_curve(result, k)?;
    Ok(crossing(&x, &y, THRESHOLD, true))
}

pub fn plot(result: &SweepResult) -> Result<String> {
    let config = &result.config;
    let (axis, others) = lines(config)?;
    let values = &config.axes[axis].values;
    let mut series = Vec::new();
    for k in 0..others {
        let suffix = if others > 1 {
            let other = &config.axes[1 - axis];
            format!(" ({} = {})", other.name.name(), other.values[k])
        } else {
            String::new()
        };
        let mut distances = std::collections::BTreeSet::new();
        for i in 0..values.len() {
            if let Some(w) = point_at(result, axis, i, k).and_then(|p| p.walsh.as_ref()) {
                distances.extend(w.by_distance.keys().copied());
            }
        }
        if others > 1 {
            distances.retain(|&d| d == 1);
        }
        for d in distances {
            let mut s = Series { label: Some(format!("distance {d}{suffix}")), ..Default::default() };
            let mut err = Vec::new();
            for (i, t) in values.iter().enumerate() {
                let e = point_at(result, axis, i, k).and_then(|p| p.walsh.as_ref()?.by_distance.get(&d).cloned());
                if let Some(e) = e {
                    s.x.push(t / MHZ);
                    s.y.push(e.mean);
                    err.push(e.stderr.unwrap_or(0.0));
                }
            }
            s.y_err = Some(err);
            series.push(s);
        }
    }
    Ok(LinePlot {
        title: "Walsh coefficient magnitudes",
        x_label: "T (MHz)",
        y_label: "mean |J| (GHz)",
        log_x: true,
        log_y: true,
        series: &series,
        threshold: Some((THRESHOLD, "100 kHz")),
    }
    .render())
}

pub fn execute_config(config: &SweepConfig, run: &RunArgs) -> Result<Vec<String>> {
    let mut config = config.clone();
    require(&mut config, &[Diagnostic::Walsh])?;
    let (axis, others) = lines(&config)?;
    let mut out = OutputDir::create(&run.out)?;
    let result = execute(&config, run, &mut out)?;
    out.write("walsh.csv", table(&result).to_csv())?;
    out.write("coefficients.csv", coefficients(&result, result.config.realization_indices().start).to_csv())?;
    out.write("walsh.svg", plot(&result)?)?;
    if !run.quiet {
        let mut text = String::new();
        for k in 0..others {
            if others > 1 {
                let other = &config.axes[1 - axis];
                let _ = writeln!(text, "{} = {}", other.name.name(), other.values[k]);
            }
            let (x, y) = nearest_neighbour_curve(&result, k)?;
            for (t, v) in x.iter().zip(&y) {
                let _ = writeln!(text, "  T = {t:>8.3} MHz  nearest-neighbour mean |J| = {}", opt_cell(*v));
            }
            match threshold_crossing(&result, k)? {
                Some(c) => {
                    let _ = writeln!(text, "  reaches 100 kHz at T = {c:.3} MHz");
                }
                None => {
                    let _ = writeln!(text, "  does not reach 100 kHz on this grid");
                }
            }
        }
        print!("{text}");
    }
    out.finish(RunManifest::new("walsh", &config, Some(config.master_seed))?)?;
    Ok(flags(&result))
}

pub fn run(args: &Args) -> Result<Vec<String>> {
    let config = args.sweep.resolve(Some(recipes::find("walsh-a")?.config))?;
    execute_config(&config, &args.run)
}
