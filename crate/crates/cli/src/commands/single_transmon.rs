use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use transmon_core::{solve_single_transmon, TransmonParams};

use crate::error::Result;
use crate::manifest::{OutputDir, RunManifest};
use crate::sweep_args::energy;
use crate::table::{cell, Table};

#[derive(clap::Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Options {
    /// Charging energy (GHz unless suffixed).
    #[arg(long, value_parser = energy, default_value = "0.25")]
    pub ec: f64,
    /// Josephson energy.
    #[arg(long, value_parser = energy)]
    pub ej: f64,
    /// Charge cutoff: charges -n_max..=n_max.
    #[arg(long, default_value_t = 15)]
    pub nmax: usize,
    /// Levels to report.
    #[arg(long, default_value_t = 6)]
    pub levels: usize,
}

#[derive(clap::Args, Clone, Debug)]
pub struct Args {
    #[command(flatten)]
    pub options: Options,
    /// Also write CSV tables and a manifest into this directory.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

pub struct Report {
    pub text: String,
    pub levels: Table,
    pub charges: Table,
}

pub fn report(o: &Options) -> Result<Report> {
    let sol = solve_single_transmon(&TransmonParams::new(o.ec, o.ej, o.nmax, o.levels)?)?;
    let mut text = String::new();
    let _ = writeln!(text, "E_C = {} GHz, E_J = {} GHz (E_J/E_C = {:.3}), n_max = {}", o.ec, o.ej, o.ej / o.ec, o.nmax);
    let _ = writeln!(text, "nu = sqrt(8 E_J E_C) = {:.9} GHz", (8.0 * o.ej * o.ec).sqrt());
    if let Some(f) = sol.transition_frequency() {
        let _ = writeln!(text, "transition eps1 - eps0 = {f:.9} GHz");
    }
    if let Some(a) = sol.anharmonicity() {
        let _ = writeln!(text, "anharmonicity = {a:.9} GHz ({:.4} E_C)", a / o.ec);
    }
    let _ = writeln!(text, "\n  k   eps_k - eps_0 (GHz)");
    let mut levels = Table::new("single-transmon-levels-v1", &["k", "energy"]);
    for (k, e) in sol.levels.iter().enumerate() {
        let _ = writeln!(text, "{k:>3}   {e:.9}");
        levels.push(vec![k.to_string(), cell(*e)]);
    }
    let _ = writeln!(text, "\ncharge matrix elements <k|n|l>");
    let mut charges = Table::new("charge-matrix-v1", &["k", "l", "n_kl"]);
    for k in 0..sol.dim() {
        let row: Vec<String> = (0..sol.dim()).map(|l| format!("{:>10.6}", sol.charge(k, l))).collect();
        let _ = writeln!(text, "{}", row.join(" "));
        for l in 0..sol.dim() {
            charges.push(vec![k.to_string(), l.to_string(), cell(sol.charge(k, l))]);
        }
    }
    Ok(Report { text, levels, charges })
}

pub fn run(options: &Options, out: Option<&std::path::Path>) -> Result<Vec<String>> {
    let r = report(options)?;
    print!("{}", r.text);
    if let Some(dir) = out {
        let mut out = OutputDir::create(dir)?;
        out.write("levels.csv", r.levels.to_csv())?;
        out.write("charges.csv", r.charges.to_csv())?;
        out.finish(RunManifest::new("single-transmon", options, None)?)?;
    }
    Ok(Vec::new())
}
