//! Reading curves off sweep results: per-point observables and crossings.

use serde::{Deserialize, Serialize};
use transmon_sweep::{Param, PointAggregate, SweepResult};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Observable {
    KlPoisson,
    KlWignerDyson,
    Ipr,
}

impl Observable {
    pub fn of(self, p: &PointAggregate) -> Option<f64> {
        match self {
            Self::KlPoisson => p.kl.as_ref()?.d_vs_poisson_norm,
            Self::KlWignerDyson => p.kl.as_ref()?.d_vs_wigner_dyson_norm,
            Self::Ipr => p.ipr.as_ref().map(|e| e.mean),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::KlPoisson => "normalized KL vs Poisson",
            Self::KlWignerDyson => "normalized KL vs Wigner-Dyson",
            Self::Ipr => "IPR",
        }
    }
}

/// Point at grid index `idx` along `axis`, with the other axis fixed at `other`.
pub fn point_at<'a>(result: &'a SweepResult, axis: usize, idx: usize, other: usize) -> Option<&'a PointAggregate> {
    if axis == 0 {
        result.point(idx, other)
    } else {
        result.point(other, idx)
    }
}

/// Values along the axis named `along` for every index of the other axis.
pub struct Cut {
    pub x: Vec<f64>,
    /// `(value of the other axis, points along the cut)`.
    pub lines: Vec<(Option<f64>, Vec<usize>)>,
    pub axis: usize,
}

pub fn cuts(result: &SweepResult, along: Param) -> Result<Cut> {
    let config = &result.config;
    let (axis, a) = config
        .axis(along)
        .ok_or_else(|| CliError::Config(format!("the sweep has no {} axis", along.name())))?;
    let other = config.axes.get(1 - axis.min(1)).filter(|_| config.axes.len() == 2);
    let n_other = other.map_or(1, |o| o.values.len());
    let lines = (0..n_other)
        .map(|k| (other.map(|o| o.values[k]), (0..a.values.len()).collect()))
        .collect();
    Ok(Cut { x: a.values.clone(), lines, axis })
}

/// First `x` where the piecewise curve crosses `level`, interpolating in
/// `ln x` (and in `ln y` when `log_y`). Points with `x <= 0` are skipped.
pub fn crossing(x: &[f64], y: &[Option<f64>], level: f64, log_y: bool) -> Option<f64> {
    let tf = |v: f64| if log_y { v.max(1e-300).ln() } else { v };
    let pts: Vec<(f64, f64)> =
        x.iter().zip(y).filter_map(|(&x, y)| y.filter(|_| x > 0.0).map(|y| (x.ln(), tf(y)))).collect();
    let l = tf(level);
    for w in pts.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if y0 == l {
            return Some(x0.exp());
        }
        if (y0 - l) * (y1 - l) < 0.0 {
            let f = (l - y0) / (y1 - y0);
            return Some((x0 + f * (x1 - x0)).exp());
        }
    }
    pts.last().filter(|p| p.1 == l).map(|p| p.0.exp())
}

/// First `x` where curves `a` and `b` cross.
pub fn curves_cross(x: &[f64], a: &[Option<f64>], b: &[Option<f64>]) -> Option<f64> {
    let diff: Vec<Option<f64>> = a.iter().zip(b).map(|(a, b)| Some((*a)? - (*b)?)).collect();
    crossing(x, &diff, 0.0, false)
}
