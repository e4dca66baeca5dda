//! Exponent fit for the data collapse `T -> T * E_J^mu`.

use serde::{Deserialize, Serialize};

use crate::error::{DiagnosticsError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub e_j: f64,
    /// Ascending couplings, all positive.
    pub t: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseOptions {
    pub mu_min: f64,
    pub mu_max: f64,
    pub mu_step: f64,
    pub grid_points: usize,
    /// Residual curves whose spread is below this (relative to their maximum,
    /// or absolutely when the maximum vanishes) are reported as degenerate.
    pub flat_tolerance: f64,
}

impl Default for CollapseOptions {
    fn default() -> Self {
        Self { mu_min: 0.3, mu_max: 0.8, mu_step: 0.005, grid_points: 64, flat_tolerance: 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseFit {
    pub mu: f64,
    pub residual: f64,
    pub scan: Vec<f64>,
    /// `None` where the rescaled traces do not overlap.
    pub residuals: Vec<Option<f64>>,
    /// The residual does not depend on `mu`, so the minimum carries no information.
    pub degenerate: bool,
}

fn interpolate(x: &[f64], y: &[f64], at: f64) -> f64 {
    let i = x.partition_point(|&v| v < at).clamp(1, x.len() - 1);
    let (x0, x1) = (x[i - 1], x[i]);
    let w = if x1 > x0 { (at - x0) / (x1 - x0) } else { 0.0 };
    y[i - 1] + w * (y[i] - y[i - 1])
}

fn validate(traces: &[Trace]) -> Result<()> {
    if traces.len() < 3 {
        return Err(DiagnosticsError::InvalidInput(format!("need at least 3 traces, got {}", traces.len())));
    }
    let (lo, hi) = traces.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), t| (lo.min(t.e_j), hi.max(t.e_j)));
    if !(lo > 0.0) || hi < 3.0 * lo {
        return Err(DiagnosticsError::InvalidInput(format!(
            "E_J values must be positive and span a factor of 3, got [{lo}, {hi}]"
        )));
    }
    for tr in traces {
        if tr.t.len() != tr.values.len() {
            return Err(DiagnosticsError::LengthMismatch(tr.t.len(), tr.values.len()));
        }
        if tr.t.len() < 8 {
            return Err(DiagnosticsError::InvalidInput(format!(
                "trace at E_J = {} has {} points, need 8",
                tr.e_j,
                tr.t.len()
            )));
        }
        if tr.t[0] <= 0.0 || tr.t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DiagnosticsError::InvalidInput(format!(
                "couplings of trace at E_J = {} must be positive and increasing",
                tr.e_j
            )));
        }
        if tr.values.iter().any(|v| !v.is_finite()) {
            return Err(DiagnosticsError::InvalidInput(format!("non-finite value in trace at E_J = {}", tr.e_j)));
        }
    }
    Ok(())
}

/// Mean cross-trace variance on a common log-spaced grid after rescaling by
/// `E_J^mu`, interpolating linearly in `ln x`.
pub fn collapse_residual(traces: &[Trace], mu: f64, grid_points: usize) -> Option<f64> {
    let logs: Vec<(Vec<f64>, &[f64])> = traces
        .iter()
        .map(|tr| {
            let shift = mu * tr.e_j.ln();
            (tr.t.iter().map(|t| t.ln() + shift).collect(), tr.values.as_slice())
        })
        .collect();
    let lo = logs.iter().map(|(x, _)| x[0]).fold(f64::NEG_INFINITY, f64::max);
    let hi = logs.iter().map(|(x, _)| x[x.len() - 1]).fold(f64::INFINITY, f64::min);
    if !(hi > lo) {
        return None;
    }
    let g = grid_points.max(2);
    let mut total = 0.0;
    for k in 0..g {
        let at = lo + (hi - lo) * k as f64 / (g - 1) as f64;
        let ys: Vec<f64> = logs.iter().map(|(x, y)| interpolate(x, y, at)).collect();
        let mean = ys.iter().sum::<f64>() / ys.len() as f64;
        total += ys.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>() / ys.len() as f64;
    }
    Some(total / g as f64)
}

pub fn fit_collapse_exponent(traces: &[Trace], options: &CollapseOptions) -> Result<CollapseFit> {
    validate(traces)?;
    if !(options.mu_step > 0.0) || options.mu_max < options.mu_min {
        return Err(DiagnosticsError::InvalidInput(format!("bad exponent scan {options:?}")));
    }
    let count = ((options.mu_max - options.mu_min) / options.mu_step + 1e-9).floor() as usize + 1;
    let scan: Vec<f64> = (0..count).map(|i| options.mu_min + i as f64 * options.mu_step).collect();
    let residuals: Vec<Option<f64>> = scan.iter().map(|&mu| collapse_residual(traces, mu, options.grid_points)).collect();
    let (best, residual) = residuals
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.map(|r| (i, r)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(DiagnosticsError::NoOverlap)?;
    let max = residuals.iter().flatten().copied().fold(0.0, f64::max);
    let degenerate = max - residual <= options.flat_tolerance * max.max(1.0);
    Ok(CollapseFit { mu: scan[best], residual, scan, residuals, degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planted(mu: f64, e_js: &[f64], f: impl Fn(f64) -> f64) -> Vec<Trace> {
        e_js.iter()
            .map(|&e_j| {
                let t: Vec<f64> = (0..20).map(|i| 1e-3 * 10f64.powf(i as f64 / 19.0 * 2.0)).collect();
                let values = t.iter().map(|&t| f(t * e_j.powf(mu))).collect();
                Trace { e_j, t, values }
            })
            .collect()
    }

    #[test]
    fn recovers_planted_exponent() {
        let sigmoid = |x: f64| 1.0 / (1.0 + (x / 0.1).powf(-2.0));
        for mu in [0.4, 0.5, 0.62] {
            let fit = fit_collapse_exponent(&planted(mu, &[10.0, 32.0, 100.0], sigmoid), &CollapseOptions::default())
                .unwrap();
            assert!((fit.mu - mu).abs() <= 0.02, "planted {mu}, got {}", fit.mu);
            assert!(!fit.degenerate);
        }
    }

    #[test]
    fn constant_traces_are_degenerate() {
        let fit = fit_collapse_exponent(&planted(0.5, &[10.0, 30.0, 100.0], |_| 0.7), &CollapseOptions::default())
            .unwrap();
        assert!(fit.degenerate);
        assert!(fit.residuals.iter().flatten().all(|&r| r < 1e-20));
    }

    #[test]
    fn preconditions() {
        let f = |x: f64| x.ln();
        let opts = CollapseOptions::default();
        assert!(fit_collapse_exponent(&planted(0.5, &[10.0, 20.0], f), &opts).is_err());
        assert!(fit_collapse_exponent(&planted(0.5, &[10.0, 15.0, 20.0], f), &opts).is_err());
        let mut short = planted(0.5, &[10.0, 32.0, 100.0], f);
        short[1].t.truncate(5);
        short[1].values.truncate(5);
        assert!(fit_collapse_exponent(&short, &opts).is_err());
    }

    #[test]
    fn disjoint_ranges() {
        let mut traces = planted(0.5, &[10.0, 32.0, 100.0], |x| x);
        for t in traces[2].t.iter_mut() {
            *t *= 1e6;
        }
        assert!(matches!(
            fit_collapse_exponent(&traces, &CollapseOptions::default()),
            Err(DiagnosticsError::NoOverlap)
        ));
    }
}
