//! Sweep configuration, grid resolution and seed derivation.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use transmon_core::seed::mix_seed;
use transmon_core::{build_lattice, DisorderScheme, Geometry, Lattice, Sublattice};
use transmon_diagnostics::StepPolicy;

use crate::error::{Result, SweepError};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    /// Mean Josephson energy (GHz).
    EJ,
    /// Capacitive coupling (GHz).
    T,
    /// Josephson spread (GHz) for `fixed_sigma` and `pattern` disorder.
    DeltaEJ,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::EJ => "e_j",
            Param::T => "t",
            Param::DeltaEJ => "delta_e_j",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spacing {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: Param,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
    /// Log-spaced values, used when `values` is empty.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log: Option<Spacing>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear: Option<Spacing>,
}

impl Axis {
    pub fn new(name: Param, values: Vec<f64>) -> Self {
        Self { name, values, log: None, linear: None }
    }

    fn resolve(&mut self) -> Result<()> {
        let spaced = |s: &Spacing, log: bool| -> Result<Vec<f64>> {
            if s.count == 0 || (log && !(s.start > 0.0 && s.stop > 0.0)) {
                return Err(SweepError::Config(format!("bad spacing for axis {}: {s:?}", self.name.name())));
            }
            Ok((0..s.count)
                .map(|k| {
                    let f = if s.count == 1 { 0.0 } else { k as f64 / (s.count - 1) as f64 };
                    if k == 0 {
                        s.start
                    } else if k + 1 == s.count {
                        s.stop
                    } else if log {
                        (s.start.ln() + f * (s.stop.ln() - s.start.ln())).exp()
                    } else {
                        s.start + f * (s.stop - s.start)
                    }
                })
                .collect())
        };
        if self.values.is_empty() {
            self.values = match (&self.log, &self.linear) {
                (Some(s), None) => spaced(s, true)?,
                (None, Some(s)) => spaced(s, false)?,
                _ => {
                    return Err(SweepError::Config(format!(
                        "axis {} needs exactly one of values, log or linear",
                        self.name.name()
                    )))
                }
            };
        } else if self.log.is_some() || self.linear.is_some() {
            return Err(SweepError::Config(format!("axis {} mixes explicit and spaced values", self.name.name())));
        }
        self.log = None;
        self.linear = None;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagnostic {
    Kl,
    Ipr,
    Walsh,
    Multiplet,
    /// Bundle eigenvalues of realization 0 at each point.
    Levels,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    /// Geometry shorthand, e.g. `chain:10`, `surface7`, `grid3x3:ab`.
    pub geometry: String,
    pub e_c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_j: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub scheme: DisorderScheme,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Levels kept per site; defaults to the window top plus 3.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    /// Excitation bundle analysed by the spectral diagnostics.
    pub bundle: usize,
    /// Excitation window; defaults to `[bundle, bundle]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(usize, usize)>,
    #[serde(default = "default_min_ratio")]
    pub min_ej_over_ec: f64,
    #[serde(default = "default_cutoff_tolerance")]
    pub cutoff_tolerance: f64,
}

fn default_n_max() -> usize {
    15
}

fn default_min_ratio() -> f64 {
    transmon_core::disorder::MIN_EJ_OVER_EC
}

fn default_cutoff_tolerance() -> f64 {
    transmon_core::transmon::DEFAULT_CUTOFF_TOLERANCE
}

impl SystemSpec {
    pub fn window(&self) -> (usize, usize) {
        self.window.unwrap_or((self.bundle, self.bundle))
    }

    pub fn levels(&self) -> usize {
        self.levels.unwrap_or(self.window().1 + 3)
    }

    pub fn lattice(&self) -> Result<Lattice> {
        Ok(build_lattice(&Geometry::parse(&self.geometry)?)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalshSpec {
    #[serde(default = "default_walsh_levels")]
    pub levels: usize,
    /// Top of the excitation window; defaults to `N + 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_excitation: Option<usize>,
    #[serde(default)]
    pub policy: StepPolicy,
}

fn default_walsh_levels() -> usize {
    4
}

impl Default for WalshSpec {
    fn default() -> Self {
        Self { levels: default_walsh_levels(), max_excitation: None, policy: StepPolicy::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultipletSpec {
    /// Excited sites per sublattice.
    pub counts: BTreeMap<Sublattice, usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub system: SystemSpec,
    pub axes: Vec<Axis>,
    /// Ensemble size per grid point.
    pub realizations: usize,
    /// Runs only realizations `start..end` of the ensemble; partial runs merge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realization_range: Option<(usize, usize)>,
    pub diagnostics: Vec<Diagnostic>,
    #[serde(default)]
    pub walsh: WalshSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplet: Option<MultipletSpec>,
    #[serde(default = "default_bins")]
    pub bins: usize,
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Records between checkpoint flushes.
    #[serde(default = "default_interval")]
    pub checkpoint_interval: usize,
}

fn default_bins() -> usize {
    transmon_diagnostics::DEFAULT_BINS
}

fn default_interval() -> usize {
    1
}

/// Physical parameters at one grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointParams {
    pub e_j: f64,
    pub t: f64,
    pub delta_e_j: Option<f64>,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let mut config: Self = serde_json::from_str(text).map_err(|e| SweepError::Config(e.to_string()))?;
        config.resolve()?;
        Ok(config)
    }

    /// Materializes spaced axes and checks every invariant.
    pub fn resolve(&mut self) -> Result<()> {
        for axis in &mut self.axes {
            axis.resolve()?;
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SweepError::Config(m));
        let s = &self.system;
        if self.realizations == 0 {
            return bad("realizations must be at least 1".into());
        }
        if let Some((a, b)) = self.realization_range {
            if a >= b || b > self.realizations {
                return bad(format!("realization range {a}..{b} outside 0..{}", self.realizations));
            }
        }
        if self.axes.is_empty() || self.axes.len() > 2 {
            return bad(format!("need 1 or 2 axes, got {}", self.axes.len()));
        }
        if self.axes.len() == 2 && self.axes[0].name == self.axes[1].name {
            return bad("axes must be distinct".into());
        }
        for axis in &self.axes {
            let v = &axis.values;
            if v.is_empty() {
                return bad(format!("axis {} has no values", axis.name.name()));
            }
            if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return bad(format!("axis {} values must be finite and non-negative", axis.name.name()));
            }
            let up = v.windows(2).all(|w| w[1] > w[0]);
            let down = v.windows(2).all(|w| w[1] < w[0]);
            if !(up || down) {
                return bad(format!("axis {} values must be strictly monotone", axis.name.name()));
            }
            if axis.name == Param::EJ && v.iter().any(|&x| x <= 0.0) {
                return bad("E_J values must be positive".into());
            }
        }
        if !(s.e_c > 0.0) {
            return bad(format!("E_C must be positive, got {}", s.e_c));
        }
        let patterned = matches!(s.scheme, DisorderScheme::Pattern { .. });
        if self.axis(Param::EJ).is_none() && !patterned && !s.e_j.is_some_and(|e| e > 0.0) {
            return bad("set system.e_j or add an e_j axis".into());
        }
        if self.axis(Param::T).is_none() && !s.t.is_some_and(|t| t >= 0.0) {
            return bad("set system.t or add a t axis".into());
        }
        if self.axis(Param::DeltaEJ).is_some()
            && !matches!(s.scheme, DisorderScheme::FixedSigma { .. } | DisorderScheme::Pattern { .. })
        {
            return bad("a delta_e_j axis needs fixed_sigma or pattern disorder".into());
        }
        let (lo, hi) = s.window();
        if lo > s.bundle || s.bundle > hi {
            return bad(format!("window [{lo}, {hi}] does not contain bundle {}", s.bundle));
        }
        if s.levels() < 2 {
            return bad("need at least 2 levels per site".into());
        }
        if self.diagnostics.is_empty() {
            return bad("select at least one diagnostic".into());
        }
        if self.diagnostics.contains(&Diagnostic::Multiplet) && self.multiplet.is_none() {
            return bad("multiplet diagnostic needs a multiplet spec".into());
        }
        if self.bins < 2 {
            return bad("need at least 2 histogram bins".into());
        }
        if self.checkpoint_interval == 0 {
            return bad("checkpoint interval must be at least 1".into());
        }
        let lattice = s.lattice()?;
        if self.diagnostics.contains(&Diagnostic::Walsh) {
            let n = lattice.n_sites();
            if n > 12 {
                return bad(format!("Walsh tracking on {n} sites is out of reach"));
            }
            if self.walsh.max_excitation.is_some_and(|m| m < n) {
                return bad("Walsh excitation window must reach N".into());
            }
        }
        Ok(())
    }

    pub fn axis(&self, name: Param) -> Option<(usize, &Axis)> {
        self.axes.iter().enumerate().find(|(_, a)| a.name == name)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.axes[0].values.len(), self.axes.get(1).map_or(1, |a| a.values.len()))
    }

    pub fn point(&self, i: usize, j: usize) -> PointParams {
        let s = &self.system;
        let mut p = PointParams { e_j: s.e_j.unwrap_or(0.0), t: s.t.unwrap_or(0.0), delta_e_j: None };
        for (axis, idx) in self.axes.iter().zip([i, j]) {
            let v = axis.values[idx];
            match axis.name {
                Param::EJ => p.e_j = v,
                Param::T => p.t = v,
                Param::DeltaEJ => p.delta_e_j = Some(v),
            }
        }
        p
    }

    pub fn realization_indices(&self) -> std::ops::Range<usize> {
        let (a, b) = self.realization_range.unwrap_or((0, self.realizations));
        a..b
    }

    /// The config with run-local fields cleared; two runs may share
    /// checkpoints and merge exactly when their identities agree.
    pub fn identity(&self) -> SweepConfig {
        SweepConfig { realization_range: None, output: None, checkpoint_interval: default_interval(), ..self.clone() }
    }

    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(&self.identity()).expect("config serializes");
        Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Seed of realization `r` at grid point `(i, j)`.
pub fn task_seed(master_seed: u64, i: usize, j: usize, r: usize) -> u64 {
    mix_seed(&[master_seed, i as u64, j as u64, r as u64])
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample() -> &'static str {
        r#"{
            "system": {"geometry": "chain:4", "e_c": 0.25, "scheme": "a", "bundle": 2, "t": 0.005},
            "axes": [{"name": "e_j", "values": [10, 20, 40]}, {"name": "t", "log": {"start": 0.001, "stop": 0.1, "count": 3}}],
            "realizations": 3,
            "diagnostics": ["kl", "ipr"],
            "master_seed": 7
        }"#
    }

    #[test]
    fn parses_and_resolves() {
        let c = SweepConfig::from_json(sample()).unwrap();
        assert_eq!(c.shape(), (3, 3));
        let t = &c.axes[1].values;
        assert!((t[1] - 0.01).abs() < 1e-15);
        assert_eq!(c.system.window(), (2, 2));
        assert_eq!(c.system.levels(), 5);
        assert_eq!(c.point(2, 0), PointParams { e_j: 40.0, t: 0.001, delta_e_j: None });
        assert_eq!(c.bins, 20);
    }

    #[test]
    fn hash_ignores_run_local_fields() {
        let a = SweepConfig::from_json(sample()).unwrap();
        let mut b = a.clone();
        b.realization_range = Some((1, 2));
        b.output = Some("elsewhere".into());
        b.checkpoint_interval = 10;
        assert_eq!(a.hash(), b.hash());
        b.axes[0].values[0] = 11.0;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn rejects_bad_configs() {
        let edit = |f: &dyn Fn(&mut SweepConfig)| {
            let mut c = SweepConfig::from_json(sample()).unwrap();
            f(&mut c);
            c.validate()
        };
        assert!(edit(&|c| c.realizations = 0).is_err());
        assert!(edit(&|c| c.axes[0].values = vec![10.0, 10.0]).is_err());
        assert!(edit(&|c| c.axes[0].values = vec![10.0, 20.0, 15.0]).is_err());
        assert!(edit(&|c| c.system.window = Some((3, 4))).is_err());
        assert!(edit(&|c| c.diagnostics = vec![Diagnostic::Multiplet]).is_err());
        assert!(edit(&|c| c.system.geometry = "moebius".into()).is_err());
        assert!(edit(&|c| c.axes[1].name = Param::DeltaEJ).is_err());
        assert!(edit(&|c| c.realization_range = Some((2, 5))).is_err());
        assert!(SweepConfig::from_json("{").is_err());
    }

    #[test]
    fn seeds_are_stable_and_distinct() {
        assert_eq!(task_seed(7, 1, 2, 3), task_seed(7, 1, 2, 3));
        let mut seen = std::collections::HashSet::new();
        for i in 0..5 {
            for j in 0..5 {
                for r in 0..20 {
                    assert!(seen.insert(task_seed(7, i, j, r)));
                }
            }
        }
    }
}
