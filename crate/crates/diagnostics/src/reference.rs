//! Folded ratio densities for uncorrelated and GOE spectra.
//!
//! `P_Poisson(R) = 2 / (1 + R)^2` and the GOE surmise
//! `P_GOE(R) = (27/4) (R + R^2) / (1 + R + R^2)^{5/2}`, both on `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::error::{DiagnosticsError, Result};

/// Mean folded ratio of independent levels, `2 ln 2 - 1`.
pub const POISSON_MEAN_RATIO: f64 = 0.386_294_361_119_890_6;
/// Mean folded ratio of the 3x3 GOE surmise, `4 - 2 sqrt 3`.
pub const GOE_SURMISE_MEAN_RATIO: f64 = 0.535_898_384_862_245_4;
/// Large-matrix GOE value.
pub const GOE_MEAN_RATIO: f64 = 0.5307;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    Poisson,
    Goe,
}

impl Ensemble {
    pub fn density(self, r: f64) -> f64 {
        match self {
            Ensemble::Poisson => 2.0 / ((1.0 + r) * (1.0 + r)),
            Ensemble::Goe => {
                let s = 1.0 + r + r * r;
                6.75 * (r + r * r) / (s * s * s.sqrt())
            }
        }
    }

    /// Probability mass on `[0, r]`.
    pub fn cdf(self, r: f64) -> f64 {
        let r = r.clamp(0.0, 1.0);
        match self {
            Ensemble::Poisson => 2.0 * r / (1.0 + r),
            Ensemble::Goe => integrate(|x| self.density(x), 0.0, r, 1e-14),
        }
    }
}

/// Bin masses of the reference density over `bins` uniform bins of `[0, 1]`.
pub fn reference_distribution(ensemble: Ensemble, bins: usize) -> Result<Vec<f64>> {
    if bins < 2 {
        return Err(DiagnosticsError::InvalidInput(format!("need at least 2 bins, got {bins}")));
    }
    let edges: Vec<f64> = (0..=bins).map(|i| ensemble.cdf(i as f64 / bins as f64)).collect();
    let mut masses: Vec<f64> = edges.windows(2).map(|w| w[1] - w[0]).collect();
    let total: f64 = masses.iter().sum();
    masses.iter_mut().for_each(|m| *m /= total);
    Ok(masses)
}

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        f: &impl Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        refine(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
            + refine(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }

    if b <= a {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(&f, a, fa, b, fb);
    refine(&f, a, fa, b, fb, m, fm, whole, tol, 40)
}
