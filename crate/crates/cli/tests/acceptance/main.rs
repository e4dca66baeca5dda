//! Acceptance suite. Run with
//! `cargo test --release -p transmon-cli --test acceptance [-- 1 3 ...]`;
//! prints one `[PASS]`/`[FAIL]` line per check and exits non-zero on a failure.

mod properties;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use transmon_cli::commands::{collapse, walsh};
use transmon_cli::curves::{crossing, curves_cross, Observable};
use transmon_cli::recipes;
use transmon_core::basis::BasisSpec;
use transmon_core::faer::{Mat, Side};
use transmon_core::seed::{gaussian, uniform};
use transmon_core::units::MHZ;
use transmon_core::*;
use transmon_diagnostics::{fit_collapse_exponent, normalized_kl, select_permutation_multiplet, spacing_ratios, CollapseOptions, RatioSample, Trace};
use transmon_sweep::{run_sweep, Outcome, Param, RunOptions, SweepConfig, SweepResult, TaskKind};

pub struct Report {
    pub passed: usize,
    pub failed: usize,
}

impl Report {
    pub fn check(&mut self, id: &str, pass: bool, detail: impl AsRef<str>) {
        println!("[{}] {id}: {}", if pass { "PASS" } else { "FAIL" }, detail.as_ref());
        if pass {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
    }

    fn runtime(&mut self, id: &str, elapsed: Duration, budget: Duration) {
        self.check(id, elapsed < budget, format!("{:.1} s (budget {:.0} s)", elapsed.as_secs_f64(), budget.as_secs_f64()));
    }
}

const MINUTE: Duration = Duration::from_secs(60);
const HOUR: Duration = Duration::from_secs(3600);

fn eigenvalues(h: &Mat<f64>) -> Vec<f64> {
    let mut e = h.self_adjoint_eigenvalues(Side::Lower).expect("dense solve");
    e.sort_by(f64::total_cmp);
    e
}

/// `4 E_C n^2 - E_J cos(phi)` on charges `-n_max..=n_max`.
fn charge_hamiltonian(e_c: f64, e_j: f64, n_max: usize) -> Mat<f64> {
    let dim = 2 * n_max + 1;
    Mat::from_fn(dim, dim, |r, c| {
        let m = r as f64 - n_max as f64;
        match r.abs_diff(c) {
            0 => 4.0 * e_c * m * m,
            1 => -e_j / 2.0,
            _ => 0.0,
        }
    })
}

fn show(v: Option<f64>) -> String {
    v.map_or("none".into(), |v| format!("{v:.4}"))
}

fn sweep(r: &mut Report, id: &str, config: &SweepConfig) -> Option<SweepResult> {
    match run_sweep(config, &RunOptions { progress: true, ..RunOptions::default() }) {
        Ok(result) => Some(result),
        Err(e) => {
            r.check(&format!("{id} sweep"), false, e.to_string());
            None
        }
    }
}

fn recipe(name: &str) -> SweepConfig {
    let mut c: SweepConfig = serde_json::from_value(recipes::find(name).unwrap().config).unwrap();
    c.resolve().unwrap();
    c
}

fn t_index(config: &SweepConfig, t_mhz: f64) -> usize {
    let (_, axis) = config.axis(Param::T).unwrap();
    axis.values.iter().position(|&t| (t - t_mhz * MHZ).abs() < 1e-12).expect("coupling on the grid")
}

fn criterion_1(r: &mut Report) {
    let start = Instant::now();
    let (e_c, e_j) = (0.25, 12.5);
    let sol = solve_single_transmon(&TransmonParams::new(e_c, e_j, 15, 4).unwrap()).unwrap();
    let oracle = eigenvalues(&charge_hamiltonian(e_c, e_j, 40));
    let f = sol.transition_frequency().unwrap();
    let f_oracle = oracle[1] - oracle[0];
    r.check("1a transition vs n_max = 40 oracle", (f - f_oracle).abs() < 1e-6, format!("{f:.9} vs {f_oracle:.9} GHz"));
    let a = sol.anharmonicity().unwrap();
    let rel = (a + e_c).abs() / e_c;
    r.check("1b anharmonicity = -E_C within 5%", rel < 0.05, format!("{a:.6} GHz, {:.1}% from -E_C", 100.0 * rel));
    r.runtime("1c runtime", start.elapsed(), Duration::from_secs(1));
}

/// `H_1 + H_2 + T n_1 n_2` in the product charge basis.
fn brute_force_pair(e_c: f64, e_j: [f64; 2], t: f64, n_max: usize) -> Vec<f64> {
    let dim = 2 * n_max + 1;
    let h = [charge_hamiltonian(e_c, e_j[0], n_max), charge_hamiltonian(e_c, e_j[1], n_max)];
    let charge = |i: usize| i as f64 - n_max as f64;
    eigenvalues(&Mat::from_fn(dim * dim, dim * dim, |row, col| {
        let (a, b, a2, b2) = (row / dim, row % dim, col / dim, col % dim);
        let mut v = 0.0;
        if b == b2 {
            v += h[0][(a, a2)];
        }
        if a == a2 {
            v += h[1][(b, b2)];
        }
        if row == col {
            v += t * charge(a) * charge(b);
        }
        v
    }))
}

fn criterion_2(r: &mut Report) {
    let start = Instant::now();
    let (e_c, e_j) = (0.25, [12.5, 13.4]);
    let lattice = build_lattice(&Geometry::parse("chain:2").unwrap()).unwrap();
    let sols: Vec<_> =
        e_j.iter().map(|&e| solve_single_transmon(&TransmonParams::new(e_c, e, 15, 4).unwrap()).unwrap()).collect();
    let basis = ManyBodyBasis::new(BasisSpec::full(2, 4), DEFAULT_BASIS_CAP).unwrap();
    let n_brute = 12;
    let ground: f64 = e_j.iter().map(|&e| eigenvalues(&charge_hamiltonian(e_c, e, n_brute))[0]).sum();
    for t in [1.0, 5.0, 20.0] {
        let h = build_many_body_hamiltonian(&sols, &lattice, t * MHZ, &basis).unwrap();
        let ours = diagonalize(&h, false).unwrap().eigenvalues;
        let brute = brute_force_pair(e_c, e_j, t * MHZ, n_brute);
        let worst = (0..6).map(|k| (ours[k] - (brute[k] - ground)).abs()).fold(0.0, f64::max);
        r.check(&format!("2 two transmons at T = {t} MHz"), worst < 1e-4, format!("max deviation {worst:.2e} GHz over 6 levels"));
    }
    r.runtime("2 runtime", start.elapsed(), MINUTE);
}

fn goe_levels(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let a = Mat::from_fn(n, n, |_, _| gaussian(rng));
    eigenvalues(&Mat::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)]) / 2.0))
}

fn criterion_3(r: &mut Report) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let (mut goe, mut poisson) = (RatioSample::default(), RatioSample::default());
    for _ in 0..500 {
        goe.pool(&spacing_ratios(&goe_levels(&mut rng, 200)).unwrap());
        let mut levels: Vec<f64> = (0..200).map(|_| uniform(&mut rng)).collect();
        levels.sort_by(f64::total_cmp);
        poisson.pool(&spacing_ratios(&levels).unwrap());
    }
    let bins = transmon_diagnostics::DEFAULT_BINS;
    let g = normalized_kl(&goe.values, bins).unwrap();
    let p = normalized_kl(&poisson.values, bins).unwrap();
    let g_mean = goe.mean().unwrap();
    let p_mean = poisson.mean().unwrap();
    r.check("3a GOE mean R = 0.5307 +- 0.005", (g_mean - 0.5307).abs() < 0.005, format!("{g_mean:.4} over {} ratios", goe.len()));
    r.check("3b GOE normalized KL vs Wigner-Dyson < 0.05", g.d_vs_wigner_dyson_norm < 0.05, format!("{:.4}", g.d_vs_wigner_dyson_norm));
    r.check("3c Poisson mean R = 0.3863 +- 0.005", (p_mean - 0.3863).abs() < 0.005, format!("{p_mean:.4} over {} ratios", poisson.len()));
    r.check("3d Poisson normalized KL vs Poisson < 0.05", p.d_vs_poisson_norm < 0.05, format!("{:.4}", p.d_vs_poisson_norm));
    r.runtime("3 runtime", start.elapsed(), 5 * MINUTE);
}

/// Occupations of `n` sites with `levels` states each summing to `k`, by enumeration.
fn count_states(n: usize, levels: usize, k: usize) -> usize {
    if n == 0 {
        return (k == 0) as usize;
    }
    (0..levels.min(k + 1)).map(|m| count_states(n - 1, levels, k - m)).sum()
}

fn criterion_4(r: &mut Report) {
    let start = Instant::now();
    let chain = ManyBodyBasis::new(BasisSpec::window(10, 8, 5, 5), DEFAULT_BASIS_CAP).unwrap();
    r.check("4a N = 10 chain, 5-excitation bundle", chain.len() == 2002 && count_states(10, 8, 5) == 2002, format!("{} states", chain.len()));
    let grid = build_lattice(&Geometry::parse("grid3x3:ab").unwrap()).unwrap();
    let basis = ManyBodyBasis::new(BasisSpec::window(9, 8, 5, 5), DEFAULT_BASIS_CAP).unwrap();
    r.check("4b 3x3 grid, 5-excitation bundle", basis.len() == 1287 && count_states(9, 8, 5) == 1287, format!("{} states", basis.len()));
    let counts = BTreeMap::from([(Sublattice::A, 3), (Sublattice::B, 2)]);
    let multiplet = select_permutation_multiplet(&basis, grid.pattern(), &counts).unwrap();
    r.check("4c A-B permutation multiplet", multiplet.len() == 60, format!("{} states", multiplet.len()));

    let scheme = DisorderScheme::Pattern { means: BTreeMap::from([(Sublattice::A, 12.58), (Sublattice::B, 13.8)]), delta_e_j: 0.01 };
    let e_j = sample_disorder(&DisorderModel::new(scheme, 4), &grid, 0.33, 0.0).unwrap();
    let sols: Vec<_> =
        e_j.iter().map(|&e| solve_single_transmon(&TransmonParams::new(0.33, e, 15, 8).unwrap()).unwrap()).collect();
    let h = build_many_body_hamiltonian(&sols, &grid, 3.0 * MHZ, &basis).unwrap();
    let spectrum = diagonalize(&h, false).unwrap();
    let tag = select_bundle(&spectrum, 5, &basis).unwrap();
    r.check("4d tagged bundle", tag.range.len() == 1287 && !tag.overlap, format!("{} levels, overlap {}", tag.range.len(), tag.overlap));
    r.runtime("4 runtime", start.elapsed(), MINUTE);
}

fn kl_at(result: &SweepResult, i: usize, o: Observable) -> Option<f64> {
    o.of(result.point(i, 0)?)
}

fn kl_curves(r: &mut Report, id: &str, result: &SweepResult, crossing_range: (f64, f64)) {
    let config = &result.config;
    let (i2, i70) = (t_index(config, 2.0), t_index(config, 70.0));
    let p = kl_at(result, i2, Observable::KlPoisson);
    r.check(&format!("{id} KL vs Poisson < 0.15 at 2 MHz"), p.is_some_and(|v| v < 0.15), show(p));
    let w = kl_at(result, i70, Observable::KlWignerDyson);
    r.check(&format!("{id} KL vs Wigner-Dyson < 0.15 at 70 MHz"), w.is_some_and(|v| v < 0.15), show(w));
    let (_, axis) = config.axis(Param::T).unwrap();
    let x: Vec<f64> = axis.values.iter().map(|t| t / MHZ).collect();
    let a: Vec<_> = (0..x.len()).map(|i| kl_at(result, i, Observable::KlPoisson)).collect();
    let b: Vec<_> = (0..x.len()).map(|i| kl_at(result, i, Observable::KlWignerDyson)).collect();
    let c = curves_cross(&x, &a, &b);
    let table: Vec<String> =
        x.iter().zip(a.iter().zip(&b)).map(|(x, (a, b))| format!("{x}:{:.3}/{:.3}", a.unwrap_or(f64::NAN), b.unwrap_or(f64::NAN))).collect();
    println!("       T(MHz):KL_P/KL_WD {}", table.join(" "));
    r.check(
        &format!("{id} curves cross in [{}, {}] MHz", crossing_range.0, crossing_range.1),
        c.is_some_and(|c| c >= crossing_range.0 && c <= crossing_range.1),
        format!("crossing at {} MHz", show(c)),
    );
}

fn criterion_5(r: &mut Report) {
    let spread = DisorderScheme::A.spread(0.25, 44.0);
    r.check("5 scheme-A spread at E_J = 44 GHz", (spread - 1.17).abs() < 0.005, format!("{spread:.4} GHz"));
    let start = Instant::now();
    let full = recipe("chain10-kl-vs-t");
    assert!(full.realizations >= 50);
    if let Some(result) = sweep(r, "5a", &full) {
        kl_curves(r, "5a N = 10", &result, (10.0, 60.0));
    }
    println!("       N = 10 sweep took {:.0} s", start.elapsed().as_secs_f64());
    let start = Instant::now();
    if let Some(result) = sweep(r, "5b", &recipe("chain8-kl-vs-t")) {
        kl_curves(r, "5b N = 8 fallback", &result, (10.0, 60.0));
    }
    r.runtime("5b fallback runtime", start.elapsed(), HOUR);
}

fn walsh_checks(r: &mut Report, id: &str, name: &str, target_mhz: f64) {
    let start = Instant::now();
    let config = recipe(name);
    assert!(config.realizations >= 100);
    let Some(result) = sweep(r, id, &config) else { return };
    let mut worst: f64 = 0.0;
    let mut realizations = 0;
    for rec in result.records.iter().filter(|rec| rec.key.kind == TaskKind::Walsh) {
        if let Outcome::Walsh(w) = &rec.outcome {
            let at_zero = w.points.iter().find(|p| p.t == 0.0).expect("T = 0 on the grid");
            realizations += 1;
            for (label, c) in at_zero.coefficients.iter().enumerate() {
                if label.count_ones() >= 2 {
                    worst = worst.max(c.abs());
                }
            }
        }
    }
    r.check(
        &format!("{id} weight >= 2 coefficients vanish at T = 0"),
        realizations >= 100 && worst < 1e-10,
        format!("max |c| = {worst:.2e} GHz over {realizations} realizations"),
    );
    let (x, y) = walsh::nearest_neighbour_curve(&result, 0).unwrap();
    let table: Vec<String> = x.iter().zip(&y).map(|(x, y)| format!("{x}:{:.2e}", y.unwrap_or(f64::NAN))).collect();
    println!("       T(MHz):NN {}", table.join(" "));
    let excluded: usize = result.points.iter().filter_map(|p| p.walsh.as_ref()).map(|w| w.excluded).sum();
    let c = crossing(&x, &y, 1e-4, true);
    r.check(
        &format!("{id} nearest-neighbour average reaches 100 kHz at {target_mhz} MHz within x2"),
        c.is_some_and(|c| c >= target_mhz / 2.0 && c <= target_mhz * 2.0),
        format!("crossing at {} MHz ({excluded} point-realizations excluded as ambiguous)", show(c)),
    );
    r.runtime(&format!("{id} runtime"), start.elapsed(), 2 * HOUR);
}

fn criterion_6(r: &mut Report) {
    let spread = DisorderScheme::B.spread(0.25, 12.5);
    r.check("6 scheme-B spread at E_J = 12.5 GHz", (spread - 7.5).abs() < 1e-9, format!("{spread:.4} GHz"));
    walsh_checks(r, "6a scheme A", "walsh-a", 3.0);
    walsh_checks(r, "6b scheme B", "walsh-b", 9.0);
}

fn criterion_7(r: &mut Report) {
    let logistic = |x: f64| 1.0 / (1.0 + (-(x.ln() - 0.02f64.ln()) * 2.0).exp());
    let planted: Vec<Trace> = [10.0, 32.0, 100.0]
        .iter()
        .map(|&e_j: &f64| {
            let t: Vec<f64> = (0..16).map(|i| 5e-4 * 200f64.powf(i as f64 / 15.0)).collect();
            let values = t.iter().map(|&t| logistic(t * e_j.powf(0.5))).collect();
            Trace { e_j, t, values }
        })
        .collect();
    let fit = fit_collapse_exponent(&planted, &CollapseOptions::default()).unwrap();
    r.check("7a planted mu = 0.50 recovered within 0.02", (fit.mu - 0.5).abs() <= 0.02, format!("mu = {:.3}", fit.mu));

    let config = recipe("collapse-grid");
    assert!(config.realizations >= 100);
    let Some(result) = sweep(r, "7b", &config) else { return };
    for (o, id) in [(Observable::KlPoisson, "7b KL collapse"), (Observable::Ipr, "7c IPR collapse")] {
        let traces = collapse::traces(&result, o).unwrap();
        match collapse::fit(&traces, &CollapseOptions { mu_min: 0.0, mu_max: 1.2, ..CollapseOptions::default() }) {
            Ok(f) => r.check(
                &format!("{id} mu in [0.40, 0.70]"),
                (0.4..=0.7).contains(&f.mu) && !f.degenerate,
                format!("mu = {:.3}, residual {:.2e}", f.mu, f.residual),
            ),
            Err(e) => r.check(&format!("{id} mu in [0.40, 0.70]"), false, format!("fit failed: {e}")),
        }
    }
}

fn criterion_8(r: &mut Report) {
    let start = Instant::now();
    let mut config = recipe("pattern-3x3");
    config.realizations = 200;
    let Some(result) = sweep(r, "8", &config) else { return };
    let (_, axis) = config.axis(Param::DeltaEJ).unwrap();
    let multiplet_ipr = |d: f64| -> Option<f64> {
        let i = axis.values.iter().position(|&v| v == d)?;
        Some(result.point(i, 0)?.multiplet_ipr.as_ref()?.mean)
    };
    for (i, d) in axis.values.iter().enumerate() {
        let p = result.point(i, 0).unwrap();
        println!(
            "       dE_J = {d:<7} multiplet IPR = {:.3}  multiplet KL_WD = {}",
            p.multiplet_ipr.as_ref().map_or(f64::NAN, |e| e.mean),
            show(p.multiplet_kl.as_ref().and_then(|k| k.d_vs_wigner_dyson_norm))
        );
    }
    let at = multiplet_ipr(0.05);
    r.check("8a multiplet IPR > 0.9 at dE_J = 0.05 GHz", at.is_some_and(|v| v > 0.9), show(at));
    let low = axis
        .values
        .iter()
        .filter(|&&d| (1e-4..=1e-2).contains(&d))
        .filter_map(|&d| multiplet_ipr(d).map(|v| (d, v)))
        .min_by(|a, b| a.1.total_cmp(&b.1));
    r.check("8b multiplet IPR < 0.5 within [1e-4, 1e-2] GHz", low.is_some_and(|(_, v)| v < 0.5), low.map_or("none".into(), |(d, v)| format!("minimum {v:.4} at dE_J = {d}")));
    let kl = (0..axis.values.len())
        .filter_map(|i| Some((axis.values[i], result.point(i, 0)?.multiplet_kl.as_ref()?.d_vs_wigner_dyson_norm?)))
        .min_by(|a, b| a.1.total_cmp(&b.1));
    r.check("8c minimum multiplet KL vs Wigner-Dyson < 0.3", kl.is_some_and(|(_, v)| v < 0.3), kl.map_or("none".into(), |(d, v)| format!("{v:.4} at dE_J = {d}")));
    r.runtime("8 runtime", start.elapsed(), 2 * HOUR);
}

fn main() {
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wants = |n: usize| selected.is_empty() || selected.contains(&n);
    let mut report = Report { passed: 0, failed: 0 };
    let criteria: [(usize, fn(&mut Report)); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, properties::run),
    ];
    for (n, f) in criteria {
        if wants(n) {
            println!("criterion {n}");
            f(&mut report);
        }
    }
    println!("\n{} passed, {} failed", report.passed, report.failed);
    if report.failed > 0 {
        std::process::exit(1);
    }
}
