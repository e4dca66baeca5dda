//! Property suites, driven through proptest's runner so each prints one line.

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use transmon_diagnostics::{inverse_walsh_transform, kl_divergence, normalized_kl, spacing_ratios, state_ipr, walsh_transform};
use transmon_sweep::{merge_results, run_sweep, RunOptions, SweepConfig, SweepResult};

use crate::Report;

fn suite<S: Strategy>(r: &mut Report, id: &str, cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) {
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    match runner.run(&strategy, test) {
        Ok(()) => r.check(id, true, format!("{cases} cases")),
        Err(e) => r.check(id, false, e.to_string()),
    }
}

fn levels(max_bits: usize) -> impl Strategy<Value = Vec<f64>> {
    (1..=max_bits).prop_flat_map(|n| prop::collection::vec(-10.0..10.0f64, 1 << n))
}

fn sweep_config(seed: u64) -> SweepConfig {
    SweepConfig::from_json(&format!(
        r#"{{"system": {{"geometry": "chain:4", "e_c": 0.25, "e_j": 15.0, "scheme": "a", "bundle": 2}},
            "axes": [{{"name": "t", "values": [0.002, 0.02]}}],
            "realizations": 6, "diagnostics": ["kl", "ipr"], "master_seed": {seed}}}"#
    ))
    .unwrap()
}

fn quiet(threads: usize) -> RunOptions {
    RunOptions { threads: Some(threads), ..RunOptions::default() }
}

fn part(config: &SweepConfig, range: (usize, usize)) -> SweepResult {
    let mut c = config.clone();
    c.realization_range = Some(range);
    run_sweep(&c, &quiet(1)).unwrap()
}

pub fn run(r: &mut Report) {
    suite(r, "9a Walsh round trip", 256, levels(8), |e| {
        let back = inverse_walsh_transform(&walsh_transform(&e).unwrap()).unwrap();
        for (a, b) in e.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        Ok(())
    });
    suite(r, "9b shift moves only the constant coefficient", 256, (levels(8), -5.0..5.0f64), |(e, shift)| {
        let c = walsh_transform(&e).unwrap();
        let shifted: Vec<f64> = e.iter().map(|x| x + shift).collect();
        let d = walsh_transform(&shifted).unwrap();
        prop_assert!((d[0] - c[0] - shift).abs() < 1e-10);
        for (a, b) in c.iter().zip(&d).skip(1) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        Ok(())
    });
    suite(
        r,
        "9c KL divergence is non-negative",
        256,
        (prop::collection::vec(0.0..1.0f64, 2..30), prop::collection::vec(0.01..1.0f64, 30), prop::collection::vec(0.0..1.0f64, 200..600)),
        |(p, q, ratios)| {
            let q = &q[..p.len()];
            let (sp, sq): (f64, f64) = (p.iter().sum(), q.iter().sum());
            prop_assume!(sp > 0.0);
            let p: Vec<f64> = p.iter().map(|x| x / sp).collect();
            let q: Vec<f64> = q.iter().map(|x| x / sq).collect();
            prop_assert!(kl_divergence(&p, &q).unwrap() >= -1e-12);
            let k = normalized_kl(&ratios, 10).unwrap();
            prop_assert!(k.d_vs_poisson_norm >= 0.0 && k.d_vs_wigner_dyson_norm >= 0.0);
            Ok(())
        },
    );
    suite(r, "9d IPR lies in [1/n, 1]", 256, prop::collection::vec(-1.0..1.0f64, 1..200), |v| {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-6);
        let psi: Vec<f64> = v.iter().map(|x| x / norm).collect();
        let ipr = state_ipr(&psi);
        prop_assert!(ipr >= 1.0 / psi.len() as f64 - 1e-12 && ipr <= 1.0 + 1e-12);
        Ok(())
    });
    suite(
        r,
        "9e ratios are invariant under affine maps",
        256,
        (prop::collection::vec(0.0..100.0f64, 4..60), 0.01..100.0f64, -1e3..1e3f64),
        |(mut e, a, b)| {
            e.sort_by(f64::total_cmp);
            e.dedup_by(|x, y| (*x - *y).abs() < 1e-6);
            prop_assume!(e.len() >= 3);
            let s = spacing_ratios(&e).unwrap();
            let mapped: Vec<f64> = e.iter().map(|x| a * x + b).collect();
            let m = spacing_ratios(&mapped).unwrap();
            prop_assert_eq!(s.len(), m.len());
            for (x, y) in s.values.iter().zip(&m.values) {
                prop_assert!((x - y).abs() < 1e-8);
            }
            Ok(())
        },
    );
    suite(r, "9f sweeps are deterministic", 4, 0..1000u64, |seed| {
        let config = sweep_config(seed);
        let a = run_sweep(&config, &quiet(1)).unwrap();
        let b = run_sweep(&config, &quiet(3)).unwrap();
        prop_assert_eq!(a.records, b.records);
        prop_assert_eq!(a.points, b.points);
        Ok(())
    });
    suite(r, "9g merging is associative", 4, (0..1000u64, 1..5usize, 1..5usize), |(seed, x, y)| {
        let config = sweep_config(seed);
        let (lo, hi) = (x.min(y), x.max(y) + 1);
        let (a, b, c) = (part(&config, (0, lo)), part(&config, (lo, hi)), part(&config, (hi, 6)));
        let left = merge_results(&merge_results(&a, &b).unwrap(), &c).unwrap();
        let right = merge_results(&a, &merge_results(&b, &c).unwrap()).unwrap();
        let full = run_sweep(&config, &quiet(1)).unwrap();
        prop_assert_eq!(&left.records, &right.records);
        prop_assert_eq!(&left.points, &right.points);
        prop_assert_eq!(&left.records, &full.records);
        prop_assert!(left.is_complete());
        Ok(())
    });
}
