use std::sync::OnceLock;

use proptest::prelude::*;
use transmon_sweep::export::{parse_csv, read_json, to_csv, write_json, CSV_HEADER};
use transmon_sweep::{
    merge_results, resume_sweep, run_sweep, Outcome, Provenance, RunOptions, SweepConfig, SweepError, SweepResult,
    TaskKind,
};

fn spectral_config() -> SweepConfig {
    SweepConfig::from_json(
        r#"{
            "system": {"geometry": "chain:4", "e_c": 0.25, "scheme": "a", "bundle": 2},
            "axes": [{"name": "e_j", "values": [20, 40]}, {"name": "t", "values": [0.002, 0.02]}],
            "realizations": 6,
            "diagnostics": ["kl", "ipr", "levels"],
            "bins": 4,
            "master_seed": 11
        }"#,
    )
    .unwrap()
}

fn walsh_config() -> SweepConfig {
    SweepConfig::from_json(
        r#"{
            "system": {"geometry": "chain:3", "e_c": 0.25, "e_j": 12.5, "scheme": "b", "bundle": 1},
            "axes": [{"name": "t", "values": [0.001, 0.003]}],
            "realizations": 3,
            "diagnostics": ["walsh"],
            "walsh": {"levels": 3},
            "master_seed": 5
        }"#,
    )
    .unwrap()
}

fn options(threads: usize) -> RunOptions {
    RunOptions { threads: Some(threads), ram_gb: Some(4.0), ..Default::default() }
}

fn full() -> &'static SweepResult {
    static FULL: OnceLock<SweepResult> = OnceLock::new();
    FULL.get_or_init(|| run_sweep(&spectral_config(), &options(1)).unwrap())
}

fn same_science(a: &SweepResult, b: &SweepResult) {
    assert_eq!(a.config_hash, b.config_hash);
    assert_eq!(a.records, b.records);
    assert_eq!(a.points, b.points);
}

#[test]
fn covers_every_task() {
    let r = full();
    assert_eq!(r.records.len(), 2 * 2 * 6);
    assert!(r.is_complete());
    assert_eq!(r.failed_tasks(), 0);
    for p in &r.points {
        assert_eq!(p.tasks, 6);
        let kl = p.kl.as_ref().unwrap();
        assert!(kl.samples > 0);
        assert_eq!(p.ipr.as_ref().unwrap().count, 6);
        assert!(p.levels.is_some());
    }
}

#[test]
fn thread_count_does_not_change_results() {
    same_science(full(), &run_sweep(&spectral_config(), &options(3)).unwrap());
}

#[test]
fn halves_merge_to_the_full_run() {
    let mut a = spectral_config();
    a.realization_range = Some((0, 2));
    let mut b = spectral_config();
    b.realization_range = Some((2, 6));
    let ra = run_sweep(&a, &options(2)).unwrap();
    let rb = run_sweep(&b, &options(2)).unwrap();
    assert!(!ra.is_complete());
    let merged = merge_results(&ra, &rb).unwrap();
    same_science(&merged, full());
    assert!(merged.config.realization_range.is_none());
    assert!(matches!(merge_results(&ra, &ra), Err(SweepError::Overlap { .. })));
}

#[test]
fn resume_after_interruption_matches_a_clean_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ck.jsonl");
    let opts = RunOptions { checkpoint: Some(path.clone()), ..options(2) };
    run_sweep(&spectral_config(), &opts).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 24);
    let mut cut = lines[..10].join("\n");
    cut.push('\n');
    cut.push_str(&lines[10][..lines[10].len() / 2]);
    std::fs::write(&path, cut).unwrap();

    let resumed = resume_sweep(&path, Some(&spectral_config()), &options(2)).unwrap();
    same_science(&resumed, full());
    assert_eq!(resumed.provenance.tasks_resumed, 9);
    assert_eq!(resumed.provenance.tasks_run, 15);
    let again = resume_sweep(&path, None, &options(1)).unwrap();
    assert_eq!(again.provenance.tasks_run, 0);
    same_science(&again, full());
}

#[test]
fn resume_rejects_a_different_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ck.jsonl");
    let mut small = spectral_config();
    small.realizations = 1;
    run_sweep(&small, &RunOptions { checkpoint: Some(path.clone()), ..options(1) }).unwrap();
    let mut other = small.clone();
    other.master_seed += 1;
    assert!(matches!(resume_sweep(&path, Some(&other), &options(1)), Err(SweepError::ConfigMismatch { .. })));
}

#[test]
fn merge_rejects_different_configs() {
    let mut other = spectral_config();
    other.master_seed = 12;
    other.realizations = 1;
    other.realization_range = None;
    let a = run_sweep(&other, &options(1)).unwrap();
    assert!(matches!(merge_results(&a, full()), Err(SweepError::ConfigMismatch { .. })));
}

#[test]
fn mostly_failing_points_abort_the_sweep() {
    let mut c = spectral_config();
    c.axes[0].values = vec![2.0];
    c.realizations = 2;
    match run_sweep(&c, &options(1)) {
        Err(SweepError::TooManyFailures { failed, total, .. }) => assert_eq!((failed, total), (2, 2)),
        other => panic!("expected failure, got {other:?}"),
    }
}

#[test]
fn memory_budget_is_enforced() {
    let opts = RunOptions { ram_gb: Some(1e-6), ..options(1) };
    assert!(matches!(run_sweep(&spectral_config(), &opts), Err(SweepError::MemoryBudget { .. })));
}

#[test]
fn walsh_sweep_tracks_the_coupling_axis() {
    let r = run_sweep(&walsh_config(), &options(2)).unwrap();
    assert_eq!(r.records.len(), 3);
    assert!(r.records.iter().all(|x| x.key.kind == TaskKind::Walsh && x.key.i == 0));
    for rec in &r.records {
        let Outcome::Walsh(w) = &rec.outcome else { panic!("{rec:?}") };
        assert_eq!(w.points.len(), 2);
        assert_eq!(w.points[0].coefficients.len(), 8);
    }
    let low = r.point(0, 0).unwrap().walsh.as_ref().unwrap();
    let high = r.point(1, 0).unwrap().walsh.as_ref().unwrap();
    assert_eq!(low.included + low.excluded, 3);
    let zz = |w: &transmon_sweep::WalshAggregate| w.nearest_neighbour().unwrap().mean;
    assert!(zz(high) > zz(low), "{} vs {}", zz(high), zz(low));
    assert!(low.by_distance.contains_key(&2));
}

#[test]
fn exports_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    write_json(full(), &path).unwrap();
    assert_eq!(&read_json(&path).unwrap(), full());
    let csv = to_csv(full());
    let mut lines = csv.lines().skip(1);
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4 * 7);
    assert!(rows.iter().all(|r| r.split(',').count() == 9));
    assert!(rows.iter().any(|r| r.contains(",ipr,")));
    let parsed = parse_csv(&csv).unwrap();
    assert_eq!(parsed.len(), rows.len());
    let ipr = parsed.iter().find(|r| r.diagnostic == "ipr" && r.i == 1 && r.j == 1).unwrap();
    let p = full().point(1, 1).unwrap();
    assert_eq!(ipr.value, Some(p.ipr.as_ref().unwrap().mean));
    assert_eq!(ipr.count, Some(6));
    assert_eq!((ipr.e_j, ipr.t), (40.0, 0.02));
    assert!(parse_csv(&csv.replacen("v1", "v9", 1)).is_err());
}

fn part(owner: &[u8], which: u8) -> SweepResult {
    let records = full().records.iter().zip(owner).filter(|(_, &o)| o == which).map(|(r, _)| r.clone()).collect();
    let provenance = Provenance {
        tool_version: String::new(),
        started_unix: 0,
        finished_unix: 0,
        threads: 1,
        tasks_run: 0,
        tasks_resumed: 0,
    };
    SweepResult::from_records(&spectral_config(), records, provenance)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn merging_is_commutative_and_associative(owner in proptest::collection::vec(0u8..3, 24)) {
        let (a, b, c) = (part(&owner, 0), part(&owner, 1), part(&owner, 2));
        let ab = merge_results(&a, &b).unwrap();
        let ba = merge_results(&b, &a).unwrap();
        prop_assert_eq!(&ab.records, &ba.records);
        prop_assert_eq!(&ab.points, &ba.points);
        let left = merge_results(&ab, &c).unwrap();
        let right = merge_results(&a, &merge_results(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(&left.points, &right.points);
        prop_assert_eq!(&left.points, &full().points);
        prop_assert_eq!(&left.records, &full().records);
    }
}
