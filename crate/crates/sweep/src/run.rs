//! Parallel execution, resumption and merging of sweeps.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aggregate::{aggregate, check_failures, PointAggregate};
use crate::checkpoint::{read_checkpoint, CheckpointHeader, CheckpointWriter};
use crate::config::SweepConfig;
use crate::error::{Result, SweepError};
use crate::pipeline::PreparedSweep;
use crate::record::{TaskKey, TaskRecord};

pub const THREADS_ENV: &str = "TRANSMON_THREADS";
pub const RAM_ENV: &str = "TRANSMON_RAM_GB";
/// Share of the RAM cap that tasks may hold at once.
pub const MEMORY_FRACTION: f64 = 0.75;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub threads: usize,
    pub tasks_run: usize,
    pub tasks_resumed: usize,
}

impl Provenance {
    fn merged(a: &Provenance, b: &Provenance) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix: a.started_unix.min(b.started_unix),
            finished_unix: a.finished_unix.max(b.finished_unix),
            threads: a.threads.max(b.threads),
            tasks_run: a.tasks_run + b.tasks_run,
            tasks_resumed: a.tasks_resumed + b.tasks_resumed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub config_hash: String,
    pub provenance: Provenance,
    /// Sorted by key.
    pub records: Vec<TaskRecord>,
    pub points: Vec<PointAggregate>,
}

impl SweepResult {
    pub fn from_records(config: &SweepConfig, mut records: Vec<TaskRecord>, provenance: Provenance) -> Self {
        records.sort_by_key(|r| r.key);
        let points = aggregate(config, &records);
        Self { config: config.clone(), config_hash: config.hash(), provenance, records, points }
    }

    pub fn point(&self, i: usize, j: usize) -> Option<&PointAggregate> {
        self.points.iter().find(|p| p.i == i && p.j == j)
    }

    pub fn failed_tasks(&self) -> usize {
        self.records.iter().filter(|r| r.failed()).count()
    }

    pub fn is_complete(&self) -> bool {
        let expected = PreparedSweep::new(&self.config.identity()).map(|p| p.tasks().len()).unwrap_or(0);
        self.records.len() == expected
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; otherwise the environment, otherwise every core.
    pub threads: Option<usize>,
    /// RAM cap in GB; otherwise the environment, otherwise physical memory.
    pub ram_gb: Option<f64>,
    pub checkpoint: Option<PathBuf>,
    /// Prints a progress line to stderr about every 5% of tasks.
    pub progress: bool,
}

fn env_parse<T: std::str::FromStr>(name: &str) -> Result<Option<T>> {
    match std::env::var(name) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| SweepError::Config(format!("cannot parse {name}={v}"))),
        Err(_) => Ok(None),
    }
}

fn physical_ram_gb() -> Option<f64> {
    let info = std::fs::read_to_string("/proc/meminfo").ok()?;
    let line = info.lines().find(|l| l.starts_with("MemTotal:"))?;
    let kb: f64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb / (1024.0 * 1024.0))
}

impl RunOptions {
    pub fn resolved_threads(&self) -> Result<usize> {
        let n = match self.threads {
            Some(n) => n,
            None => match env_parse::<usize>(THREADS_ENV)? {
                Some(n) => n,
                None => std::thread::available_parallelism().map_or(1, |n| n.get()),
            },
        };
        if n == 0 {
            return Err(SweepError::Config("thread count must be at least 1".into()));
        }
        Ok(n)
    }

    /// Bytes that running tasks may occupy together.
    pub fn memory_budget(&self) -> Result<f64> {
        let gb = match self.ram_gb {
            Some(g) => Some(g),
            None => env_parse::<f64>(RAM_ENV)?,
        }
        .or_else(physical_ram_gb)
        .unwrap_or(4.0);
        if !(gb > 0.0) {
            return Err(SweepError::Config(format!("RAM cap must be positive, got {gb}")));
        }
        Ok(gb * MEMORY_FRACTION * 1e9)
    }

    /// Threads actually used: the requested count, reduced to fit the memory budget.
    pub fn plan_threads(&self, prepared: &PreparedSweep) -> Result<usize> {
        let budget = self.memory_budget()?;
        let per_task = prepared.task_bytes() as f64;
        let fit = (budget / per_task).floor() as usize;
        if fit == 0 {
            return Err(SweepError::MemoryBudget { needed_gb: per_task / 1e9, budget_gb: budget / 1e9 });
        }
        Ok(self.resolved_threads()?.min(fit))
    }
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Runs `todo`, streaming each record through a single writer thread.
fn execute(
    prepared: &PreparedSweep,
    todo: &[TaskKey],
    threads: usize,
    mut writer: Option<CheckpointWriter>,
    progress: bool,
) -> Result<Vec<TaskRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| SweepError::Config(format!("thread pool: {e}")))?;
    let total = todo.len();
    let (tx, rx) = mpsc::channel::<TaskRecord>();
    std::thread::scope(|scope| {
        let sink = scope.spawn(move || -> Result<Vec<TaskRecord>> {
            let mut out = Vec::with_capacity(total);
            let step = (total / 20).max(1);
            let mut failure = None;
            for record in rx {
                if let (Some(w), None) = (writer.as_mut(), &failure) {
                    if let Err(e) = w.write(&record) {
                        failure = Some(e);
                    }
                }
                out.push(record);
                if progress && (out.len() % step == 0 || out.len() == total) {
                    eprintln!("  {}/{} tasks", out.len(), total);
                }
            }
            if let Some(w) = writer.as_mut() {
                w.flush()?;
            }
            match failure {
                Some(e) => Err(e),
                None => Ok(out),
            }
        });
        pool.install(|| {
            todo.par_iter().for_each_with(tx, |tx, &key| {
                let _ = tx.send(prepared.run_task(key));
            });
        });
        sink.join().expect("writer thread panicked")
    })
}

fn finish(config: &SweepConfig, records: Vec<TaskRecord>, provenance: Provenance) -> Result<SweepResult> {
    let result = SweepResult::from_records(config, records, provenance);
    check_failures(&result.points)?;
    Ok(result)
}

/// Runs every task of the config, writing a fresh checkpoint when requested.
pub fn run_sweep(config: &SweepConfig, options: &RunOptions) -> Result<SweepResult> {
    let started = now();
    let prepared = PreparedSweep::new(config)?;
    let threads = options.plan_threads(&prepared)?;
    let writer = match &options.checkpoint {
        Some(path) => Some(CheckpointWriter::create(
            path,
            &CheckpointHeader::new(&prepared.config),
            prepared.config.checkpoint_interval,
        )?),
        None => None,
    };
    let todo = prepared.tasks();
    let records = execute(&prepared, &todo, threads, writer, options.progress)?;
    let provenance = Provenance {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix: started,
        finished_unix: now(),
        threads,
        tasks_run: records.len(),
        tasks_resumed: 0,
    };
    finish(&prepared.config, records, provenance)
}

/// Completes the tasks missing from the checkpoint at `path`.
///
/// With `expected`, the checkpoint must have been written for a config with
/// the same identity.
pub fn resume_sweep(path: &Path, expected: Option<&SweepConfig>, options: &RunOptions) -> Result<SweepResult> {
    let started = now();
    let (header, done) = read_checkpoint(path)?;
    let actual = header.config.hash();
    if actual != header.config_hash {
        return Err(SweepError::CorruptCheckpoint {
            line: 1,
            reason: format!("header hash {} does not match its config ({actual})", header.config_hash),
        });
    }
    if let Some(config) = expected {
        let want = config.hash();
        if want != header.config_hash {
            return Err(SweepError::ConfigMismatch { expected: want, found: header.config_hash });
        }
    }
    let prepared = PreparedSweep::new(&header.config)?;
    let threads = options.plan_threads(&prepared)?;
    let seen: BTreeSet<TaskKey> = done.iter().map(|r| r.key).collect();
    let todo: Vec<TaskKey> = prepared.tasks().into_iter().filter(|k| !seen.contains(k)).collect();
    let writer = CheckpointWriter::append(path, prepared.config.checkpoint_interval)?;
    let fresh = execute(&prepared, &todo, threads, Some(writer), options.progress)?;
    let provenance = Provenance {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix: started,
        finished_unix: now(),
        threads,
        tasks_run: fresh.len(),
        tasks_resumed: done.len(),
    };
    let mut records = done;
    records.extend(fresh);
    finish(&prepared.config, records, provenance)
}

fn union_range(a: &SweepConfig, b: &SweepConfig) -> Option<(usize, usize)> {
    let ra = a.realization_indices();
    let rb = b.realization_indices();
    let lo = ra.start.min(rb.start);
    let hi = ra.end.max(rb.end);
    if lo == 0 && hi == a.realizations {
        None
    } else {
        Some((lo, hi))
    }
}

/// Union of two results over disjoint task sets of the same config identity.
pub fn merge_results(a: &SweepResult, b: &SweepResult) -> Result<SweepResult> {
    if a.config_hash != b.config_hash {
        return Err(SweepError::ConfigMismatch { expected: a.config_hash.clone(), found: b.config_hash.clone() });
    }
    let keys: BTreeSet<TaskKey> = a.records.iter().map(|r| r.key).collect();
    let shared: Vec<TaskKey> = b.records.iter().map(|r| r.key).filter(|k| keys.contains(k)).collect();
    if let Some(first) = shared.iter().min() {
        return Err(SweepError::Overlap { count: shared.len(), first: first.to_string() });
    }
    let mut config = a.config.identity();
    config.realization_range = union_range(&a.config, &b.config);
    let records = a.records.iter().chain(&b.records).cloned().collect();
    Ok(SweepResult::from_records(&config, records, Provenance::merged(&a.provenance, &b.provenance)))
}
