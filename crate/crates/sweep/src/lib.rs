//! Deterministic, resumable sweeps of disorder ensembles over parameter grids.
//!
//! A sweep is a set of tasks keyed by grid point and realization. Every task
//! draws its disorder from a seed derived from that key alone, so results do
//! not depend on scheduling, thread count or how the ensemble was split.

pub mod aggregate;
pub mod checkpoint;
pub mod config;
pub mod error;
pub mod export;
pub mod pipeline;
pub mod record;
pub mod run;

pub use aggregate::{Estimate, KlAggregate, PointAggregate, WalshAggregate};
pub use checkpoint::{read_checkpoint, CheckpointHeader};
pub use config::{task_seed, Axis, Diagnostic, Param, PointParams, SweepConfig, SystemSpec};
pub use error::{Result, SweepError};
pub use pipeline::PreparedSweep;
pub use record::{Outcome, TaskKey, TaskKind, TaskRecord};
pub use run::{merge_results, resume_sweep, run_sweep, Provenance, RunOptions, SweepResult};
