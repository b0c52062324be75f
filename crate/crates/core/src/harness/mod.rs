//! Worst-case drivers, the minimax oracle and grid verification.

pub mod enumerate;
pub mod grid;
pub mod minimax;
pub mod worst;

use std::sync::OnceLock;

use rayon::{ThreadPool, ThreadPoolBuilder};

pub use grid::{bound_checks, verify_grid, BoundCheck, GridReport, GridViolation, SCHEMA_VERSION};
pub use minimax::{minimax_m, MinimaxLimits, MinimaxState};
pub use worst::{worst_case, AnalysisSummary, Mode, WorstCaseCell, WorstCaseOptions};

/// Environment variable overriding the worker count.
pub const WORKERS_VAR: &str = "GTLAB_WORKERS";

/// Worker threads for enumeration: `GTLAB_WORKERS` when set to a positive
/// integer, the available parallelism otherwise.
pub fn worker_count() -> usize {
    std::env::var(WORKERS_VAR)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()))
}

fn pool() -> &'static ThreadPool {
    static POOL: OnceLock<ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        ThreadPoolBuilder::new()
            .num_threads(worker_count())
            .build()
            .expect("thread pool")
    })
}
