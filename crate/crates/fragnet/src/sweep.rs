//! Parallel execution of sweep jobs.
//!
//! Workers pull job indices from a shared counter and push finished rows
//! into a mutex-guarded buffer, which is sorted back into job order at the
//! end. Every job carries its own seed, so results do not depend on the
//! worker count or on scheduling.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Instant;

use fragnet_core::{ResultTable, RunJob, RunResult, SimConfig, SweepSpec};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Progress {
    pub cells_done: usize,
    pub cells_total: usize,
    pub runs_done: usize,
    pub runs_total: usize,
    pub runs_per_sec: f64,
}

/// Receives one event per completed cell. Called from worker threads.
pub trait ProgressSink: Sync {
    fn cell_completed(&self, progress: &Progress);
}

/// Discards progress events.
pub struct Silent;

impl ProgressSink for Silent {
    fn cell_completed(&self, _: &Progress) {}
}

/// Runs every job of `spec` and returns the table in canonical order.
pub fn run_sweep(spec: &SweepSpec, sink: &dyn ProgressSink) -> Result<ResultTable> {
    spec.validate()?;
    let jobs: Vec<RunJob> = spec.jobs().collect();
    let rows = run_jobs(&spec.base, &jobs, spec.parallelism, spec.record_timing, sink);
    Ok(ResultTable::new(Some(spec.clone()), rows))
}

/// Runs arbitrary jobs on `parallelism` workers; row `i` belongs to `jobs[i]`.
///
/// A job that errors or panics yields a failed row carrying its seed.
/// Cells are identified by `RunJob::cell_index`.
pub fn run_jobs(
    base: &SimConfig,
    jobs: &[RunJob],
    parallelism: usize,
    record_timing: bool,
    sink: &dyn ProgressSink,
) -> Vec<RunResult> {
    let total = jobs.len();
    let mut cell_sizes: Vec<usize> = Vec::new();
    for job in jobs {
        if job.cell_index >= cell_sizes.len() {
            cell_sizes.resize(job.cell_index + 1, 0);
        }
        cell_sizes[job.cell_index] += 1;
    }
    let cells_total = cell_sizes.iter().filter(|&&n| n > 0).count();
    let cell_done: Vec<AtomicUsize> = cell_sizes.iter().map(|_| AtomicUsize::new(0)).collect();
    let next = AtomicUsize::new(0);
    let runs_done = AtomicUsize::new(0);
    let cells_done = AtomicUsize::new(0);
    let buffer = Mutex::new(Vec::with_capacity(total));
    let started = Instant::now();

    let worker = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        if i >= total {
            break;
        }
        let job = &jobs[i];
        let row = execute(base, job, record_timing);
        buffer.lock().unwrap_or_else(|e| e.into_inner()).push((i, row));
        let done = runs_done.fetch_add(1, Ordering::AcqRel) + 1;
        let in_cell = cell_done[job.cell_index].fetch_add(1, Ordering::AcqRel) + 1;
        if in_cell == cell_sizes[job.cell_index] {
            let cells = cells_done.fetch_add(1, Ordering::AcqRel) + 1;
            let secs = started.elapsed().as_secs_f64();
            sink.cell_completed(&Progress {
                cells_done: cells,
                cells_total,
                runs_done: done,
                runs_total: total,
                runs_per_sec: if secs > 0.0 { done as f64 / secs } else { 0.0 },
            });
        }
    };

    let workers = parallelism.clamp(1, total.max(1));
    if workers == 1 {
        worker();
    } else {
        thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(worker);
            }
        });
    }

    let mut rows = buffer.into_inner().unwrap_or_else(|e| e.into_inner());
    rows.sort_unstable_by_key(|(i, _)| *i);
    rows.into_iter().map(|(_, row)| row).collect()
}

fn execute(base: &SimConfig, job: &RunJob, record_timing: bool) -> RunResult {
    let started = Instant::now();
    match catch_unwind(AssertUnwindSafe(|| job.execute(base))) {
        Ok(Ok(mut row)) => {
            if record_timing {
                row.wall_ms = started.elapsed().as_millis() as u64;
            }
            row
        }
        _ => job.failed_result(),
    }
}
