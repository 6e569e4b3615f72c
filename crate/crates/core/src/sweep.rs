//! The sigma grid: cells, per-run jobs and the result table.
//!
//! Execution (threads, timing, persistence) lives in the std companion
//! crate; everything here is deterministic bookkeeping.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::engine::{self, SimConfig};
use crate::error::Result;
use crate::metrics::RunResult;
use crate::model::DiversityParams;
use crate::seed::derive_seed;

pub const RESULTS_FORMAT_VERSION: u32 = 1;

pub const DEFAULT_SIGMA_VALUES: [f64; 6] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Applied to each of the three sigmas; the grid is the cartesian cube.
    pub sigma_values: Vec<f64>,
    pub runs_per_cell: u32,
    /// Template for every run. Its sigmas and seed are overridden per job.
    pub base: SimConfig,
    pub master_seed: u64,
    pub parallelism: usize,
    /// Record wall-clock milliseconds per run. Off by default so that
    /// persisted tables are byte-reproducible.
    pub record_timing: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            sigma_values: DEFAULT_SIGMA_VALUES.to_vec(),
            runs_per_cell: 100,
            base: SimConfig::default(),
            master_seed: 0,
            parallelism: 1,
            record_timing: false,
        }
    }
}

/// One run of the sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunJob {
    pub cell_index: usize,
    pub run_index: u32,
    pub sigma_d: f64,
    pub sigma_rs: f64,
    pub sigma_rw: f64,
    pub seed: u64,
}

impl RunJob {
    pub fn config(&self, base: &SimConfig) -> SimConfig {
        SimConfig {
            diversity: DiversityParams {
                sigma_d: self.sigma_d,
                sigma_s: self.sigma_rs,
                sigma_w: self.sigma_rw,
                ..base.diversity
            },
            seed: self.seed,
            ..base.clone()
        }
    }

    /// Runs the job; timing is left to the caller.
    pub fn execute(&self, base: &SimConfig) -> Result<RunResult> {
        let (_, mut result) = engine::run(&self.config(base))?;
        result.run_index = self.run_index;
        Ok(result)
    }

    pub fn failed_result(&self) -> RunResult {
        RunResult::failed(self.sigma_d, self.sigma_rs, self.sigma_rw, self.run_index, self.seed)
    }
}

impl SweepSpec {
    pub fn cell_count(&self) -> usize {
        self.sigma_values.len().pow(3)
    }

    pub fn total_runs(&self) -> usize {
        self.cell_count() * self.runs_per_cell as usize
    }

    /// `(sigma_d, sigma_rs, sigma_rw)` for a cell; sigma_d varies slowest.
    pub fn cell_sigmas(&self, cell_index: usize) -> [f64; 3] {
        let k = self.sigma_values.len();
        [
            self.sigma_values[cell_index / (k * k)],
            self.sigma_values[(cell_index / k) % k],
            self.sigma_values[cell_index % k],
        ]
    }

    /// The `i`-th job in canonical (cell, run) order.
    pub fn job(&self, i: usize) -> RunJob {
        let per = self.runs_per_cell as usize;
        let cell_index = i / per;
        let run_index = (i % per) as u32;
        let [sigma_d, sigma_rs, sigma_rw] = self.cell_sigmas(cell_index);
        RunJob {
            cell_index,
            run_index,
            sigma_d,
            sigma_rs,
            sigma_rw,
            seed: derive_seed(self.master_seed, cell_index as u64, run_index as u64),
        }
    }

    pub fn jobs(&self) -> impl Iterator<Item = RunJob> + '_ {
        (0..self.total_runs()).map(|i| self.job(i))
    }

    pub fn validate(&self) -> Result<()> {
        use crate::error::Error;
        if self.sigma_values.is_empty() {
            return Err(Error::InvalidConfig {
                field: "sigma_values",
                reason: "must not be empty".into(),
            });
        }
        if let Some(v) = self.sigma_values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidConfig {
                field: "sigma_values",
                reason: alloc::format!("every value must be finite and >= 0, got {v}"),
            });
        }
        if self.runs_per_cell == 0 {
            return Err(Error::InvalidConfig {
                field: "runs_per_cell",
                reason: "must be >= 1".into(),
            });
        }
        if self.parallelism == 0 {
            return Err(Error::InvalidConfig {
                field: "parallelism",
                reason: "must be >= 1".into(),
            });
        }
        self.base.validate()
    }
}

/// All run records of a sweep in canonical (cell, run) order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub version: u32,
    pub spec: Option<SweepSpec>,
    pub rows: Vec<RunResult>,
}

impl ResultTable {
    pub fn new(spec: Option<SweepSpec>, rows: Vec<RunResult>) -> Self {
        Self {
            version: RESULTS_FORMAT_VERSION,
            spec,
            rows,
        }
    }

    pub fn failed_count(&self) -> usize {
        self.rows.iter().filter(|r| r.failed).count()
    }

    pub fn undefined_spl_count(&self) -> usize {
        self.rows.iter().filter(|r| !r.failed && r.spl.is_none()).count()
    }

    /// True when every expected row is present and none failed.
    pub fn is_complete(&self) -> bool {
        let expected = self.spec.as_ref().map_or(self.rows.len(), SweepSpec::total_runs);
        self.rows.len() == expected && self.failed_count() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_ordering() {
        let spec = SweepSpec {
            sigma_values: alloc::vec![0.0, 0.5],
            runs_per_cell: 2,
            ..SweepSpec::default()
        };
        assert_eq!(spec.total_runs(), 16);
        let jobs: Vec<RunJob> = spec.jobs().collect();
        assert_eq!(jobs.len(), 16);
        assert_eq!((jobs[0].cell_index, jobs[0].run_index), (0, 0));
        assert_eq!((jobs[3].cell_index, jobs[3].run_index), (1, 1));
        assert_eq!(spec.cell_sigmas(1), [0.0, 0.0, 0.5]);
        assert_eq!(spec.cell_sigmas(2), [0.0, 0.5, 0.0]);
        assert_eq!(spec.cell_sigmas(4), [0.5, 0.0, 0.0]);
        let seeds: alloc::collections::BTreeSet<u64> = jobs.iter().map(|j| j.seed).collect();
        assert_eq!(seeds.len(), 16);
    }

    #[test]
    fn default_grid_counts() {
        assert_eq!(SweepSpec::default().total_runs(), 21_600);
        assert_eq!(SweepSpec::default().cell_count(), 216);
    }

    #[test]
    fn job_config_overrides_sigmas_and_seed() {
        let spec = SweepSpec {
            sigma_values: alloc::vec![0.1, 0.3],
            runs_per_cell: 1,
            ..SweepSpec::default()
        };
        let job = spec.job(5);
        let c = job.config(&spec.base);
        assert_eq!(c.diversity.sigma_d, 0.3);
        assert_eq!(c.diversity.sigma_s, 0.1);
        assert_eq!(c.diversity.sigma_w, 0.3);
        assert_eq!(c.diversity.mean_d, 0.5);
        assert_eq!(c.seed, job.seed);
    }

    #[test]
    fn rejects_empty_grid() {
        let spec = SweepSpec {
            sigma_values: alloc::vec![],
            ..SweepSpec::default()
        };
        assert!(spec.validate().is_err());
    }
}
