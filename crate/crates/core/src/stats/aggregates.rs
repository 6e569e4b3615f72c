//! Per-cell summaries of a result table.

use alloc::vec::Vec;

use serde::Serialize;

use crate::metrics::RunResult;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellAggregate {
    pub sigma_d: f64,
    pub sigma_rs: f64,
    pub sigma_rw: f64,
    pub runs: usize,
    pub failed: usize,
    pub cd_mean: Option<f64>,
    pub cd_sd: Option<f64>,
    pub spl_mean: Option<f64>,
    pub spl_sd: Option<f64>,
    pub spl_undefined: usize,
}

/// Mean and sample standard deviation. The sd needs two values.
pub fn mean_sd(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (Some(mean), None);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (Some(mean), Some(libm::sqrt(var)))
}

/// One summary per distinct `(sigma_d, sigma_rs, sigma_rw)`, ordered by the
/// sigma triple.
pub fn cell_aggregates(rows: &[RunResult]) -> Vec<CellAggregate> {
    let mut sorted: Vec<&RunResult> = rows.iter().collect();
    sorted.sort_by(|a, b| {
        a.sigma_d
            .total_cmp(&b.sigma_d)
            .then(a.sigma_rs.total_cmp(&b.sigma_rs))
            .then(a.sigma_rw.total_cmp(&b.sigma_rw))
    });
    sorted
        .chunk_by(|a, b| a.sigmas() == b.sigmas())
        .map(|cell| {
            let ok: Vec<&&RunResult> = cell.iter().filter(|r| !r.failed).collect();
            let cds: Vec<f64> = ok.iter().map(|r| r.cd).collect();
            let spls: Vec<f64> = ok.iter().filter_map(|r| r.spl).collect();
            let (cd_mean, cd_sd) = mean_sd(&cds);
            let (spl_mean, spl_sd) = mean_sd(&spls);
            CellAggregate {
                sigma_d: cell[0].sigma_d,
                sigma_rs: cell[0].sigma_rs,
                sigma_rw: cell[0].sigma_rw,
                runs: cell.len(),
                failed: cell.len() - ok.len(),
                cd_mean,
                cd_sd,
                spl_mean,
                spl_sd,
                spl_undefined: ok.len() - spls.len(),
            }
        })
        .collect()
}
