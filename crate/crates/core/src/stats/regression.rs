//! Regression of an outcome on the three sigmas and their pairwise
//! interactions, with a sequential (Type I) ANOVA decomposition.

use alloc::string::ToString;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::linalg::{least_squares, LeastSquares};
use super::special::f_survival;
use crate::error::{Error, Result};
use crate::metrics::RunResult;

/// Predictor names in design order, after the intercept.
pub const PREDICTORS: [&str; 6] = [
    "sigma_d",
    "sigma_rs",
    "sigma_rw",
    "sigma_d:sigma_rs",
    "sigma_d:sigma_rw",
    "sigma_rs:sigma_rw",
];

const MIN_ROWS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Response {
    Cd,
    Spl,
}

impl Response {
    pub fn name(self) -> &'static str {
        match self {
            Response::Cd => "cd",
            Response::Spl => "spl",
        }
    }

    /// The response value, or `None` when the row is excluded.
    pub fn value(self, row: &RunResult) -> Option<f64> {
        if row.failed {
            return None;
        }
        match self {
            Response::Cd => Some(row.cd),
            Response::Spl => row.spl,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegressionFit {
    pub response: Response,
    /// Intercept followed by the six slopes in [`PREDICTORS`] order.
    pub coefficients: [f64; 7],
    pub n_used: usize,
    pub n_excluded: usize,
    pub rss: f64,
    pub tss: f64,
    /// Sequential sum of squares of each predictor, in [`PREDICTORS`] order.
    #[serde(skip)]
    pub sequential_ss: [f64; 6],
}

impl RegressionFit {
    pub fn intercept(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn slopes(&self) -> &[f64] {
        &self.coefficients[1..]
    }
}

/// Design columns: intercept, three sigmas, three pairwise products.
pub fn design_columns(rows: &[&RunResult]) -> Vec<Vec<f64>> {
    let mut cols = alloc::vec![Vec::with_capacity(rows.len()); 7];
    for r in rows {
        let (d, s, w) = (r.sigma_d, r.sigma_rs, r.sigma_rw);
        for (col, v) in cols.iter_mut().zip([1.0, d, s, w, d * s, d * w, s * w]) {
            col.push(v);
        }
    }
    cols
}

/// Ordinary least squares of `response ~ 1 + sd + ss + sw + sd:ss + sd:sw + ss:sw`.
///
/// Failed rows, and rows with undefined `spl` when the response is `spl`,
/// are excluded and counted in `n_excluded`.
pub fn fit_ols(rows: &[RunResult], response: Response) -> Result<RegressionFit> {
    let (used, y): (Vec<&RunResult>, Vec<f64>) = rows
        .iter()
        .filter_map(|r| response.value(r).map(|v| (r, v)))
        .unzip();
    if used.len() < MIN_ROWS {
        return Err(Error::TooFewRows {
            have: used.len(),
            need: MIN_ROWS,
        });
    }
    let cols = design_columns(&used);
    let ls: LeastSquares = least_squares(&cols, &y).map_err(|k| {
        let name = if k == 0 { "intercept" } else { PREDICTORS[k - 1] };
        Error::RankDeficient(name.to_string())
    })?;
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let tss = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    let mut coefficients = [0.0; 7];
    coefficients.copy_from_slice(&ls.coefficients);
    let mut sequential_ss = [0.0; 6];
    for (ss, e) in sequential_ss.iter_mut().zip(&ls.effects[1..]) {
        *ss = e * e;
    }
    Ok(RegressionFit {
        response,
        coefficients,
        n_used: used.len(),
        n_excluded: rows.len() - used.len(),
        rss: ls.rss,
        tss,
        sequential_ss,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnovaRow {
    pub term: &'static str,
    pub ss: f64,
    pub df: usize,
    pub ms: f64,
    /// `+inf` when the error mean square is zero and the term's is not.
    pub f: f64,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualRow {
    pub ss: f64,
    pub df: usize,
    pub ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TotalRow {
    pub ss: f64,
    pub df: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnovaTable {
    pub response: Response,
    pub terms: Vec<AnovaRow>,
    pub error: ResidualRow,
    pub total: TotalRow,
    pub n_excluded: usize,
}

/// Sequential (Type I) ANOVA in [`PREDICTORS`] order.
pub fn anova(rows: &[RunResult], response: Response) -> Result<AnovaTable> {
    Ok(anova_from_fit(&fit_ols(rows, response)?))
}

pub fn anova_from_fit(fit: &RegressionFit) -> AnovaTable {
    let error_df = fit.n_used - 7;
    // residuals at rounding level count as an exact fit
    let exact = fit.rss <= 1e-20 * fit.tss.max(f64::MIN_POSITIVE);
    let error_ms = if error_df > 0 && !exact { fit.rss / error_df as f64 } else { 0.0 };
    let terms = PREDICTORS
        .iter()
        .zip(fit.sequential_ss)
        .map(|(&term, ss)| {
            let (f, p) = if error_ms > 0.0 {
                let f = ss / error_ms;
                (f, f_survival(f, 1.0, error_df as f64))
            } else if ss > 0.0 {
                (f64::INFINITY, 0.0)
            } else {
                (0.0, 1.0)
            };
            AnovaRow { term, ss, df: 1, ms: ss, f, p }
        })
        .collect();
    AnovaTable {
        response: fit.response,
        terms,
        error: ResidualRow {
            ss: fit.rss,
            df: error_df,
            ms: error_ms,
        },
        total: TotalRow {
            ss: fit.tss,
            df: fit.n_used - 1,
        },
        n_excluded: fit.n_excluded,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn row(d: f64, s: f64, w: f64, cd: f64, spl: Option<f64>) -> RunResult {
        RunResult {
            sigma_d: d,
            sigma_rs: s,
            sigma_rw: w,
            run_index: 0,
            seed: 0,
            cd,
            spl,
            edge_count: 0,
            component_count: 1,
            wall_ms: 0,
            failed: false,
        }
    }

    fn grid(f: impl Fn(f64, f64, f64) -> f64) -> Vec<RunResult> {
        let vals = [0.0, 0.25, 0.5];
        let mut rows = Vec::new();
        for d in vals {
            for s in vals {
                for w in vals {
                    rows.push(row(d, s, w, f(d, s, w), Some(f(d, s, w))));
                }
            }
        }
        rows
    }

    #[test]
    fn noise_free_recovery() {
        let rows = grid(|d, _, w| 2.0 + 3.0 * d - w);
        let fit = fit_ols(&rows, Response::Cd).unwrap();
        let want = [2.0, 3.0, 0.0, -1.0, 0.0, 0.0, 0.0];
        for (got, want) in fit.coefficients.iter().zip(want) {
            assert!((got - want).abs() < 1e-9, "{:?}", fit.coefficients);
        }
        assert!(fit.rss < 1e-20);
    }

    #[test]
    fn single_cell_is_rank_deficient() {
        let rows: Vec<RunResult> = (0..10).map(|i| row(0.1, 0.2, 0.3, i as f64, None)).collect();
        assert_eq!(
            fit_ols(&rows, Response::Cd),
            Err(Error::RankDeficient("sigma_d".into()))
        );
    }

    #[test]
    fn too_few_rows() {
        let rows: Vec<RunResult> = (0..5).map(|i| row(i as f64, 0.0, 0.0, 1.0, None)).collect();
        assert!(matches!(fit_ols(&rows, Response::Cd), Err(Error::TooFewRows { have: 5, need: 8 })));
    }

    #[test]
    fn spl_exclusions_reduce_dfs() {
        let mut rows = grid(|d, s, w| 1.0 + d + 0.3 * s * w + 0.01 * (d * 37.0).sin());
        for (i, r) in rows.iter_mut().enumerate() {
            r.cd += 0.01 * ((i * 7 % 11) as f64);
        }
        let full = anova(&rows, Response::Spl).unwrap();
        rows[3].spl = None;
        rows[10].spl = None;
        rows[20].failed = true;
        let reduced = anova(&rows, Response::Spl).unwrap();
        assert_eq!(reduced.n_excluded, 3);
        assert_eq!(full.error.df - reduced.error.df, 3);
        assert_eq!(full.total.df - reduced.total.df, 3);
        let cd = anova(&rows, Response::Cd).unwrap();
        assert_eq!(cd.n_excluded, 1);
    }

    #[test]
    fn zero_error_variance_flags_infinite_f() {
        let rows = grid(|d, s, _| 1.0 + d + s);
        let t = anova(&rows, Response::Cd).unwrap();
        assert!(t.terms[0].f.is_infinite());
        assert_eq!(t.terms[0].p, 0.0);
    }
}
