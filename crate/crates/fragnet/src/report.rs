//! Regression and ANOVA reports in text, CSV and JSON.
//!
//! JSON schema, one object per response inside `{"reports": [...]}`:
//!
//! ```text
//! {
//!   "response": "cd" | "spl",
//!   "n_used": int, "n_excluded": int, "r_squared": float | null,
//!   "coefficients": { "intercept": float, "sigma_d": float, ... },
//!   "anova": {
//!     "terms": [ { "term": str, "ss": float, "df": int, "ms": float, "f": float | null, "p": float } ],
//!     "error": { "ss": float, "df": int, "ms": float },
//!     "total": { "ss": float, "df": int }
//!   }
//! }
//! ```
//!
//! `f` is null when it is infinite (zero error variance).
//!
//! Cell summaries (`--cells`) use the [`CellAggregate`] field names in all
//! three formats; undefined values are empty (CSV), `-` (text) or null.

use std::fmt::Write as _;

use fragnet_core::stats::{anova, fit_ols, AnovaTable, CellAggregate, RegressionFit, Response, PREDICTORS};
use fragnet_core::RunResult;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "text" => Ok(Self::Text),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(format!("unknown report format {s:?} (expected text, csv or json)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResponseReport {
    pub fit: RegressionFit,
    pub anova: AnovaTable,
}

impl ResponseReport {
    pub fn r_squared(&self) -> Option<f64> {
        (self.fit.tss > 0.0).then(|| 1.0 - self.fit.rss / self.fit.tss)
    }
}

pub fn analyze(rows: &[RunResult], responses: &[Response]) -> Result<Vec<ResponseReport>> {
    responses
        .iter()
        .map(|&r| {
            let fit = fit_ols(rows, r).map_err(|e| Error::Input(format!("response {}: {e}", r.name())))?;
            let anova = anova(rows, r)?;
            Ok(ResponseReport { fit, anova })
        })
        .collect()
}

pub fn render(reports: &[ResponseReport], format: ReportFormat) -> String {
    match format {
        ReportFormat::Text => reports.iter().map(text).collect::<Vec<_>>().join("\n"),
        ReportFormat::Csv => csv_report(reports),
        ReportFormat::Json => json_report(reports),
    }
}

/// `<.0001` below 1e-4, four decimals otherwise.
pub fn format_p(p: f64) -> String {
    if p < 1e-4 {
        "<.0001".to_string()
    } else {
        format!("{p:.4}")
    }
}

fn format_f(f: f64) -> String {
    if f.is_infinite() {
        "inf".to_string()
    } else {
        format!("{f:.4}")
    }
}

/// `y = b0 + b1 x1 - b2 x2 ...` with six decimals; `-0.000000` prints as `0.000000`.
pub fn equation(fit: &RegressionFit) -> String {
    let fixed = |v: f64| {
        let s = format!("{:.6}", v.abs());
        let zero = s.bytes().all(|b| b == b'0' || b == b'.');
        (v < 0.0 && !zero, s)
    };
    let (neg, b0) = fixed(fit.intercept());
    let mut out = format!("{} = {}{}", fit.response.name(), if neg { "-" } else { "" }, b0);
    for (name, &b) in PREDICTORS.iter().zip(fit.slopes()) {
        let (neg, s) = fixed(b);
        let _ = write!(out, " {} {} {}", if neg { '-' } else { '+' }, s, name);
    }
    out
}

fn text(r: &ResponseReport) -> String {
    let mut out = String::new();
    let a = &r.anova;
    let _ = writeln!(out, "response: {}", r.fit.response.name());
    let _ = writeln!(out, "rows used: {}", r.fit.n_used);
    let _ = writeln!(out, "excluded rows: {}", r.fit.n_excluded);
    let _ = writeln!(out, "{}", equation(&r.fit));
    match r.r_squared() {
        Some(r2) => {
            let _ = writeln!(out, "R^2 = {r2:.6}");
        }
        None => out.push_str("R^2 = undefined\n"),
    }
    out.push('\n');

    let mut table: Vec<[String; 6]> = vec![["term", "SS", "df", "MS", "F", "p"].map(String::from)];
    for t in &a.terms {
        table.push([
            t.term.to_string(),
            format!("{:.6}", t.ss),
            t.df.to_string(),
            format!("{:.6}", t.ms),
            format_f(t.f),
            format_p(t.p),
        ]);
    }
    table.push([
        "Error".into(),
        format!("{:.6}", a.error.ss),
        a.error.df.to_string(),
        format!("{:.6}", a.error.ms),
        String::new(),
        String::new(),
    ]);
    table.push([
        "Total".into(),
        format!("{:.6}", a.total.ss),
        a.total.df.to_string(),
        String::new(),
        String::new(),
        String::new(),
    ]);
    let mut widths = [0usize; 6];
    for row in &table {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    for row in &table {
        let mut line = format!("{:<w$}", row[0], w = widths[0]);
        for (cell, w) in row.iter().zip(widths).skip(1) {
            let _ = write!(line, "  {cell:>w$}");
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn csv_report(reports: &[ResponseReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = ["response", "term", "estimate", "ss", "df", "ms", "f", "p", "n_used", "n_excluded"];
    w.write_record(header).expect("in-memory CSV");
    for r in reports {
        let (name, used, excl) = (r.fit.response.name(), r.fit.n_used.to_string(), r.fit.n_excluded.to_string());
        let mut rec = |fields: [String; 6], est: String| {
            let [term, ss, df, ms, f, p] = fields;
            w.write_record([name.to_string(), term, est, ss, df, ms, f, p, used.clone(), excl.clone()])
                .expect("in-memory CSV");
        };
        let e = String::new;
        rec(["intercept".into(), e(), e(), e(), e(), e()], r.fit.intercept().to_string());
        for (t, b) in r.anova.terms.iter().zip(r.fit.slopes()) {
            let f = if t.f.is_infinite() { "inf".to_string() } else { t.f.to_string() };
            rec(
                [t.term.into(), t.ss.to_string(), t.df.to_string(), t.ms.to_string(), f, t.p.to_string()],
                b.to_string(),
            );
        }
        let err = &r.anova.error;
        rec(["Error".into(), err.ss.to_string(), err.df.to_string(), err.ms.to_string(), e(), e()], e());
        let tot = &r.anova.total;
        rec(["Total".into(), tot.ss.to_string(), tot.df.to_string(), e(), e(), e()], e());
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("CSV is UTF-8")
}

#[derive(Serialize)]
struct JsonReport<'a> {
    response: &'static str,
    n_used: usize,
    n_excluded: usize,
    r_squared: Option<f64>,
    coefficients: serde_json::Map<String, serde_json::Value>,
    anova: &'a AnovaTable,
}

fn json_report(reports: &[ResponseReport]) -> String {
    let items: Vec<JsonReport> = reports
        .iter()
        .map(|r| {
            let mut coefficients = serde_json::Map::new();
            let names = std::iter::once("intercept").chain(PREDICTORS);
            for (name, b) in names.zip(r.fit.coefficients) {
                coefficients.insert(name.to_string(), serde_json::json!(b));
            }
            JsonReport {
                response: r.fit.response.name(),
                n_used: r.fit.n_used,
                n_excluded: r.fit.n_excluded,
                r_squared: r.r_squared(),
                coefficients,
                anova: &r.anova,
            }
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&serde_json::json!({ "reports": items })).expect("report serializes");
    s.push('\n');
    s
}

pub fn render_cells(cells: &[CellAggregate], format: ReportFormat) -> String {
    let opt = |v: Option<f64>, empty: &str| v.map_or_else(|| empty.to_string(), |v| v.to_string());
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(&serde_json::json!({ "cells": cells })).expect("cells serialize");
            s.push('\n');
            s
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CELL_COLUMNS).expect("in-memory CSV");
            for c in cells {
                w.write_record([
                    c.sigma_d.to_string(),
                    c.sigma_rs.to_string(),
                    c.sigma_rw.to_string(),
                    c.runs.to_string(),
                    c.failed.to_string(),
                    opt(c.cd_mean, ""),
                    opt(c.cd_sd, ""),
                    opt(c.spl_mean, ""),
                    opt(c.spl_sd, ""),
                    c.spl_undefined.to_string(),
                ])
                .expect("in-memory CSV");
            }
            String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("CSV is UTF-8")
        }
        ReportFormat::Text => {
            let fixed = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
            let mut out = CELL_COLUMNS.join("  ");
            out.push('\n');
            for c in cells {
                let _ = writeln!(
                    out,
                    "{}  {}  {}  {}  {}  {}  {}  {}  {}  {}",
                    c.sigma_d,
                    c.sigma_rs,
                    c.sigma_rw,
                    c.runs,
                    c.failed,
                    fixed(c.cd_mean),
                    fixed(c.cd_sd),
                    fixed(c.spl_mean),
                    fixed(c.spl_sd),
                    c.spl_undefined
                );
            }
            out
        }
    }
}

const CELL_COLUMNS: [&str; 10] = [
    "sigma_d",
    "sigma_rs",
    "sigma_rw",
    "runs",
    "failed",
    "cd_mean",
    "cd_sd",
    "spl_mean",
    "spl_sd",
    "spl_undefined",
];

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(f: impl Fn(f64, f64, f64) -> f64) -> Vec<RunResult> {
        let vals = [0.0, 0.25, 0.5];
        let mut out = Vec::new();
        for d in vals {
            for s in vals {
                for w in vals {
                    let y = f(d, s, w);
                    out.push(RunResult {
                        sigma_d: d,
                        sigma_rs: s,
                        sigma_rw: w,
                        run_index: 0,
                        seed: 0,
                        cd: y,
                        spl: (d < 0.5).then_some(y),
                        edge_count: 1,
                        component_count: 1,
                        wall_ms: 0,
                        failed: false,
                    });
                }
            }
        }
        out
    }

    #[test]
    fn p_value_display() {
        assert_eq!(format_p(3e-5), "<.0001");
        assert_eq!(format_p(0.0), "<.0001");
        assert_eq!(format_p(0.0123), "0.0123");
    }

    #[test]
    fn equation_prints_signs_and_zeroes() {
        let r = analyze(&rows(|d, _, w| 2.0 + 3.0 * d - 0.5 * w), &[Response::Cd]).unwrap();
        let eq = equation(&r[0].fit);
        assert!(eq.starts_with("cd = 2.000000 + 3.000000 sigma_d + 0.000000 sigma_rs - 0.500000 sigma_rw"), "{eq}");
    }

    #[test]
    fn text_report_notes_exclusions() {
        let noisy = |d: f64, s: f64, w: f64| 1.0 + d + (17.0 * d + 5.0 * s + 3.0 * w).sin() * 0.1;
        let r = analyze(&rows(noisy), &[Response::Cd, Response::Spl]).unwrap();
        let t = render(&r, ReportFormat::Text);
        assert!(t.contains("excluded rows: 0\n") && t.contains("excluded rows: 9\n"), "{t}");
        assert!(t.contains("\nError ") && t.contains("\nTotal "));
    }

    #[test]
    fn csv_and_json_shapes() {
        let noisy = |d: f64, s: f64, w: f64| 1.0 + d + (17.0 * d + 5.0 * s + 3.0 * w).sin() * 0.1;
        let r = analyze(&rows(noisy), &[Response::Cd]).unwrap();
        let csv = render(&r, ReportFormat::Csv);
        assert_eq!(csv.lines().count(), 1 + 1 + 6 + 2);
        let json: serde_json::Value = serde_json::from_str(&render(&r, ReportFormat::Json)).unwrap();
        let rep = &json["reports"][0];
        assert_eq!(rep["anova"]["terms"].as_array().unwrap().len(), 6);
        assert_eq!(rep["n_used"], 27);
        assert!(rep["coefficients"]["sigma_rs:sigma_rw"].is_number());
    }
}
