//! Result files.
//!
//! # CSV
//!
//! Header row, then one row per run with the columns of [`CSV_COLUMNS`].
//! Floats use the shortest representation that parses back to the same
//! value. An empty `spl` means the final network was disconnected. A failed
//! run has empty `cd`, `spl`, `edge_count` and `component_count` fields.
//! On load, columns are matched by name and may appear in any order.
//!
//! # JSONL
//!
//! The first line is a header object
//! `{"format":"fragnet-results","version":1,"spec":{...}}` (`spec` may be
//! null). Each following line is one run record: the CSV field names with
//! `spl` null when undefined, `"failed":true` on failed runs, and an
//! optional `snapshots` array of [`GraphSnapshot`]s.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use fragnet_core::sweep::RESULTS_FORMAT_VERSION;
use fragnet_core::{ResultTable, RunResult, SweepSpec};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::GraphSnapshot;

pub const CSV_COLUMNS: [&str; 10] = [
    "sigma_d",
    "sigma_rs",
    "sigma_rw",
    "run_index",
    "seed",
    "cd",
    "spl",
    "edge_count",
    "component_count",
    "wall_ms",
];

const JSONL_FORMAT: &str = "fragnet-results";

/// One JSONL line after the header.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    #[serde(flatten)]
    pub result: RunResult,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshots: Vec<GraphSnapshot>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonlHeader {
    format: String,
    version: u32,
    spec: Option<SweepSpec>,
}

fn csv_fields(r: &RunResult) -> [String; 10] {
    let opt = |v: Option<String>| v.unwrap_or_default();
    let outcome = |v: String| if r.failed { String::new() } else { v };
    [
        r.sigma_d.to_string(),
        r.sigma_rs.to_string(),
        r.sigma_rw.to_string(),
        r.run_index.to_string(),
        r.seed.to_string(),
        outcome(r.cd.to_string()),
        opt(r.spl.filter(|_| !r.failed).map(|v| v.to_string())),
        outcome(r.edge_count.to_string()),
        outcome(r.component_count.to_string()),
        r.wall_ms.to_string(),
    ]
}

pub fn write_csv<W: Write>(rows: &[RunResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let to_err = |e: csv::Error| Error::Input(format!("writing CSV: {e}"));
    w.write_record(CSV_COLUMNS).map_err(to_err)?;
    for r in rows {
        w.write_record(csv_fields(r)).map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::Input(format!("writing CSV: {e}")))
}

/// Reads CSV rows; `path` only labels diagnostics.
pub fn read_csv<R: Read>(input: R, path: &str) -> Result<Vec<RunResult>> {
    let parse_err = |line: u64, column: u64, message: String| Error::Parse {
        path: path.to_string(),
        line,
        column,
        message,
    };
    let csv_err = |e: csv::Error| {
        let line = e.position().map_or(0, |p| p.line());
        parse_err(line, 1, e.to_string())
    };
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let headers = reader.headers().map_err(csv_err)?.clone();
    let mut index = [usize::MAX; 10];
    for (col, name) in headers.iter().enumerate() {
        let name = name.trim();
        match CSV_COLUMNS.iter().position(|c| *c == name) {
            Some(k) if index[k] == usize::MAX => index[k] = col,
            Some(_) => return Err(parse_err(1, col as u64 + 1, format!("duplicate column {name:?}"))),
            None => return Err(parse_err(1, col as u64 + 1, format!("unknown column {name:?}"))),
        }
    }
    if let Some(k) = index.iter().position(|&i| i == usize::MAX) {
        return Err(parse_err(1, 1, format!("missing column {:?}", CSV_COLUMNS[k])));
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |k: usize| record.get(index[k]).unwrap_or("").trim();
        let bad = |k: usize, what: &str| {
            parse_err(line, index[k] as u64 + 1, format!("{}: invalid {what} {:?}", CSV_COLUMNS[k], field(k)))
        };
        let float = |k: usize| -> Result<f64> {
            field(k).parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| bad(k, "number"))
        };
        let opt_float = |k: usize| if field(k).is_empty() { Ok(None) } else { float(k).map(Some) };
        let opt_count = |k: usize| -> Result<Option<usize>> {
            if field(k).is_empty() {
                Ok(None)
            } else {
                field(k).parse().map(Some).map_err(|_| bad(k, "integer"))
            }
        };

        let cd = opt_float(5)?;
        let spl = opt_float(6)?;
        let edge_count = opt_count(7)?;
        let component_count = opt_count(8)?;
        let failed = cd.is_none();
        if failed && (spl.is_some() || edge_count.is_some() || component_count.is_some()) {
            return Err(parse_err(line, index[5] as u64 + 1, "cd is empty but other outcome fields are set".into()));
        }
        if !failed && (edge_count.is_none() || component_count.is_none()) {
            let k = if edge_count.is_none() { 7 } else { 8 };
            return Err(bad(k, "integer"));
        }
        rows.push(RunResult {
            sigma_d: float(0)?,
            sigma_rs: float(1)?,
            sigma_rw: float(2)?,
            run_index: field(3).parse().map_err(|_| bad(3, "integer"))?,
            seed: field(4).parse().map_err(|_| bad(4, "integer"))?,
            cd: cd.unwrap_or(0.0),
            spl,
            edge_count: edge_count.unwrap_or(0),
            component_count: component_count.unwrap_or(0),
            wall_ms: field(9).parse().map_err(|_| bad(9, "integer"))?,
            failed,
        });
    }
    Ok(rows)
}

pub fn save_csv(rows: &[RunResult], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(rows, BufWriter::new(file))
}

/// Loads a CSV table. CSV carries no spec echo, so `spec` is `None`.
pub fn load_csv(path: &Path) -> Result<ResultTable> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let rows = read_csv(BufReader::new(file), &path.display().to_string())?;
    Ok(ResultTable::new(None, rows))
}

pub fn write_jsonl<W: Write>(spec: Option<&SweepSpec>, records: &[RunRecord], out: W) -> Result<()> {
    let mut out = BufWriter::new(out);
    let io_err = |e: std::io::Error| Error::Input(format!("writing JSONL: {e}"));
    let header = JsonlHeader {
        format: JSONL_FORMAT.to_string(),
        version: RESULTS_FORMAT_VERSION,
        spec: spec.cloned(),
    };
    writeln!(out, "{}", json_line(&header)).map_err(io_err)?;
    for r in records {
        writeln!(out, "{}", json_line(r)).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

fn json_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("result records serialize")
}

/// Reads a JSONL file written by [`write_jsonl`].
pub fn read_jsonl<R: Read>(input: R, path: &str) -> Result<(ResultTable, Vec<RunRecord>)> {
    let parse_err = |line: usize, e: serde_json::Error| Error::Parse {
        path: path.to_string(),
        line: line as u64,
        column: e.column() as u64,
        message: e.to_string(),
    };
    let mut lines = BufReader::new(input).lines().enumerate();
    let header: JsonlHeader = match lines.next() {
        Some((_, line)) => {
            let line = line.map_err(|e| Error::io(path, e))?;
            serde_json::from_str(&line).map_err(|e| parse_err(1, e))?
        }
        None => return Err(Error::Input(format!("{path}: empty results file"))),
    };
    if header.format != JSONL_FORMAT {
        return Err(Error::Parse {
            path: path.to_string(),
            line: 1,
            column: 1,
            message: format!("unexpected format tag {:?}", header.format),
        });
    }
    if header.version != RESULTS_FORMAT_VERSION {
        return Err(Error::Version {
            path: path.to_string(),
            found: header.version,
            expected: RESULTS_FORMAT_VERSION,
        });
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RunRecord = serde_json::from_str(&line).map_err(|e| parse_err(idx + 1, e))?;
        records.push(record);
    }
    let rows = records.iter().map(|r| r.result.clone()).collect();
    let mut table = ResultTable::new(header.spec, rows);
    table.version = header.version;
    Ok((table, records))
}

pub fn save_jsonl(table: &ResultTable, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let records: Vec<RunRecord> = table
        .rows
        .iter()
        .map(|r| RunRecord { result: r.clone(), snapshots: Vec::new() })
        .collect();
    write_jsonl(table.spec.as_ref(), &records, file)
}

pub fn load_jsonl(path: &Path) -> Result<ResultTable> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(read_jsonl(file, &path.display().to_string())?.0)
}

/// Loads a table by extension: `.jsonl` as JSONL, anything else as CSV.
pub fn load_results(path: &Path) -> Result<ResultTable> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("jsonl") => load_jsonl(path),
        _ => load_csv(path),
    }
}
