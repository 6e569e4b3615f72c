use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fragnet::config::{CliConfig, PARALLEL_ENV};
use fragnet::graph::{write_dot, write_edge_list, GraphSnapshot};
use fragnet::plot::{scatter_svg, ColorBy, PlotOptions};
use fragnet::report::{analyze, render, render_cells, ReportFormat};
use fragnet::results::{load_results, write_csv, write_jsonl, RunRecord};
use fragnet::sweep::{run_sweep, Progress, ProgressSink, Silent};
use fragnet::Error;
use fragnet_core::stats::{cell_aggregates, Response};

/// Cultural diffusion on an adaptive social network: single runs,
/// parameter sweeps, regression analysis, plots and graph exports.
#[derive(Parser)]
#[command(name = "fragnet", version)]
struct Cli {
    /// JSON config file; see the README for the layout.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Run seed (`run`) or master seed (`sweep`); overrides `sim.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format: run json; sweep csv|jsonl; analyze text|csv|json;
    /// plot svg; export-graph edges|dot|json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Worker threads for `sweep` [default: FRAGNET_PARALLEL, the config
    /// file, then the number of cores].
    #[arg(long, global = true, value_name = "N")]
    parallel: Option<usize>,
    /// Suppress progress and summary messages.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and print its run record as JSON.
    Run(RunArgs),
    /// Run every cell of the sigma grid and write the results table.
    Sweep(SweepArgs),
    /// Regression and ANOVA of cd and/or spl on the sigmas.
    Analyze(AnalyzeArgs),
    /// SVG scatter of cd against spl.
    Plot(PlotArgs),
    /// Write a network snapshot as an edge list, DOT or JSON.
    ExportGraph(ExportArgs),
}

#[derive(Args)]
struct SigmaArgs {
    #[arg(long)]
    sigma_d: Option<f64>,
    #[arg(long)]
    sigma_rs: Option<f64>,
    #[arg(long)]
    sigma_rw: Option<f64>,
    #[arg(long)]
    iterations: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    sim: SigmaArgs,
    /// Include a state snapshot every K iterations (and at iteration 0).
    #[arg(long, value_name = "K")]
    snapshots: Option<usize>,
    /// Write the final network snapshot as JSON to this path.
    #[arg(long, value_name = "PATH")]
    export_final: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated values applied to each of the three sigmas.
    #[arg(long, value_delimiter = ',')]
    sigma_values: Option<Vec<f64>>,
    #[arg(long)]
    runs_per_cell: Option<u32>,
    #[arg(long)]
    iterations: Option<usize>,
    /// Also write the table as JSONL to this path.
    #[arg(long, value_name = "PATH")]
    jsonl: Option<PathBuf>,
    /// Record per-run wall-clock milliseconds (output is then not reproducible).
    #[arg(long)]
    record_timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ResponseArg {
    Cd,
    Spl,
    Both,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Results table (.csv, or .jsonl).
    input: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    response: ResponseArg,
    /// Print per-cell summaries instead of the regression.
    #[arg(long)]
    cells: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Trend {
    None,
    Cubic,
}

#[derive(Args)]
struct PlotArgs {
    /// Results table (.csv, or .jsonl).
    input: PathBuf,
    #[arg(long, default_value = "sigma-d")]
    color_by: ColorBy,
    #[arg(long, value_enum, default_value = "none")]
    trend: Trend,
}

#[derive(Args)]
struct ExportArgs {
    /// Snapshot JSON (from `run --export-final`) or a run record with snapshots.
    input: PathBuf,
    /// Snapshot iteration to export from a run record [default: last].
    #[arg(long)]
    iteration: Option<usize>,
}

/// Error plus exit status: 2 for configuration problems, 1 otherwise.
struct Failure {
    code: u8,
    error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure { code: 1, error }
    }
}

fn config_failure(error: Error) -> Failure {
    Failure { code: 2, error }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let mut config = match &cli.config {
        Some(path) => CliConfig::load(path).map_err(config_failure)?,
        None => CliConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.sim.seed = seed;
    }
    let env = std::env::var(PARALLEL_ENV).ok();
    config.resolve_parallelism(cli.parallel, env.as_deref()).map_err(config_failure)?;
    match &cli.command {
        Command::Run(a) => apply_sim_args(&mut config, &a.sim),
        Command::Sweep(a) => {
            if let Some(v) = &a.sigma_values {
                config.sweep.sigma_values = v.clone();
            }
            if let Some(n) = a.runs_per_cell {
                config.sweep.runs_per_cell = n;
            }
            if let Some(n) = a.iterations {
                config.sim.iterations = n;
            }
            config.sweep.record_timing |= a.record_timing;
        }
        _ => {}
    }
    config.validate().map_err(config_failure)?;
    eprintln!("{}", config.to_json_line());

    let format = cli.format.as_deref();
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Run(a) => cmd_run(&config, a, format, out),
        Command::Sweep(a) => cmd_sweep(&config, a, format, out, cli.quiet),
        Command::Analyze(a) => cmd_analyze(a, format, out),
        Command::Plot(a) => cmd_plot(a, format, out, cli.quiet),
        Command::ExportGraph(a) => cmd_export(a, format, out),
    }
}

fn apply_sim_args(config: &mut CliConfig, a: &SigmaArgs) {
    let div = &mut config.sim.diversity;
    div.sigma_d = a.sigma_d.unwrap_or(div.sigma_d);
    div.sigma_s = a.sigma_rs.unwrap_or(div.sigma_s);
    div.sigma_w = a.sigma_rw.unwrap_or(div.sigma_w);
    config.sim.iterations = a.iterations.unwrap_or(config.sim.iterations);
}

fn check_format(format: Option<&str>, allowed: &[&'static str]) -> Result<&'static str, Failure> {
    match format {
        None => Ok(allowed[0]),
        Some(f) => allowed.iter().find(|a| **a == f).copied().ok_or_else(|| {
            config_failure(Error::Input(format!("unsupported --format {f:?} (expected {})", allowed.join(", "))))
        }),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

/// Opens `--out`, or standard output.
fn open_out(out: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_all(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    let mut w = open_out(out)?;
    let label = out.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf);
    w.write_all(text.as_bytes()).and_then(|_| w.flush()).map_err(|e| Error::io(label, e))?;
    Ok(())
}

fn cmd_run(config: &CliConfig, a: &RunArgs, format: Option<&str>, out: Option<&Path>) -> Result<(), Failure> {
    check_format(format, &["json"])?;
    let mut snapshots = Vec::new();
    let every = a.snapshots.unwrap_or(0);
    let (state, result) = fragnet_core::run_observed(&config.sim, every, |s| {
        snapshots.push(GraphSnapshot::capture(s));
    })
    .map_err(Error::from)?;
    if let Some(path) = &a.export_final {
        let json = serde_json::to_string(&GraphSnapshot::capture(&state)).expect("snapshot serializes");
        write_all(Some(path), &(json + "\n"))?;
    }
    let record = RunRecord { result, snapshots };
    let json = serde_json::to_string(&record).expect("run record serializes");
    write_all(out, &(json + "\n"))
}

struct StderrProgress;

impl ProgressSink for StderrProgress {
    fn cell_completed(&self, p: &Progress) {
        eprintln!(
            "cells {}/{}  runs {}/{}  {:.1} runs/s",
            p.cells_done, p.cells_total, p.runs_done, p.runs_total, p.runs_per_sec
        );
    }
}

fn cmd_sweep(
    config: &CliConfig,
    a: &SweepArgs,
    format: Option<&str>,
    out: Option<&Path>,
    quiet: bool,
) -> Result<(), Failure> {
    let format = check_format(format, &["csv", "jsonl"])?;
    // open every output before any simulation starts
    let mut main_out = open_out(out)?;
    let mut jsonl_out = a.jsonl.as_deref().map(create).transpose()?;

    let spec = config.sweep_spec();
    let sink: &dyn ProgressSink = if quiet { &Silent } else { &StderrProgress };
    let table = run_sweep(&spec, sink)?;
    let records = || -> Vec<RunRecord> {
        table.rows.iter().map(|r| RunRecord { result: r.clone(), snapshots: Vec::new() }).collect()
    };
    match format {
        "csv" => write_csv(&table.rows, &mut main_out)?,
        _ => write_jsonl(Some(&spec), &records(), &mut main_out)?,
    }
    let label = out.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf);
    main_out.flush().map_err(|e| Error::io(label, e))?;
    if let (Some(w), Some(path)) = (jsonl_out.as_mut(), a.jsonl.as_deref()) {
        write_jsonl(Some(&spec), &records(), &mut *w)?;
        w.flush().map_err(|e| Error::io(path, e))?;
    }
    if !quiet {
        eprintln!(
            "{} runs ({} failed, {} with undefined spl)",
            table.rows.len(),
            table.failed_count(),
            table.undefined_spl_count()
        );
    }
    Ok(())
}

fn cmd_analyze(a: &AnalyzeArgs, format: Option<&str>, out: Option<&Path>) -> Result<(), Failure> {
    let format: ReportFormat = check_format(format, &["text", "csv", "json"])?.parse().expect("checked format");
    let table = load_results(&a.input)?;
    if a.cells {
        return write_all(out, &render_cells(&cell_aggregates(&table.rows), format));
    }
    let responses: &[Response] = match a.response {
        ResponseArg::Cd => &[Response::Cd],
        ResponseArg::Spl => &[Response::Spl],
        ResponseArg::Both => &[Response::Cd, Response::Spl],
    };
    let reports = analyze(&table.rows, responses)?;
    write_all(out, &render(&reports, format))
}

fn cmd_plot(a: &PlotArgs, format: Option<&str>, out: Option<&Path>, quiet: bool) -> Result<(), Failure> {
    check_format(format, &["svg"])?;
    let table = load_results(&a.input)?;
    let opts = PlotOptions {
        color_by: a.color_by,
        trend: matches!(a.trend, Trend::Cubic),
        ..PlotOptions::default()
    };
    let svg = scatter_svg(&table.rows, &opts)?;
    write_all(out, &svg)?;
    if !quiet {
        if let Some(p) = out {
            eprintln!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn load_snapshot(path: &Path, iteration: Option<usize>) -> Result<GraphSnapshot, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let label = path.display().to_string();
    let value: serde_json::Value = serde_json::from_str(text.trim_end()).map_err(|e| Error::Parse {
        path: label.clone(),
        line: e.line() as u64,
        column: e.column() as u64,
        message: e.to_string(),
    })?;
    let invalid = |e: serde_json::Error| Error::Input(format!("{label}: {e}"));
    if value.get("agents").is_some() {
        let snap: GraphSnapshot = serde_json::from_value(value).map_err(invalid)?;
        return match iteration {
            Some(i) if i != snap.iteration => Err(Error::Input(format!(
                "{label}: snapshot is at iteration {}, not {i}",
                snap.iteration
            ))
            .into()),
            _ => Ok(snap),
        };
    }
    let record: RunRecord = serde_json::from_value(value).map_err(invalid)?;
    let found = match iteration {
        Some(i) => record.snapshots.into_iter().find(|s| s.iteration == i),
        None => record.snapshots.into_iter().last(),
    };
    found.ok_or_else(|| {
        let which = iteration.map_or_else(|| "any iteration".to_string(), |i| format!("iteration {i}"));
        Error::Input(format!("{label}: no snapshot for {which}; run with --snapshots or --export-final")).into()
    })
}

fn cmd_export(a: &ExportArgs, format: Option<&str>, out: Option<&Path>) -> Result<(), Failure> {
    let format = check_format(format, &["edges", "dot", "json"])?;
    let snap = load_snapshot(&a.input, a.iteration)?;
    let text = match format {
        "edges" => write_edge_list(&snap),
        "dot" => write_dot(&snap),
        _ => serde_json::to_string(&snap).expect("snapshot serializes") + "\n",
    };
    write_all(out, &text)
}
