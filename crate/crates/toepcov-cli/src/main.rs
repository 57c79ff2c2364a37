//! Command-line front end: data ingestion, estimator invocation, Monte Carlo
//! orchestration, and plot-ready spectral output.
//!
//! Exit codes: 0 success, 2 malformed input data (reported with a line
//! number), 3 invalid flag combinations or parameter values, 1 anything else.

// Parameter checks use `!(x > 0.0)` so that NaN fails validation too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use toepcov::error::Error as CoreError;
use toepcov::estimators::{tapered_first_column, thresholded_first_column, Taper, TimeSeries};
use toepcov::experiments::{run_table_cell, EstimatorKind, ExperimentConfig};
use toepcov::process::ModelPreset;
use toepcov::spectral::lag_window_estimate;
use toepcov::toeplitz::{norm_of_difference, NormOptions, SymmetricToeplitz};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "toepcov",
    version,
    about = "Autocovariance matrix estimation for stationary time series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate an autocovariance matrix from a series (CSV, one value per line).
    Estimate(EstimateArgs),
    /// Monte Carlo error table for oracle-tuned estimators of a model preset.
    Simulate(SimulateArgs),
    /// Lag-window spectral density estimate as (theta, density) CSV pairs.
    Spectral(SpectralArgs),
    /// Operator norm of a symmetric Toeplitz matrix given its first column.
    Norm(NormArgs),
}

#[derive(Args)]
struct EstimateArgs {
    /// Input series, one value per line; `#` comments and a header line allowed.
    #[arg(long)]
    input: PathBuf,
    /// plug-in | banded | tapered | thresholded | threshold-after-banding
    #[arg(long)]
    estimator: String,
    #[arg(long)]
    bandwidth: Option<usize>,
    #[arg(long)]
    threshold: Option<f64>,
    /// rectangular | bartlett (tapered and threshold-after-banding only)
    #[arg(long)]
    taper: Option<String>,
    /// Demean the series and use centered sample autocovariances.
    #[arg(long)]
    center: bool,
    /// Optional truth-matrix first column (CSV or JSON) to report the
    /// operator-norm error against.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// json | csv (csv writes the dense matrix)
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct SimulateArgs {
    /// Model preset: white-noise | ar1 | ma | x-process | y-process, or a
    /// full preset string like "x-process(0.5,1)".
    #[arg(long)]
    model: String,
    #[arg(long)]
    alpha: Option<f64>,
    /// Scale of the power-law coefficients (x/y processes).
    #[arg(long, default_value_t = 0.5)]
    c: f64,
    #[arg(long)]
    phi: Option<f64>,
    /// MA coefficients after the leading 1, comma separated.
    #[arg(long)]
    coeffs: Option<String>,
    #[arg(long = "T", visible_alias = "t")]
    t: usize,
    #[arg(long)]
    reps: usize,
    #[arg(long)]
    seed: u64,
    /// Comma-separated subset of banded,thresholded,plug-in,threshold-after-banding.
    #[arg(long, default_value = "banded,thresholded,plug-in")]
    estimators: String,
    #[arg(long, default_value = "rectangular")]
    taper: String,
    /// Demean each simulated series before estimation (reference-table pipeline).
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    center: bool,
    /// Write the machine-readable JSON report here (table always on stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectralArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "bartlett")]
    taper: String,
    #[arg(long)]
    bandwidth: usize,
    /// Half the number of grid intervals: evaluates at theta = j*pi/points,
    /// j = -points..=points.
    #[arg(long, default_value_t = 256)]
    points: usize,
    #[arg(long)]
    center: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NormArgs {
    /// First column as CSV (one value per line) or JSON
    /// {"dimension": .., "first_column": [..]}.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Dimensions below this use the dense eigensolver (0 forces Lanczos).
    #[arg(long, default_value_t = 1024)]
    dense_threshold: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    /// Malformed input data (exit 2).
    Input(String),
    /// Invalid flags or parameter values (exit 3).
    Usage(String),
    /// Everything else (exit 1).
    Other(String),
}

impl CliError {
    fn report(&self) -> ExitCode {
        let (msg, code) = match self {
            CliError::Input(m) => (m, 2),
            CliError::Usage(m) => (m, 3),
            CliError::Other(m) => (m, 1),
        };
        eprintln!("error: {msg}");
        ExitCode::from(code)
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::OutOfRange { .. }
            | CoreError::InvalidParameter(_)
            | CoreError::DimensionMismatch { .. }
            | CoreError::BadPreset(_) => CliError::Usage(e.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("TOEPCOV_THREADS") {
        match threads.trim().parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: TOEPCOV_THREADS must be a positive integer");
                return ExitCode::from(3);
            }
        }
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Spectral(args) => cmd_spectral(args),
        Command::Norm(args) => cmd_norm(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}

/// Read a series: one value per line, blank lines and `#` comments skipped,
/// one optional non-numeric header line tolerated.
fn read_series(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut values = Vec::new();
    let mut header_allowed = true;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match trimmed.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                values.push(v);
                header_allowed = false;
            }
            Ok(v) => {
                return Err(CliError::Input(format!(
                    "{}:{line_no}: non-finite value {v}",
                    path.display()
                )))
            }
            Err(_) if header_allowed => {
                header_allowed = false;
            }
            Err(_) => {
                return Err(CliError::Input(format!(
                    "{}:{line_no}: cannot parse `{trimmed}` as a number",
                    path.display()
                )))
            }
        }
    }
    if values.is_empty() {
        return Err(CliError::Input(format!(
            "{}: no numeric data found",
            path.display()
        )));
    }
    Ok(values)
}

#[derive(serde::Deserialize)]
struct ColumnJson {
    dimension: Option<usize>,
    first_column: Vec<f64>,
}

/// Read a first column from CSV (one value per line) or JSON.
fn read_first_column(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if text.trim_start().starts_with('{') {
        let parsed: ColumnJson = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("{}: invalid JSON: {e}", path.display())))?;
        if let Some(dim) = parsed.dimension {
            if dim != parsed.first_column.len() {
                return Err(CliError::Input(format!(
                    "{}: dimension {dim} does not match first_column length {}",
                    path.display(),
                    parsed.first_column.len()
                )));
            }
        }
        Ok(parsed.first_column)
    } else {
        read_series(path)
    }
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| CliError::Other(format!("{}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// 10 significant digits for CSV output.
fn csv_num(v: f64) -> String {
    format!("{v:.9e}")
}

#[derive(Serialize)]
struct EstimateOutput<'a> {
    version: &'a str,
    config: serde_json::Value,
    dimension: usize,
    first_column: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    error_vs_truth: Option<f64>,
}

fn cmd_estimate(args: EstimateArgs) -> Result<(), CliError> {
    if args.format != "json" && args.format != "csv" {
        return Err(CliError::Usage(format!(
            "unknown format `{}` (json or csv)",
            args.format
        )));
    }
    let values = read_series(&args.input)?;
    if values.len() < 4 {
        return Err(CliError::Input(format!(
            "{}: need at least 4 observations, got {}",
            args.input.display(),
            values.len()
        )));
    }
    let t = values.len();

    // Autocovariances by the centered or zero-mean convention.
    let gammas = if args.center {
        TimeSeries::observed(values)
            .and_then(|x| x.sample_acov_centered(t - 1))
            .map_err(CliError::from)?
    } else {
        TimeSeries::zero_mean(values)
            .and_then(|x| x.sample_acov(t - 1))
            .map_err(CliError::from)?
    };

    let taper = match args.taper.as_deref() {
        Some(name) => Some(Taper::by_name(name).map_err(CliError::from)?),
        None => None,
    };
    let need = |cond: bool, msg: &str| {
        if cond {
            Ok(())
        } else {
            Err(CliError::Usage(msg.to_string()))
        }
    };

    let column = match args.estimator.as_str() {
        "plug-in" => {
            need(args.bandwidth.is_none() && args.threshold.is_none() && taper.is_none(),
                 "plug-in takes no bandwidth, threshold or taper")?;
            gammas.values().to_vec()
        }
        "banded" => {
            need(taper.is_none(), "banded implies the rectangular taper; use --estimator tapered to choose one")?;
            need(args.threshold.is_none(), "banded takes no threshold")?;
            let b = args.bandwidth.ok_or_else(|| CliError::Usage("banded requires --bandwidth".into()))?;
            tapered_first_column(gammas.values(), &Taper::rectangular(), b).map_err(CliError::from)?
        }
        "tapered" => {
            need(args.threshold.is_none(), "tapered takes no threshold")?;
            let b = args.bandwidth.ok_or_else(|| CliError::Usage("tapered requires --bandwidth".into()))?;
            let taper = taper.ok_or_else(|| CliError::Usage("tapered requires --taper".into()))?;
            tapered_first_column(gammas.values(), &taper, b).map_err(CliError::from)?
        }
        "thresholded" => {
            need(args.bandwidth.is_none() && taper.is_none(), "thresholded takes only --threshold")?;
            let a = args.threshold.ok_or_else(|| CliError::Usage("thresholded requires --threshold".into()))?;
            thresholded_first_column(gammas.values(), a).map_err(CliError::from)?
        }
        "threshold-after-banding" => {
            let b = args.bandwidth.ok_or_else(|| CliError::Usage("threshold-after-banding requires --bandwidth".into()))?;
            let a = args.threshold.ok_or_else(|| CliError::Usage("threshold-after-banding requires --threshold".into()))?;
            let taper = taper.unwrap_or_else(Taper::rectangular);
            let tapered = tapered_first_column(gammas.values(), &taper, b).map_err(CliError::from)?;
            thresholded_first_column(&tapered, a).map_err(CliError::from)?
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown estimator `{other}` (plug-in, banded, tapered, thresholded, \
                 threshold-after-banding)"
            )))
        }
    };

    let error_vs_truth = match &args.truth {
        Some(path) => {
            let truth = read_first_column(path)?;
            if truth.len() != t {
                return Err(CliError::Usage(format!(
                    "truth dimension {} does not match series length {t}",
                    truth.len()
                )));
            }
            let a = SymmetricToeplitz::new(column.clone()).map_err(CliError::from)?;
            let b = SymmetricToeplitz::new(truth).map_err(CliError::from)?;
            Some(
                norm_of_difference(&a, &b, 1e-8)
                    .map_err(CliError::from)?
                    .value,
            )
        }
        None => None,
    };

    let config = serde_json::json!({
        "input": args.input.display().to_string(),
        "estimator": args.estimator,
        "bandwidth": args.bandwidth,
        "threshold": args.threshold,
        "taper": args.taper,
        "center": args.center,
        "format": args.format,
    });

    let content = if args.format == "json" {
        let out = EstimateOutput {
            version: VERSION,
            config,
            dimension: t,
            first_column: &column,
            error_vs_truth,
        };
        serde_json::to_string_pretty(&out).expect("serializable") + "\n"
    } else {
        // Dense CSV with a JSON comment header.
        let mut s = format!(
            "# {}\n",
            serde_json::json!({"version": VERSION, "config": config})
        );
        for row in 0..t {
            let line: Vec<String> = (0..t)
                .map(|col| csv_num(column[row.abs_diff(col)]))
                .collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    };
    write_output(&args.out, &content)
}

fn parse_model(args: &SimulateArgs) -> Result<ModelPreset, CliError> {
    if args.model.contains('(') {
        return ModelPreset::parse(&args.model).map_err(CliError::from);
    }
    match args.model.as_str() {
        "white-noise" => Ok(ModelPreset::WhiteNoise),
        "ar1" => {
            let phi = args.phi.ok_or_else(|| CliError::Usage("ar1 requires --phi".into()))?;
            Ok(ModelPreset::Ar1 { phi })
        }
        "ma" => {
            let coeffs = args
                .coeffs
                .as_deref()
                .ok_or_else(|| CliError::Usage("ma requires --coeffs".into()))?;
            let coefficients: Result<Vec<f64>, _> =
                coeffs.split(',').map(|c| c.trim().parse::<f64>()).collect();
            Ok(ModelPreset::Ma {
                coefficients: coefficients
                    .map_err(|_| CliError::Usage(format!("cannot parse --coeffs `{coeffs}`")))?,
            })
        }
        "x-process" => {
            let alpha = args
                .alpha
                .ok_or_else(|| CliError::Usage("x-process requires --alpha".into()))?;
            Ok(ModelPreset::XProcess { c: args.c, alpha })
        }
        "y-process" => {
            let alpha = args
                .alpha
                .ok_or_else(|| CliError::Usage("y-process requires --alpha".into()))?;
            Ok(ModelPreset::YProcess { c: args.c, alpha })
        }
        other => Err(CliError::Usage(format!(
            "unknown model `{other}` (white-noise, ar1, ma, x-process, y-process)"
        ))),
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let preset = parse_model(&args)?;
    let model = preset.linear_model().map_err(CliError::from)?;
    let estimators: Vec<EstimatorKind> = args
        .estimators
        .split(',')
        .map(|s| EstimatorKind::from_str(s.trim()))
        .collect::<Result<_, _>>()
        .map_err(CliError::from)?;
    let taper = Taper::by_name(&args.taper).map_err(CliError::from)?;
    let config = ExperimentConfig {
        model,
        len: args.t,
        replications: args.reps,
        seed: args.seed,
        estimators,
        taper,
        center: args.center,
    };
    let report = run_table_cell(&config).map_err(CliError::from)?;

    let mut table = String::new();
    let _ = writeln!(
        table,
        "model {} T={} reps={} seed={} taper={} center={}",
        preset, args.t, args.reps, args.seed, args.taper, args.center
    );
    table.push_str(&report.to_table());
    println!("{table}");

    let json = serde_json::json!({
        "version": VERSION,
        "config": {
            "model": preset,
            "t": args.t,
            "replications": args.reps,
            "seed": args.seed,
            "estimators": config.estimators,
            "taper": args.taper,
            "center": args.center,
        },
        "report": report,
    });
    if args.out.is_some() {
        write_output(&args.out, &(serde_json::to_string_pretty(&json).expect("serializable") + "\n"))?;
    }
    Ok(())
}

fn cmd_spectral(args: SpectralArgs) -> Result<(), CliError> {
    if args.points == 0 {
        return Err(CliError::Usage("--points must be positive".into()));
    }
    let values = read_series(&args.input)?;
    let t = values.len();
    if t < 4 {
        return Err(CliError::Input(format!(
            "{}: need at least 4 observations, got {t}",
            args.input.display()
        )));
    }
    let taper = Taper::by_name(&args.taper).map_err(CliError::from)?;
    let x = if args.center {
        let mean = values.iter().sum::<f64>() / t as f64;
        TimeSeries::zero_mean(values.iter().map(|v| v - mean).collect())
    } else {
        TimeSeries::zero_mean(values)
    }
    .map_err(CliError::from)?;
    let density = lag_window_estimate(&x, &taper, args.bandwidth).map_err(CliError::from)?;

    let config = serde_json::json!({
        "input": args.input.display().to_string(),
        "taper": args.taper,
        "bandwidth": args.bandwidth,
        "points": args.points,
        "center": args.center,
    });
    let mut content = format!(
        "# {}\ntheta,density\n",
        serde_json::json!({"version": VERSION, "config": config})
    );
    let n = args.points as i64;
    for j in -n..=n {
        let theta = j as f64 * PI / n as f64;
        let _ = writeln!(content, "{},{}", csv_num(theta), csv_num(density.evaluate(theta)));
    }
    write_output(&args.out, &content)
}

fn cmd_norm(args: NormArgs) -> Result<(), CliError> {
    let column = read_first_column(&args.input)?;
    let matrix = SymmetricToeplitz::new(column).map_err(CliError::from)?;
    if !(args.tol > 0.0) {
        return Err(CliError::Usage(format!(
            "--tol must be positive, got {}",
            args.tol
        )));
    }
    let options = NormOptions {
        dense_threshold: args.dense_threshold,
    };
    let result = matrix
        .operator_norm_with(args.tol, &options)
        .map_err(CliError::from)?;
    let json = serde_json::json!({
        "version": VERSION,
        "config": {
            "input": args.input.display().to_string(),
            "tol": args.tol,
            "dense_threshold": args.dense_threshold,
        },
        "value": result.value,
        "method": result.method,
        "iterations": result.iterations,
        "residual": result.residual,
    });
    write_output(&args.out, &(serde_json::to_string_pretty(&json).expect("serializable") + "\n"))
}
