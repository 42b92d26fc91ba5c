//! Command-line front end: fixture generation, diagrams, tracking and
//! benchmarks.
//!
//! Each subcommand is also callable as a function so tests can drive the
//! pipeline without spawning the binary.

mod bench;
mod diagram;
mod gen;
mod track;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;
use topotrack::assignment::{AssignmentError, SolverChoice};
use topotrack::grid::GridError;
use topotrack::metric::{DiagonalMode, MetricError, MetricParams};
use topotrack::persistence::{DiagramIoError, PairClass};
use topotrack::tracking::TrackingError;

pub use bench::{cmd_bench, BenchArgs, BenchMode};
pub use diagram::{cmd_diagram, DiagramArgs};
pub use gen::{cmd_gen, GenArgs, Scenario};
pub use track::{cmd_track, TrackArgs, Tracker};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Diagram(#[from] DiagramIoError),
    #[error(transparent)]
    Tracking(#[from] TrackingError),
    #[error(transparent)]
    Assignment(#[from] AssignmentError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "topotrack", version, about = "Track extrema of time-varying scalar fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic time series.
    Gen(GenArgs),
    /// Compute one persistence diagram CSV per timestep.
    Diagram(DiagramArgs),
    /// Track features through a series or a diagram directory.
    Track(TrackArgs),
    /// Time solvers or trackers and write a CSV table.
    Bench(BenchArgs),
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen(a) => {
            let manifest = cmd_gen(&a)?;
            println!("{}", serde_json::to_string_pretty(&manifest)?);
            Ok(())
        }
        Command::Diagram(a) => cmd_diagram(&a).map(|_| ()),
        Command::Track(a) => {
            let r = cmd_track(&a)?;
            eprintln!("{} trajectories, {} events", r.trajectories.len(), r.events.len());
            Ok(())
        }
        Command::Bench(a) => cmd_bench(&a).map(|_| ()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum SolverArg {
    Reduced,
    Full,
    Auction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum ClassArg {
    SaddleMax,
    MinSaddle,
    Both,
}

impl ClassArg {
    pub fn classes(self) -> Vec<PairClass> {
        match self {
            ClassArg::SaddleMax => vec![PairClass::SaddleMax],
            ClassArg::MinSaddle => vec![PairClass::MinSaddle],
            ClassArg::Both => vec![PairClass::SaddleMax, PairClass::MinSaddle],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum DiagonalModeArg {
    #[value(alias = "classical_projection")]
    Projection,
    #[value(alias = "lifted_eq8")]
    Lifted,
}

/// Metric weights. Unset weights fall back to the per-class defaults.
#[derive(Debug, Clone, Args)]
pub struct MetricArgs {
    #[arg(long, default_value_t = 2.0)]
    pub nu: f64,
    /// Birth weight (default 0.1 for maxima, 1 for minima).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Death weight (default 1 for maxima, 0.1 for minima).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Per-axis geometric weights as `gx,gy,gz`.
    #[arg(long, value_delimiter = ',', value_name = "GX,GY,GZ")]
    pub gamma: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = DiagonalModeArg::Projection)]
    pub diagonal_mode: DiagonalModeArg,
}

impl Default for MetricArgs {
    fn default() -> Self {
        Self {
            nu: 2.0,
            alpha: None,
            beta: None,
            gamma: None,
            diagonal_mode: DiagonalModeArg::Projection,
        }
    }
}

impl MetricArgs {
    pub fn params(&self, class: PairClass) -> Result<MetricParams<f64>, CliError> {
        let mut p = MetricParams::for_class(class);
        p.nu = self.nu;
        if let Some(a) = self.alpha {
            p.alpha = a;
        }
        if let Some(b) = self.beta {
            p.beta = b;
        }
        if let Some(g) = &self.gamma {
            p.gamma = match g[..] {
                [x, y] => [x, y, 0.0],
                [x, y, z] => [x, y, z],
                _ => return Err(CliError::Usage(format!("--gamma takes 2 or 3 values, got {}", g.len()))),
            };
        }
        p.diagonal_mode = match self.diagonal_mode {
            DiagonalModeArg::Projection => DiagonalMode::Projection,
            DiagonalModeArg::Lifted => DiagonalMode::Lifted,
        };
        p.validate()?;
        Ok(p)
    }
}

/// Persistence threshold, absolute or as a fraction of the scalar range.
#[derive(Debug, Clone, Default, Args)]
pub struct ThresholdArgs {
    /// Drop pairs with persistence at most this value.
    #[arg(long, conflicts_with = "threshold_fraction")]
    pub threshold: Option<f64>,
    /// Drop pairs with persistence at most this fraction of the scalar range.
    #[arg(long)]
    pub threshold_fraction: Option<f64>,
}

impl ThresholdArgs {
    /// `(value, as_fraction)`.
    pub fn resolve(&self) -> Result<(f64, bool), CliError> {
        let (v, frac) = match (self.threshold, self.threshold_fraction) {
            (Some(t), None) => (t, false),
            (None, Some(f)) => (f, true),
            (None, None) => (0.0, false),
            (Some(_), Some(_)) => {
                return Err(CliError::Usage(
                    "--threshold and --threshold-fraction are exclusive".into(),
                ))
            }
        };
        if !(v >= 0.0) || !v.is_finite() {
            return Err(CliError::Usage(format!(
                "threshold must be finite and non-negative, got {v}"
            )));
        }
        Ok((v, frac))
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value_t = SolverArg::Reduced)]
    pub solver: SolverArg,
    /// Relative accuracy of the auction solver (auction only, default 1e-6).
    #[arg(long)]
    pub auction_accuracy: Option<f64>,
}

impl Default for SolverArgs {
    fn default() -> Self {
        Self {
            solver: SolverArg::Reduced,
            auction_accuracy: None,
        }
    }
}

impl SolverArgs {
    pub fn choice(&self) -> Result<SolverChoice<f64>, CliError> {
        match (self.solver, self.auction_accuracy) {
            (SolverArg::Auction, acc) => {
                let accuracy = acc.unwrap_or(1e-6);
                if !(accuracy > 0.0 && accuracy < 1.0) {
                    return Err(CliError::Usage(format!(
                        "--auction-accuracy must lie in (0, 1), got {accuracy}"
                    )));
                }
                Ok(SolverChoice::Auction { accuracy })
            }
            (_, Some(_)) => Err(CliError::Usage("--auction-accuracy needs --solver auction".into())),
            (SolverArg::Reduced, None) => Ok(SolverChoice::Reduced),
            (SolverArg::Full, None) => Ok(SolverChoice::Full),
        }
    }
}

pub(crate) fn workers_or_default(workers: Option<usize>) -> usize {
    workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1)
}

pub(crate) fn write_file(path: &std::path::Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub(crate) fn parse_dims(dims: &[usize]) -> Result<[usize; 3], CliError> {
    match *dims {
        [x, y] => Ok([x, y, 1]),
        [x, y, z] => Ok([x, y, z]),
        _ => Err(CliError::Usage(format!(
            "--dims takes 2 or 3 values, got {}",
            dims.len()
        ))),
    }
}
