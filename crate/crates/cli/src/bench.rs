use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use topotrack::assignment::{solve_auction, solve_full_munkres, solve_reduced, AssignmentResult, SolverChoice};
use topotrack::grid::{downsample_time, gen_translating_gaussians, normalize, TranslatingParams};
use topotrack::metric::match_points;
use topotrack::persistence::{PairClass, PersistenceDiagram, SweepDirection};
use topotrack::synthetic::random_diagram_pair;
use topotrack::tracking::{overlap_tracking, track_diagrams, TrackingResult};

use crate::diagram::series_diagrams;
use crate::{workers_or_default, write_file, CliError, MetricArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum BenchMode {
    /// Reduced vs full vs auction on one random diagram pair, per threshold.
    Solvers,
    /// Wasserstein vs overlap tracking of the translating fixture, per stride.
    Trackers,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(value_enum)]
    pub mode: BenchMode,
    /// Output CSV path; stdout when unset.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Pairs in the first random diagram (solvers).
    #[arg(long, default_value_t = 1000)]
    pub pairs: usize,
    /// Fraction of near-diagonal pairs (solvers).
    #[arg(long, default_value_t = 0.8)]
    pub near_diagonal: f64,
    /// Absolute persistence thresholds to sweep (solvers).
    #[arg(long, value_delimiter = ',', default_value = "0,0.005,0.01,0.02,0.05")]
    pub thresholds: Vec<f64>,
    #[arg(long, default_value_t = 1e-6)]
    pub auction_accuracy: f64,
    /// Strides to sweep (trackers).
    #[arg(long, value_delimiter = ',', default_value = "1,2,5")]
    pub strides: Vec<usize>,
    /// Persistence threshold as a fraction of the scalar range (trackers).
    #[arg(long, default_value_t = 0.02)]
    pub threshold_fraction: f64,
    #[command(flatten)]
    pub metric: MetricArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub workers: Option<usize>,
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BenchRow {
    pub config_id: String,
    pub solver: String,
    pub n_pairs_1: usize,
    pub n_pairs_2: usize,
    pub threshold: f64,
    pub cost: f64,
    pub wall_ms: f64,
}

/// Runs the benchmark, writes the CSV and returns its rows.
pub fn cmd_bench(args: &BenchArgs) -> Result<Vec<BenchRow>, CliError> {
    let rows = match args.mode {
        BenchMode::Solvers => bench_solvers(args)?,
        BenchMode::Trackers => bench_trackers(args)?,
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    let text = String::from_utf8(bytes).expect("csv output is utf-8");
    match &args.out {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    Ok(rows)
}

fn filtered(d: &PersistenceDiagram<f64>, threshold: f64) -> Vec<topotrack::MatchPoint> {
    let kept: Vec<_> = d.pairs.iter().filter(|p| p.persistence > threshold).copied().collect();
    match_points(&kept)
}

fn timed(
    f: impl FnOnce() -> Result<AssignmentResult<f64>, topotrack::assignment::AssignmentError>,
) -> Result<(f64, f64), CliError> {
    let start = Instant::now();
    let r = f()?;
    Ok((r.total_cost, start.elapsed().as_secs_f64() * 1e3))
}

fn bench_solvers(args: &BenchArgs) -> Result<Vec<BenchRow>, CliError> {
    if args.pairs == 0 {
        return Err(CliError::Usage("--pairs must be positive".into()));
    }
    if !(0.0..=1.0).contains(&args.near_diagonal) {
        return Err(CliError::Usage("--near-diagonal must lie in [0, 1]".into()));
    }
    let n2 = args.pairs - args.pairs / 10;
    let (a, b) = random_diagram_pair::<f64>(args.seed, args.pairs, n2, args.near_diagonal);
    let params = args.metric.params(PairClass::SaddleMax)?;
    let mut rows = Vec::new();
    for (k, &threshold) in args.thresholds.iter().enumerate() {
        let (p, q) = (filtered(&a, threshold), filtered(&b, threshold));
        let runs = [
            ("reduced", timed(|| solve_reduced(&p, &q, &params))?),
            ("full", timed(|| solve_full_munkres(&p, &q, &params))?),
            (
                "auction",
                timed(|| solve_auction(&p, &q, &params, args.auction_accuracy))?,
            ),
        ];
        for (solver, (cost, wall_ms)) in runs {
            rows.push(BenchRow {
                config_id: format!("threshold_{k}"),
                solver: solver.into(),
                n_pairs_1: p.len(),
                n_pairs_2: q.len(),
                threshold,
                cost,
                wall_ms,
            });
        }
    }
    Ok(rows)
}

/// For trackers, `n_pairs_1` counts trajectories, `n_pairs_2` the ones that
/// span every kept timestep, and `cost` sums all segment costs.
fn bench_trackers(args: &BenchArgs) -> Result<Vec<BenchRow>, CliError> {
    let workers = workers_or_default(args.workers);
    let params = args.metric.params(PairClass::SaddleMax)?;
    let (full, _) = normalize(&gen_translating_gaussians(&TranslatingParams::default())?)?;
    let mut rows = Vec::new();
    for &stride in &args.strides {
        let series = downsample_time(&full, stride)?;
        let steps = series.len();
        let summary = |r: &TrackingResult<f64>| {
            let spanning = r.trajectories.iter().filter(|t| t.len() == steps).count();
            let cost: f64 = r.trajectories.iter().flat_map(|t| t.segment_costs.iter()).sum();
            (r.trajectories.len(), spanning, cost)
        };

        let start = Instant::now();
        let diagrams = series_diagrams(&series, (args.threshold_fraction, true), workers);
        let w = track_diagrams(
            &diagrams,
            PairClass::SaddleMax,
            &params,
            SolverChoice::Reduced,
            0.0,
            workers,
        )?;
        let w_ms = start.elapsed().as_secs_f64() * 1e3;

        let start = Instant::now();
        let o = overlap_tracking(
            &series,
            args.threshold_fraction,
            SweepDirection::AscendingToMax,
            workers,
        )?;
        let o_ms = start.elapsed().as_secs_f64() * 1e3;

        for (name, r, wall_ms) in [("wasserstein", &w, w_ms), ("overlap", &o, o_ms)] {
            let (n, spanning, cost) = summary(r);
            rows.push(BenchRow {
                config_id: format!("stride_{stride}"),
                solver: name.into(),
                n_pairs_1: n,
                n_pairs_2: spanning,
                threshold: args.threshold_fraction,
                cost,
                wall_ms,
            });
        }
    }
    Ok(rows)
}
