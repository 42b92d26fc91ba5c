use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use topotrack::grid::downsample_time;
use topotrack::persistence::{load_diagram, threshold_diagram, threshold_value, PersistenceDiagram, SweepDirection};
use topotrack::tracking::{
    detect_merge_split, overlap_tracking, save_polylines, track_diagrams, tracking_to_json, TrackingResult,
};

use crate::diagram::{load_input_series, series_diagrams};
use crate::{workers_or_default, write_file, ClassArg, CliError, MetricArgs, SolverArgs, ThresholdArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Tracker {
    /// Lifted Wasserstein matching of persistence diagrams.
    Wasserstein,
    /// Greedy overlap of extremum regions (series input only).
    Overlap,
}

#[derive(Debug, Clone, Args)]
pub struct TrackArgs {
    /// Directory of `step_<k>.json` fields or of `diagram_<k>.csv` files.
    pub input: PathBuf,
    /// Output JSON path; stdout when unset.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the trajectories as legacy VTK polylines.
    #[arg(long)]
    pub polyline: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ClassArg::SaddleMax)]
    pub class: ClassArg,
    #[arg(long, value_enum, default_value_t = Tracker::Wasserstein)]
    pub tracker: Tracker,
    #[command(flatten)]
    pub metric: MetricArgs,
    #[command(flatten)]
    pub threshold: ThresholdArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Merge/split distance threshold; 0 disables event detection.
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    /// Keep every `stride`-th timestep.
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Keep original coordinates and values instead of normalizing the series.
    #[arg(long)]
    pub raw: bool,
}

enum Input {
    Series,
    Diagrams(Vec<PathBuf>),
}

fn detect_input(dir: &Path) -> Result<Input, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut diagrams: Vec<(usize, PathBuf)> = Vec::new();
    let mut has_steps = false;
    for e in entries.filter_map(|e| e.ok()) {
        let name = e.file_name().to_string_lossy().into_owned();
        if name.starts_with("step_") && name.ends_with(".json") {
            has_steps = true;
        }
        if let Some(k) = name
            .strip_prefix("diagram_")
            .and_then(|n| n.strip_suffix(".csv"))
            .and_then(|n| n.parse().ok())
        {
            diagrams.push((k, e.path()));
        }
    }
    if has_steps {
        return Ok(Input::Series);
    }
    if diagrams.is_empty() {
        return Err(CliError::Usage(format!(
            "{} holds neither step_<k>.json nor diagram_<k>.csv files",
            dir.display()
        )));
    }
    diagrams.sort();
    Ok(Input::Diagrams(diagrams.into_iter().map(|(_, p)| p).collect()))
}

/// Runs the tracker and writes its JSON (and polylines); returns the result.
pub fn cmd_track(args: &TrackArgs) -> Result<TrackingResult<f64>, CliError> {
    if args.stride == 0 {
        return Err(CliError::Usage("--stride must be at least 1".into()));
    }
    if !(args.epsilon >= 0.0) || !args.epsilon.is_finite() {
        return Err(CliError::Usage(format!(
            "--epsilon must be non-negative, got {}",
            args.epsilon
        )));
    }
    let threshold = args.threshold.resolve()?;
    let solver = args.solver.choice()?;
    let classes = args.class.classes();
    let params: Vec<_> = classes
        .iter()
        .map(|&c| args.metric.params(c))
        .collect::<Result<_, _>>()?;
    let workers = workers_or_default(args.workers);

    let result = match (args.tracker, detect_input(&args.input)?) {
        (Tracker::Overlap, Input::Diagrams(_)) => {
            return Err(CliError::Usage("the overlap tracker needs a series directory".into()));
        }
        (Tracker::Overlap, Input::Series) => {
            let series = downsample_time(&load_input_series(&args.input, args.raw)?, args.stride)?;
            let mut parts = Vec::new();
            for (class, p) in classes.iter().zip(&params) {
                let direction = match class {
                    topotrack::persistence::PairClass::SaddleMax => SweepDirection::AscendingToMax,
                    topotrack::persistence::PairClass::MinSaddle => SweepDirection::DescendingToMin,
                };
                let cut = if threshold.1 {
                    let lo = series.fields.iter().map(|f| f.range().0).fold(f64::INFINITY, f64::min);
                    let hi = series
                        .fields
                        .iter()
                        .map(|f| f.range().1)
                        .fold(f64::NEG_INFINITY, f64::max);
                    threshold.0 * (hi - lo)
                } else {
                    threshold.0
                };
                let r = overlap_tracking(&series, cut, direction, workers)?;
                parts.push(detect_merge_split(&r, args.epsilon, p));
            }
            TrackingResult::concat(parts)
        }
        (Tracker::Wasserstein, input) => {
            let diagrams: Vec<PersistenceDiagram<f64>> = match input {
                Input::Series => {
                    let series = downsample_time(&load_input_series(&args.input, args.raw)?, args.stride)?;
                    series_diagrams(&series, threshold, workers)
                }
                Input::Diagrams(paths) => paths
                    .iter()
                    .step_by(args.stride)
                    .map(|p| {
                        let d = load_diagram(p)?;
                        let cut = threshold_value(&d, threshold.0, threshold.1);
                        Ok(threshold_diagram(&d, cut, false))
                    })
                    .collect::<Result<_, CliError>>()?,
            };
            let mut parts = Vec::new();
            for (&class, p) in classes.iter().zip(&params) {
                parts.push(track_diagrams(&diagrams, class, p, solver, args.epsilon, workers)?);
            }
            TrackingResult::concat(parts)
        }
    };

    let mut text = tracking_to_json(&result);
    text.push('\n');
    match &args.out {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    if let Some(path) = &args.polyline {
        save_polylines(&result, path).map_err(|e| CliError::io(path, e))?;
    }
    Ok(result)
}
