use std::path::{Path, PathBuf};

use clap::Args;
use topotrack::grid::{load_series, normalize, TimeSeries};
use topotrack::parallel::map_ordered;
use topotrack::persistence::{compute_diagram, diagram_file_name, save_diagram, threshold_diagram, PersistenceDiagram};

use crate::{workers_or_default, CliError, ThresholdArgs};

#[derive(Debug, Clone, Args)]
pub struct DiagramArgs {
    /// Directory of `step_<k>.json` fields.
    pub series: PathBuf,
    /// Output directory for `diagram_<k>.csv` files.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub threshold: ThresholdArgs,
    /// Keep original coordinates and values instead of normalizing the series.
    #[arg(long)]
    pub raw: bool,
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Loads a series, normalized unless `raw`.
pub(crate) fn load_input_series(dir: &Path, raw: bool) -> Result<TimeSeries<f64>, CliError> {
    let series = load_series(dir)?;
    if raw {
        Ok(series)
    } else {
        Ok(normalize(&series)?.0)
    }
}

pub(crate) fn series_diagrams(
    series: &TimeSeries<f64>,
    threshold: (f64, bool),
    workers: usize,
) -> Vec<PersistenceDiagram<f64>> {
    map_ordered(workers, &series.fields, |f| {
        threshold_diagram(&compute_diagram(f), threshold.0, threshold.1)
    })
}

/// Writes one diagram CSV per timestep; returns the written paths.
pub fn cmd_diagram(args: &DiagramArgs) -> Result<Vec<PathBuf>, CliError> {
    let threshold = args.threshold.resolve()?;
    let series = load_input_series(&args.series, args.raw)?;
    let diagrams = series_diagrams(&series, threshold, workers_or_default(args.workers));
    std::fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    let mut paths = Vec::with_capacity(diagrams.len());
    for d in &diagrams {
        let p = args.out.join(diagram_file_name(d.time_index));
        save_diagram(d, &p)?;
        paths.push(p);
    }
    eprintln!("wrote {} diagrams to {}", paths.len(), args.out.display());
    Ok(paths)
}
