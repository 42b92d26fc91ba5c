use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde_json::json;
use topotrack::grid::{
    add_noise_series, gen_merge_fixture, gen_random_gaussians, gen_translating_gaussians, gen_whirling_gaussians,
    save_series, MergeFixtureParams, RandomGaussiansParams, TimeSeries, TranslatingParams, WhirlingParams,
};

use crate::{parse_dims, write_file, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Scenario {
    Gaussians,
    Whirling,
    Translating,
    MergeFixture,
}

impl Scenario {
    fn name(self) -> &'static str {
        match self {
            Scenario::Gaussians => "gaussians",
            Scenario::Whirling => "whirling",
            Scenario::Translating => "translating",
            Scenario::MergeFixture => "merge_fixture",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub scenario: Scenario,
    /// Output directory for `step_<k>.json` files and `manifest.json`.
    #[arg(long)]
    pub out: PathBuf,
    /// Number of timesteps (scenario default when unset).
    #[arg(long)]
    pub timesteps: Option<usize>,
    /// Number of gaussians (gaussians and whirling).
    #[arg(long)]
    pub n: Option<usize>,
    /// Grid vertex counts `nx,ny[,nz]`.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    /// Uniform noise width as a fraction of each field's scalar range.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Writes the series and a manifest; returns the manifest.
pub fn cmd_gen(args: &GenArgs) -> Result<serde_json::Value, CliError> {
    if !(args.noise >= 0.0) || !args.noise.is_finite() {
        return Err(CliError::Usage(format!(
            "--noise must be non-negative, got {}",
            args.noise
        )));
    }
    if args.timesteps == Some(0) {
        return Err(CliError::Usage("--timesteps must be at least 1".into()));
    }
    let dims = args.dims.as_deref().map(parse_dims).transpose()?;
    let (series, params): (TimeSeries<f64>, serde_json::Value) = match args.scenario {
        Scenario::Gaussians => {
            let mut p = RandomGaussiansParams {
                seed: args.seed,
                ..RandomGaussiansParams::default()
            };
            p.n = args.n.unwrap_or(p.n);
            p.timesteps = args.timesteps.unwrap_or(p.timesteps);
            p.dims = dims.unwrap_or(p.dims);
            (gen_random_gaussians(&p)?, serde_json::to_value(p)?)
        }
        Scenario::Whirling => {
            let mut p = WhirlingParams::default();
            p.n = args.n.unwrap_or(p.n);
            p.timesteps = args.timesteps.unwrap_or(p.timesteps);
            p.dims = dims.unwrap_or(p.dims);
            (gen_whirling_gaussians(&p)?, serde_json::to_value(p)?)
        }
        Scenario::Translating => {
            let mut p = TranslatingParams::default();
            p.timesteps = args.timesteps.unwrap_or(p.timesteps);
            p.dims = dims.unwrap_or(p.dims);
            (gen_translating_gaussians(&p)?, serde_json::to_value(&p)?)
        }
        Scenario::MergeFixture => {
            let mut p = MergeFixtureParams::default();
            p.timesteps = args.timesteps.unwrap_or(p.timesteps);
            p.dims = dims.unwrap_or(p.dims);
            (gen_merge_fixture(&p)?, serde_json::to_value(p)?)
        }
    };
    let series = add_noise_series(&series, args.noise, args.seed);
    let files: Vec<String> = save_series(&series, &args.out)?
        .iter()
        .map(|p| {
            p.file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default()
        })
        .collect();
    let manifest = json!({
        "scenario": args.scenario.name(),
        "seed": args.seed,
        "noise": args.noise,
        "timesteps": series.len(),
        "params": params,
        "files": files,
    });
    let text = serde_json::to_string_pretty(&manifest)?;
    write_file(&args.out.join("manifest.json"), &(text.clone() + "\n"))?;
    Ok(manifest)
}
