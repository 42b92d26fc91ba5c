//! Field file formats.
//!
//! `json_field`: `{"dims":[nx,ny,nz],"origin":[..],"spacing":[..],"time":t,"values":[..]}`
//! with values x-fastest. `csv_grid`: 2D only, one row per y line, unit
//! spacing and zero origin. A time series is a directory of `step_<k>.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Grid, GridError, ScalarField, TimeSeries};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldFormat {
    JsonField,
    CsvGrid,
}

impl FieldFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => FieldFormat::CsvGrid,
            _ => FieldFormat::JsonField,
        }
    }
}

#[derive(Deserialize)]
struct FieldIn {
    dims: [usize; 3],
    origin: [f64; 3],
    spacing: [f64; 3],
    #[serde(default)]
    time: usize,
    values: Vec<Value>,
}

#[derive(Serialize)]
struct FieldOut<'a> {
    dims: [usize; 3],
    origin: [f64; 3],
    spacing: [f64; 3],
    time: usize,
    values: &'a [f64],
}

fn parse_err(path: &Path, message: impl ToString) -> GridError {
    GridError::Parse {
        path: path.display().to_string(),
        message: message.to_string(),
    }
}

fn json_number(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        // non-finite values cannot be JSON numbers; accept their usual spellings
        // so they are reported as non-finite rather than as syntax errors
        Value::String(s) => s.trim().parse::<f64>().ok(),
        _ => None,
    }
}

pub fn load_field<T: Scalar>(path: &Path, format: FieldFormat) -> Result<ScalarField<T>, GridError> {
    let text = fs::read_to_string(path)?;
    match format {
        FieldFormat::JsonField => parse_json_field(path, &text),
        FieldFormat::CsvGrid => parse_csv_grid(path, &text),
    }
}

fn parse_json_field<T: Scalar>(path: &Path, text: &str) -> Result<ScalarField<T>, GridError> {
    let raw: FieldIn = serde_json::from_str(text).map_err(|e| parse_err(path, e))?;
    let mut values = Vec::with_capacity(raw.values.len());
    for (i, v) in raw.values.iter().enumerate() {
        let x = json_number(v).ok_or_else(|| parse_err(path, format!("values[{i}] is not a number")))?;
        if !x.is_finite() {
            return Err(GridError::NonFinite {
                location: format!("{}: values[{i}]", path.display()),
            });
        }
        values.push(T::lit(x));
    }
    let grid = Grid::new(raw.dims, raw.origin.map(T::lit), raw.spacing.map(T::lit))?;
    ScalarField::new(grid, values, raw.time)
}

fn parse_csv_grid<T: Scalar>(path: &Path, text: &str) -> Result<ScalarField<T>, GridError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut values = Vec::new();
    let mut nx = None;
    let mut ny = 0;
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(path, e))?;
        if record.iter().all(|c| c.is_empty()) {
            continue;
        }
        match nx {
            None => nx = Some(record.len()),
            Some(n) if n != record.len() => {
                return Err(parse_err(
                    path,
                    format!("row {row} has {} columns, expected {n}", record.len()),
                ))
            }
            _ => {}
        }
        for (col, cell) in record.iter().enumerate() {
            let x: f64 = cell
                .parse()
                .map_err(|_| parse_err(path, format!("row {row}, column {col}: `{cell}` is not a number")))?;
            if !x.is_finite() {
                return Err(GridError::NonFinite {
                    location: format!("{}: row {row}, column {col}", path.display()),
                });
            }
            values.push(T::lit(x));
        }
        ny += 1;
    }
    let nx = nx.ok_or_else(|| parse_err(path, "empty grid"))?;
    let grid = Grid::new([nx, ny, 1], [T::zero(); 3], [T::one(); 3])?;
    ScalarField::new(grid, values, 0)
}

/// Writes a `json_field` file. Values round-trip bit-exactly.
pub fn save_field<T: Scalar>(field: &ScalarField<T>, path: &Path) -> Result<(), GridError> {
    let values: Vec<f64> = field.values.iter().map(|v| v.as_f64()).collect();
    let out = FieldOut {
        dims: field.grid.dims,
        origin: field.grid.origin.map(|v| v.as_f64()),
        spacing: field.grid.spacing.map(|v| v.as_f64()),
        time: field.time_index,
        values: &values,
    };
    let text = serde_json::to_string(&out).map_err(|e| parse_err(path, e))?;
    fs::write(path, text)?;
    Ok(())
}

pub fn step_file_name(time_index: usize) -> String {
    format!("step_{time_index}.json")
}

fn step_index(path: &Path) -> Option<usize> {
    let name = path.file_name()?.to_str()?;
    name.strip_prefix("step_")?.strip_suffix(".json")?.parse().ok()
}

/// Loads every `step_<k>.json` of `dir`, ordered by `k`.
pub fn load_series<T: Scalar>(dir: &Path) -> Result<TimeSeries<T>, GridError> {
    let mut steps: Vec<(usize, PathBuf)> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter_map(|p| step_index(&p).map(|k| (k, p)))
        .collect();
    steps.sort();
    if steps.is_empty() {
        return Err(GridError::EmptySeries);
    }
    let fields = steps
        .iter()
        .map(|(_, p)| load_field(p, FieldFormat::JsonField))
        .collect::<Result<Vec<_>, _>>()?;
    TimeSeries::new(fields)
}

/// Writes one `step_<time_index>.json` per field; returns the written paths.
pub fn save_series<T: Scalar>(series: &TimeSeries<T>, dir: &Path) -> Result<Vec<PathBuf>, GridError> {
    fs::create_dir_all(dir)?;
    series
        .fields
        .iter()
        .map(|f| {
            let p = dir.join(step_file_name(f.time_index));
            save_field(f, &p).map(|_| p)
        })
        .collect()
}
