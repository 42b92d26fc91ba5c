use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::TrackingResult;
use crate::scalar::Scalar;

pub fn tracking_to_json<T: Scalar + Serialize>(result: &TrackingResult<T>) -> String {
    serde_json::to_string_pretty(result).expect("tracking result serializes")
}

pub fn save_tracking_json<T: Scalar + Serialize>(result: &TrackingResult<T>, path: &Path) -> std::io::Result<()> {
    let mut text = tracking_to_json(result);
    text.push('\n');
    fs::write(path, text)
}

/// Legacy ASCII VTK polydata, one polyline per trajectory. Point data:
/// `time`, `value`, `persistence`, `segment_cost` (cost of the segment
/// arriving at the point, 0 at the start) and `trajectory_id`.
pub fn save_polylines<T: Scalar>(result: &TrackingResult<T>, path: &Path) -> std::io::Result<()> {
    let trajectories = &result.trajectories;
    let total: usize = trajectories.iter().map(|t| t.points.len()).sum();
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\ntrajectories\nASCII\nDATASET POLYDATA\n");
    writeln!(s, "POINTS {total} double").unwrap();
    for tr in trajectories {
        for p in &tr.points {
            writeln!(s, "{} {} {}", p.x.as_f64(), p.y.as_f64(), p.z.as_f64()).unwrap();
        }
    }
    let size: usize = trajectories.iter().map(|t| t.points.len() + 1).sum();
    writeln!(s, "LINES {} {size}", trajectories.len()).unwrap();
    let mut next = 0;
    for tr in trajectories {
        write!(s, "{}", tr.points.len()).unwrap();
        for _ in &tr.points {
            write!(s, " {next}").unwrap();
            next += 1;
        }
        s.push('\n');
    }
    writeln!(s, "POINT_DATA {total}").unwrap();
    let mut scalar = |name: &str, kind: &str, values: &mut dyn Iterator<Item = String>| {
        writeln!(s, "SCALARS {name} {kind} 1\nLOOKUP_TABLE default").unwrap();
        for v in values {
            s.push_str(&v);
            s.push('\n');
        }
    };
    let points = || trajectories.iter().flat_map(|t| t.points.iter());
    scalar("time", "int", &mut points().map(|p| p.t.to_string()));
    scalar("value", "double", &mut points().map(|p| p.value.as_f64().to_string()));
    scalar(
        "persistence",
        "double",
        &mut points().map(|p| p.persistence.as_f64().to_string()),
    );
    scalar(
        "segment_cost",
        "double",
        &mut trajectories.iter().flat_map(|t| {
            std::iter::once(0.0)
                .chain(t.segment_costs.iter().map(|c| c.as_f64()))
                .map(|c| c.to_string())
        }),
    );
    scalar(
        "trajectory_id",
        "int",
        &mut trajectories
            .iter()
            .flat_map(|t| std::iter::repeat(t.id.to_string()).take(t.points.len())),
    );
    fs::write(path, s)
}
