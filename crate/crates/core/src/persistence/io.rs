//! Diagram CSV files.
//!
//! Columns: `pair_id,pair_class,essential,birth,death,persistence,b_vertex,
//! b_x,b_y,b_z,b_value,d_vertex,d_x,d_y,d_z,d_value`. The `b_*` columns
//! describe the birth critical point and `d_*` the death critical point.

use std::fs;
use std::path::Path;

use thiserror::Error;

use super::{CriticalIndex, CriticalPoint, PairClass, PersistenceDiagram, PersistencePair};
use crate::scalar::Scalar;

pub const DIAGRAM_HEADER: [&str; 16] = [
    "pair_id",
    "pair_class",
    "essential",
    "birth",
    "death",
    "persistence",
    "b_vertex",
    "b_x",
    "b_y",
    "b_z",
    "b_value",
    "d_vertex",
    "d_x",
    "d_y",
    "d_z",
    "d_value",
];

const CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum DiagramIoError {
    #[error("{path}: row {row}: {message}")]
    Malformed { path: String, row: usize, message: String },
    #[error("{path}: row {row}: inconsistent pair: {message}")]
    Inconsistent { path: String, row: usize, message: String },
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn diagram_file_name(time_index: usize) -> String {
    format!("diagram_{time_index}.csv")
}

fn time_from_name(path: &Path) -> usize {
    path.file_name()
        .and_then(|n| n.to_str())
        .and_then(|n| n.strip_prefix("diagram_"))
        .and_then(|n| n.strip_suffix(".csv"))
        .and_then(|n| n.parse().ok())
        .unwrap_or(0)
}

fn fmt<T: Scalar>(x: T) -> String {
    // shortest representation that parses back to the same f64
    format!("{}", x.as_f64())
}

/// Writes `diagram` as CSV. Finite values round-trip bit-exactly.
pub fn save_diagram<T: Scalar>(diagram: &PersistenceDiagram<T>, path: &Path) -> Result<(), DiagramIoError> {
    let csv_err = |source| DiagramIoError::Csv {
        path: path.display().to_string(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(DIAGRAM_HEADER).map_err(csv_err)?;
    for (id, p) in diagram.pairs.iter().enumerate() {
        let b = &p.birth_point;
        let d = &p.death_point;
        let row = [
            id.to_string(),
            p.pair_class.as_str().to_string(),
            p.essential.to_string(),
            fmt(p.birth),
            fmt(p.death),
            fmt(p.persistence),
            b.vertex_id.to_string(),
            fmt(b.coords[0]),
            fmt(b.coords[1]),
            fmt(b.coords[2]),
            fmt(b.value),
            d.vertex_id.to_string(),
            fmt(d.coords[0]),
            fmt(d.coords[1]),
            fmt(d.coords[2]),
            fmt(d.value),
        ];
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a diagram CSV. The time index is taken from a `diagram_<k>.csv`
/// file name (0 otherwise); the field range spans all critical values.
pub fn load_diagram<T: Scalar>(path: &Path) -> Result<PersistenceDiagram<T>, DiagramIoError> {
    let pstr = path.display().to_string();
    let text = fs::read_to_string(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|source| DiagramIoError::Csv {
            path: pstr.clone(),
            source,
        })?
        .clone();
    if headers.iter().ne(DIAGRAM_HEADER.iter().copied()) {
        return Err(DiagramIoError::Malformed {
            path: pstr,
            row: 0,
            message: format!("unexpected header `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }

    let mut pairs = Vec::new();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let malformed = |message: String| DiagramIoError::Malformed {
            path: pstr.clone(),
            row,
            message,
        };
        let record = record.map_err(|e| malformed(e.to_string()))?;
        if record.len() != DIAGRAM_HEADER.len() {
            return Err(malformed(format!(
                "expected {} columns, found {}",
                DIAGRAM_HEADER.len(),
                record.len()
            )));
        }
        let real = |c: usize| -> Result<f64, DiagramIoError> {
            let x: f64 = record[c]
                .parse()
                .map_err(|_| malformed(format!("column {} `{}` is not a number", DIAGRAM_HEADER[c], &record[c])))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(malformed(format!("column {} is not finite", DIAGRAM_HEADER[c])))
            }
        };
        let int = |c: usize| -> Result<usize, DiagramIoError> {
            record[c].parse().map_err(|_| {
                malformed(format!(
                    "column {} `{}` is not a vertex id",
                    DIAGRAM_HEADER[c], &record[c]
                ))
            })
        };
        let class =
            PairClass::parse(&record[1]).ok_or_else(|| malformed(format!("unknown pair_class `{}`", &record[1])))?;
        let essential = match &record[2] {
            "true" | "1" => true,
            "false" | "0" => false,
            other => return Err(malformed(format!("essential must be true/false, got `{other}`"))),
        };
        let (birth, death, persistence) = (real(3)?, real(4)?, real(5)?);
        let b_value = real(10)?;
        let d_value = real(15)?;

        let inconsistent = |message: String| DiagramIoError::Inconsistent {
            path: pstr.clone(),
            row,
            message,
        };
        if (persistence - (death - birth)).abs() > CONSISTENCY_TOL {
            return Err(inconsistent(format!(
                "persistence {persistence} != death - birth = {}",
                death - birth
            )));
        }
        if death < birth {
            return Err(inconsistent(format!("death {death} below birth {birth}")));
        }
        if (birth - b_value).abs() > CONSISTENCY_TOL || (death - d_value).abs() > CONSISTENCY_TOL {
            return Err(inconsistent("birth/death differ from the critical point values".into()));
        }

        let (b_index, d_index) = match (class, essential) {
            (_, true) => (CriticalIndex::Minimum, CriticalIndex::Maximum),
            (PairClass::MinSaddle, false) => (CriticalIndex::Minimum, CriticalIndex::Saddle),
            (PairClass::SaddleMax, false) => (CriticalIndex::Saddle, CriticalIndex::Maximum),
        };
        let birth_point = CriticalPoint {
            vertex_id: int(6)?,
            coords: [T::lit(real(7)?), T::lit(real(8)?), T::lit(real(9)?)],
            value: T::lit(b_value),
            index: b_index,
        };
        let death_point = CriticalPoint {
            vertex_id: int(11)?,
            coords: [T::lit(real(12)?), T::lit(real(13)?), T::lit(real(14)?)],
            value: T::lit(d_value),
            index: d_index,
        };
        lo = lo.min(b_value);
        hi = hi.max(d_value);
        pairs.push(PersistencePair {
            birth_point,
            death_point,
            birth: T::lit(birth),
            death: T::lit(death),
            persistence: T::lit(persistence),
            pair_class: class,
            essential,
        });
    }
    let field_range = if pairs.is_empty() {
        (T::zero(), T::zero())
    } else {
        (T::lit(lo), T::lit(hi))
    };
    Ok(PersistenceDiagram {
        time_index: time_from_name(path),
        pairs,
        field_range,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, ScalarField};
    use crate::persistence::compute_diagram;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const HEADER: &str = "pair_id,pair_class,essential,birth,death,persistence,b_vertex,b_x,b_y,b_z,b_value,d_vertex,d_x,d_y,d_z,d_value\n";

    #[test]
    fn save_load_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let grid = Grid::new([9, 7, 1], [0.3, -1.0, 0.0], [0.1, 1.0 / 3.0, 1.0]).unwrap();
        let f = ScalarField::new(grid, (0..63).map(|_| rng.gen::<f64>() * 1e-3 - 0.7).collect(), 4).unwrap();
        let d = compute_diagram(&f);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join(diagram_file_name(4));
        save_diagram(&d, &p).unwrap();
        let back: PersistenceDiagram<f64> = load_diagram(&p).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn persistence_mismatch_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        fs::write(
            &p,
            format!("{HEADER}0,saddle_max,false,0.2,0.9,0.8,1,0,0,0,0.2,2,1,0,0,0.9\n"),
        )
        .unwrap();
        assert!(matches!(
            load_diagram::<f64>(&p),
            Err(DiagramIoError::Inconsistent { row: 1, .. })
        ));
    }

    #[test]
    fn malformed_rows_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        fs::write(
            &p,
            format!("{HEADER}0,bogus,false,0.2,0.9,0.7,1,0,0,0,0.2,2,1,0,0,0.9\n"),
        )
        .unwrap();
        assert!(matches!(load_diagram::<f64>(&p), Err(DiagramIoError::Malformed { .. })));
        fs::write(&p, format!("{HEADER}0,saddle_max,false,0.2,0.9\n")).unwrap();
        assert!(load_diagram::<f64>(&p).is_err());
        fs::write(&p, "a,b,c\n").unwrap();
        assert!(matches!(
            load_diagram::<f64>(&p),
            Err(DiagramIoError::Malformed { row: 0, .. })
        ));
    }

    #[test]
    fn external_diagram_is_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("diagram_12.csv");
        fs::write(
            &p,
            format!(
                "{HEADER}0,saddle_max,true,0,1,1,5,0.1,0.2,0.3,0,9,0.5,0.5,0.5,1\n\
                 1,saddle_max,false,0.25,0.75,0.5,3,0,0,0,0.25,4,1,1,1,0.75\n\
                 2,min_saddle,false,0.1,0.3,0.2,7,0,1,0,0.1,8,0,0,1,0.3\n"
            ),
        )
        .unwrap();
        let d: PersistenceDiagram<f64> = load_diagram(&p).unwrap();
        assert_eq!(d.time_index, 12);
        assert_eq!(d.pairs.len(), 3);
        assert_eq!(d.field_range, (0.0, 1.0));
        assert_eq!(d.pairs[1].extremum().vertex_id, 4);
        assert_eq!(d.pairs[2].extremum().vertex_id, 7);
    }
}
