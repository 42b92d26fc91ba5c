//! Baseline tracking by region overlap: the extremum regions of
//! consecutive timesteps are matched greedily by the number of vertices
//! they share.

use std::collections::HashMap;

use super::{chain, TrackingError, TrackingResult, TrajectoryPoint};
use crate::grid::TimeSeries;
use crate::parallel::map_ordered;
use crate::persistence::{compute_diagram, compute_segmentation, PairClass, PersistencePair, SweepDirection};
use crate::scalar::Scalar;

struct Step<T> {
    /// Kept region index of every vertex, `NONE` if dropped.
    region_of: Vec<usize>,
    sizes: Vec<usize>,
    points: Vec<TrajectoryPoint<T>>,
}

const NONE: usize = usize::MAX;

/// Tracks extremum regions (of maxima for `AscendingToMax`, of minima for
/// `DescendingToMin`). Regions whose extremum pair has persistence at most
/// `persistence_threshold` are dropped; the essential pair is always kept.
/// Segment costs are Jaccard distances `1 - |A ∩ B| / |A ∪ B|`.
pub fn overlap_tracking<T: Scalar>(
    series: &TimeSeries<T>,
    persistence_threshold: T,
    direction: SweepDirection,
    workers: usize,
) -> Result<TrackingResult<T>, TrackingError> {
    if series.len() < 2 {
        return Err(TrackingError::TooFewTimesteps(series.len()));
    }
    if let Some(k) = series.first_non_uniform() {
        return Err(TrackingError::NonUniform(k));
    }
    let class = match direction {
        SweepDirection::AscendingToMax => PairClass::SaddleMax,
        SweepDirection::DescendingToMin => PairClass::MinSaddle,
    };

    let steps: Vec<Step<T>> = map_ordered(workers, &series.fields, |field| {
        let diagram = compute_diagram(field);
        let by_extremum: HashMap<usize, PersistencePair<T>> = diagram
            .class_pairs(class)
            .into_iter()
            .map(|p| (p.extremum().vertex_id, p))
            .collect();
        let seg = compute_segmentation(field, direction);
        let mut kept = vec![NONE; seg.num_regions()];
        let mut points = Vec::new();
        for (label, &v) in seg.label_to_extremum.iter().enumerate() {
            let Some(p) = by_extremum.get(&v) else { continue };
            if p.essential || p.persistence > persistence_threshold {
                kept[label] = points.len();
                points.push(TrajectoryPoint::from_pair(field.time_index, label, p));
            }
        }
        let region_of: Vec<usize> = seg.labels.iter().map(|&l| kept[l]).collect();
        let mut sizes = vec![0; points.len()];
        for &r in &region_of {
            if r != NONE {
                sizes[r] += 1;
            }
        }
        Step {
            region_of,
            sizes,
            points,
        }
    });

    let links: Vec<Vec<(usize, usize, T)>> = steps.windows(2).map(|w| greedy_links(&w[0], &w[1])).collect();
    let points = steps.into_iter().map(|s| s.points).collect();
    Ok(TrackingResult {
        trajectories: chain(class, points, &links),
        events: Vec::new(),
    })
}

/// Region pairs by decreasing shared-vertex count (ties by region indices),
/// each region used at most once.
fn greedy_links<T: Scalar>(a: &Step<T>, b: &Step<T>) -> Vec<(usize, usize, T)> {
    let mut shared: HashMap<(usize, usize), usize> = HashMap::new();
    for (&ra, &rb) in a.region_of.iter().zip(&b.region_of) {
        if ra != NONE && rb != NONE {
            *shared.entry((ra, rb)).or_default() += 1;
        }
    }
    let mut scores: Vec<((usize, usize), usize)> = shared.into_iter().collect();
    scores.sort_unstable_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
    let mut used_a = vec![false; a.points.len()];
    let mut used_b = vec![false; b.points.len()];
    let mut links = Vec::new();
    for ((ra, rb), count) in scores {
        if used_a[ra] || used_b[rb] {
            continue;
        }
        used_a[ra] = true;
        used_b[rb] = true;
        let union = a.sizes[ra] + b.sizes[rb] - count;
        let jaccard = T::one() - T::from(count).unwrap() / T::from(union).unwrap();
        links.push((ra, rb, jaccard));
    }
    links.sort_unstable_by_key(|l| (l.0, l.1));
    links
}
