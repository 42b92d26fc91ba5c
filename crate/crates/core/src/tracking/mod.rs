//! Trajectories of persistence pairs through a sequence of diagrams.
//!
//! Consecutive diagrams are matched independently ([`match_series`]); a
//! trajectory starts at every pair that was not matched from the previous
//! timestep, follows the matches, and ends where its pair is sent to the
//! diagonal ([`extract_trajectories`]). [`detect_merge_split`] then looks
//! for trajectories that come within `epsilon` of each other where one of
//! them ends or starts.

mod events;
mod io;
mod overlap;

pub use events::detect_merge_split;
pub use io::{save_polylines, save_tracking_json, tracking_to_json};
pub use overlap::overlap_tracking;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assignment::{AssignmentError, AssignmentResult, SolverChoice};
use crate::metric::{lifted_cost, match_points, MatchPoint, MetricParams};
use crate::parallel::map_ordered;
use crate::persistence::{PairClass, PersistenceDiagram, PersistencePair};
use crate::scalar::{root_nu, Scalar};

#[derive(Debug, Error)]
pub enum TrackingError {
    #[error("need at least two timesteps, got {0}")]
    TooFewTimesteps(usize),
    #[error("matching timestep {from} to {to}: {source}")]
    Solver {
        from: usize,
        to: usize,
        #[source]
        source: AssignmentError,
    },
    #[error("timestep {0} is on a different grid; overlap tracking needs a uniform series")]
    NonUniform(usize),
}

/// Matchings between the pairs of one class at consecutive timesteps.
#[derive(Debug, Clone)]
pub struct MatchingSeries<T> {
    pub class: PairClass,
    pub params: MetricParams<T>,
    pub times: Vec<usize>,
    /// Pairs of `class` at every timestep, in diagram order.
    pub pairs: Vec<Vec<PersistencePair<T>>>,
    /// `matchings[k]` matches `pairs[k]` to `pairs[k + 1]`.
    pub matchings: Vec<AssignmentResult<T>>,
}

/// Matches the pairs of `class` between every two consecutive diagrams,
/// running up to `workers` solves at once.
pub fn match_series<T: Scalar>(
    diagrams: &[PersistenceDiagram<T>],
    class: PairClass,
    params: &MetricParams<T>,
    solver: SolverChoice<T>,
    workers: usize,
) -> Result<MatchingSeries<T>, TrackingError> {
    if diagrams.len() < 2 {
        return Err(TrackingError::TooFewTimesteps(diagrams.len()));
    }
    let pairs: Vec<Vec<PersistencePair<T>>> = diagrams.iter().map(|d| d.class_pairs(class)).collect();
    let points: Vec<Vec<MatchPoint<T>>> = pairs.iter().map(|p| match_points(p)).collect();
    let steps: Vec<usize> = (0..diagrams.len() - 1).collect();
    let results = map_ordered(workers, &steps, |&k| solver.solve(&points[k], &points[k + 1], params));
    let mut matchings = Vec::with_capacity(results.len());
    for (k, r) in results.into_iter().enumerate() {
        matchings.push(r.map_err(|source| TrackingError::Solver {
            from: diagrams[k].time_index,
            to: diagrams[k + 1].time_index,
            source,
        })?);
    }
    Ok(MatchingSeries {
        class,
        params: *params,
        times: diagrams.iter().map(|d| d.time_index).collect(),
        pairs,
        matchings,
    })
}

/// A trajectory vertex, located at the extremum of the tracked pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPoint<T> {
    pub t: usize,
    pub x: T,
    pub y: T,
    pub z: T,
    pub value: T,
    pub birth: T,
    pub death: T,
    pub persistence: T,
    /// Position of the other critical point of the pair.
    #[serde(skip)]
    pub saddle: [T; 3],
    /// Index of the pair (or region) at its timestep.
    #[serde(skip)]
    pub index: usize,
}

impl<T: Scalar> TrajectoryPoint<T> {
    pub fn from_pair(t: usize, index: usize, p: &PersistencePair<T>) -> Self {
        let e = p.extremum();
        Self {
            t,
            x: e.coords[0],
            y: e.coords[1],
            z: e.coords[2],
            value: e.value,
            birth: p.birth,
            death: p.death,
            persistence: p.persistence,
            saddle: p.partner().coords,
            index,
        }
    }

    pub fn coords(&self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn match_point(&self, class: PairClass) -> MatchPoint<T> {
        MatchPoint {
            birth: self.birth,
            death: self.death,
            extremum_coords: self.coords(),
            other_coords: self.saddle,
            pair_class: class,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory<T> {
    pub id: usize,
    #[serde(rename = "class")]
    pub pair_class: PairClass,
    pub points: Vec<TrajectoryPoint<T>>,
    /// `segment_costs[k]` is the cost of the step from `points[k]` to
    /// `points[k + 1]`.
    pub segment_costs: Vec<T>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn start_time(&self) -> usize {
        self.points[0].t
    }

    pub fn end_time(&self) -> usize {
        self.points[self.points.len() - 1].t
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point_at(&self, t: usize) -> Option<&TrajectoryPoint<T>> {
        self.points
            .binary_search_by_key(&t, |p| p.t)
            .ok()
            .map(|k| &self.points[k])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Merge,
    Split,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Event {
    pub time_index: usize,
    pub kind: EventKind,
    pub surviving_id: usize,
    pub absorbed_id: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackingResult<T> {
    pub trajectories: Vec<Trajectory<T>>,
    pub events: Vec<Event>,
}

impl<T: Scalar> TrackingResult<T> {
    /// Concatenates results, renumbering ids in order.
    pub fn concat(parts: Vec<TrackingResult<T>>) -> Self {
        let mut trajectories = Vec::new();
        let mut events = Vec::new();
        for part in parts {
            let base = trajectories.len();
            let remap = |id: usize| base + part.trajectories.iter().position(|t| t.id == id).expect("event id");
            for e in &part.events {
                events.push(Event {
                    surviving_id: remap(e.surviving_id),
                    absorbed_id: remap(e.absorbed_id),
                    ..*e
                });
            }
            for (k, mut t) in part.trajectories.into_iter().enumerate() {
                t.id = base + k;
                trajectories.push(t);
            }
        }
        Self { trajectories, events }
    }
}

/// Chains per-step matches into trajectories. `points[k]` are the
/// candidates at step `k`, `links[k]` the `(from, to, cost)` matches
/// between steps `k` and `k + 1`. Ids follow first appearance.
pub(crate) fn chain<T: Scalar>(
    class: PairClass,
    points: Vec<Vec<TrajectoryPoint<T>>>,
    links: &[Vec<(usize, usize, T)>],
) -> Vec<Trajectory<T>> {
    const NONE: usize = usize::MAX;
    let mut trajectories: Vec<Trajectory<T>> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    for (k, step) in points.into_iter().enumerate() {
        let mut next = vec![NONE; step.len()];
        if k > 0 {
            for &(i, j, cost) in &links[k - 1] {
                let tr = active[i];
                trajectories[tr].points.push(step[j]);
                trajectories[tr].segment_costs.push(cost);
                next[j] = tr;
            }
        }
        for (j, p) in step.into_iter().enumerate() {
            if next[j] == NONE {
                next[j] = trajectories.len();
                trajectories.push(Trajectory {
                    id: trajectories.len(),
                    pair_class: class,
                    points: vec![p],
                    segment_costs: Vec::new(),
                });
            }
        }
        active = next;
    }
    trajectories
}

/// Builds trajectories from a matching series; no events.
pub fn extract_trajectories<T: Scalar>(series: &MatchingSeries<T>) -> TrackingResult<T> {
    let params = &series.params;
    let points: Vec<Vec<TrajectoryPoint<T>>> = series
        .pairs
        .iter()
        .zip(&series.times)
        .map(|(pairs, &t)| {
            pairs
                .iter()
                .enumerate()
                .map(|(i, p)| TrajectoryPoint::from_pair(t, i, p))
                .collect()
        })
        .collect();
    let links: Vec<Vec<(usize, usize, T)>> = series
        .matchings
        .iter()
        .enumerate()
        .map(|(k, m)| {
            m.matches
                .iter()
                .map(|&(i, j)| {
                    let a = MatchPoint::from(&series.pairs[k][i]);
                    let b = MatchPoint::from(&series.pairs[k + 1][j]);
                    (i, j, root_nu(lifted_cost(&a, &b, params), params.nu))
                })
                .collect()
        })
        .collect();
    TrackingResult {
        trajectories: chain(series.class, points, &links),
        events: Vec::new(),
    }
}

/// [`match_series`], [`extract_trajectories`] and [`detect_merge_split`]
/// in one call.
pub fn track_diagrams<T: Scalar>(
    diagrams: &[PersistenceDiagram<T>],
    class: PairClass,
    params: &MetricParams<T>,
    solver: SolverChoice<T>,
    epsilon: T,
    workers: usize,
) -> Result<TrackingResult<T>, TrackingError> {
    let series = match_series(diagrams, class, params, solver, workers)?;
    Ok(detect_merge_split(&extract_trajectories(&series), epsilon, params))
}
