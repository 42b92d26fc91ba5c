//! Persistence diagrams of extremum pairs on regular grids.
//!
//! Minimum-saddle pairs come from a sweep over the vertices in increasing
//! order, maintaining sublevel-set components in a union-find; when
//! components meet at a vertex, every component but the one with the oldest
//! (lowest) minimum dies there. Saddle-maximum pairs come from the symmetric
//! sweep in decreasing order. Scalar ties are broken by vertex id.

mod io;
mod segmentation;
mod union_find;

pub use io::{diagram_file_name, load_diagram, save_diagram, DiagramIoError};
pub use segmentation::{compute_segmentation, SegmentationField, SweepDirection};
pub use union_find::UnionFind;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::grid::{Grid, ScalarField};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalIndex {
    Minimum,
    Saddle,
    Maximum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint<T> {
    pub vertex_id: usize,
    pub coords: [T; 3],
    pub value: T,
    pub index: CriticalIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairClass {
    MinSaddle,
    SaddleMax,
}

impl PairClass {
    pub fn as_str(self) -> &'static str {
        match self {
            PairClass::MinSaddle => "min_saddle",
            PairClass::SaddleMax => "saddle_max",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "min_saddle" | "minima" => Some(PairClass::MinSaddle),
            "saddle_max" | "maxima" => Some(PairClass::SaddleMax),
            _ => None,
        }
    }
}

/// A persistence pair. For both classes `birth <= death`: minimum-saddle
/// pairs are born at the minimum, saddle-maximum pairs are born at the saddle
/// and die at the maximum. The essential pair joins the global minimum and
/// the global maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistencePair<T> {
    pub birth_point: CriticalPoint<T>,
    pub death_point: CriticalPoint<T>,
    pub birth: T,
    pub death: T,
    pub persistence: T,
    pub pair_class: PairClass,
    pub essential: bool,
}

impl<T: Scalar> PersistencePair<T> {
    pub fn new(
        birth_point: CriticalPoint<T>,
        death_point: CriticalPoint<T>,
        pair_class: PairClass,
        essential: bool,
    ) -> Self {
        let birth = birth_point.value;
        let death = death_point.value;
        Self {
            birth_point,
            death_point,
            birth,
            death,
            persistence: death - birth,
            pair_class,
            essential,
        }
    }

    /// The extremum that carries the feature: the minimum of a min-saddle
    /// pair, the maximum of a saddle-max pair.
    pub fn extremum(&self) -> &CriticalPoint<T> {
        match self.pair_class {
            PairClass::MinSaddle => &self.birth_point,
            PairClass::SaddleMax => &self.death_point,
        }
    }

    /// The other critical point of the pair (the saddle for ordinary pairs).
    pub fn partner(&self) -> &CriticalPoint<T> {
        match self.pair_class {
            PairClass::MinSaddle => &self.death_point,
            PairClass::SaddleMax => &self.birth_point,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram<T> {
    pub time_index: usize,
    pub pairs: Vec<PersistencePair<T>>,
    pub field_range: (T, T),
}

impl<T: Scalar> PersistenceDiagram<T> {
    /// Pairs of one class, in diagram order.
    pub fn class_pairs(&self, class: PairClass) -> Vec<PersistencePair<T>> {
        self.pairs.iter().filter(|p| p.pair_class == class).copied().collect()
    }

    pub fn count(&self, class: PairClass) -> usize {
        self.pairs.iter().filter(|p| p.pair_class == class).count()
    }

    pub fn range_extent(&self) -> T {
        self.field_range.1 - self.field_range.0
    }
}

/// Vertex order by `(value, vertex_id)`; returns the sorted vertices and the
/// rank of every vertex.
pub(crate) fn vertex_order<T: Scalar>(values: &[T]) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut rank = vec![0; values.len()];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    (order, rank)
}

/// Sweeps `order` (processing position p before p+1) and returns the
/// `(extremum, saddle)` pairs produced by the elder rule.
fn elder_sweep<T: Scalar>(grid: &Grid<T>, order: &[usize], position: &[usize]) -> Vec<(usize, usize)> {
    let n = order.len();
    let mut uf = UnionFind::new(n);
    // oldest extremum of each component, stored at its root
    let mut oldest = vec![usize::MAX; n];
    let mut pairs = Vec::new();
    let mut roots: Vec<usize> = Vec::with_capacity(14);
    for (p, &v) in order.iter().enumerate() {
        roots.clear();
        grid.for_each_neighbor(v, |u| {
            if position[u] < p {
                roots.push(uf.find(u));
            }
        });
        roots.sort_unstable();
        roots.dedup();
        match roots.len() {
            0 => {
                oldest[v] = v;
            }
            _ => {
                let survivor = *roots.iter().min_by_key(|&&r| position[oldest[r]]).expect("non-empty");
                let keep = oldest[survivor];
                for &r in roots.iter().filter(|&&r| r != survivor) {
                    pairs.push((oldest[r], v));
                }
                for &r in roots.iter() {
                    uf.union(r, v);
                }
                let root = uf.find(v);
                oldest[root] = keep;
            }
        }
    }
    pairs
}

fn critical<T: Scalar>(field: &ScalarField<T>, v: usize, index: CriticalIndex) -> CriticalPoint<T> {
    CriticalPoint {
        vertex_id: v,
        coords: field.grid.position(v),
        value: field.values[v],
        index,
    }
}

fn sort_class<T: Scalar>(pairs: &mut [PersistencePair<T>]) {
    pairs.sort_by(|a, b| {
        b.essential
            .cmp(&a.essential)
            .then(b.persistence.partial_cmp(&a.persistence).unwrap_or(Ordering::Equal))
            .then(a.extremum().vertex_id.cmp(&b.extremum().vertex_id))
    });
}

/// Minimum-saddle and saddle-maximum pairs of `field`, plus the essential
/// pair in each class. Each class is ordered essential first, then by
/// decreasing persistence.
pub fn compute_diagram<T: Scalar>(field: &ScalarField<T>) -> PersistenceDiagram<T> {
    let n = field.len();
    let (order, rank) = vertex_order(&field.values);
    let global_min = order[0];
    let global_max = order[n - 1];

    let mut min_pairs: Vec<_> = elder_sweep(&field.grid, &order, &rank)
        .into_iter()
        .map(|(m, s)| {
            PersistencePair::new(
                critical(field, m, CriticalIndex::Minimum),
                critical(field, s, CriticalIndex::Saddle),
                PairClass::MinSaddle,
                false,
            )
        })
        .collect();

    let desc: Vec<usize> = order.iter().rev().copied().collect();
    let desc_pos: Vec<usize> = rank.iter().map(|&r| n - 1 - r).collect();
    let mut max_pairs: Vec<_> = elder_sweep(&field.grid, &desc, &desc_pos)
        .into_iter()
        .map(|(m, s)| {
            PersistencePair::new(
                critical(field, s, CriticalIndex::Saddle),
                critical(field, m, CriticalIndex::Maximum),
                PairClass::SaddleMax,
                false,
            )
        })
        .collect();

    let lo = critical(field, global_min, CriticalIndex::Minimum);
    let hi = critical(field, global_max, CriticalIndex::Maximum);
    min_pairs.push(PersistencePair::new(lo, hi, PairClass::MinSaddle, true));
    max_pairs.push(PersistencePair::new(lo, hi, PairClass::SaddleMax, true));
    sort_class(&mut min_pairs);
    sort_class(&mut max_pairs);
    min_pairs.extend(max_pairs);

    PersistenceDiagram {
        time_index: field.time_index,
        pairs: min_pairs,
        field_range: (lo.value, hi.value),
    }
}

/// Resolves a persistence threshold, given either in scalar units or as a
/// fraction of the diagram's field range.
pub fn threshold_value<T: Scalar>(diagram: &PersistenceDiagram<T>, min_persistence: T, as_fraction: bool) -> T {
    if as_fraction {
        min_persistence * diagram.range_extent()
    } else {
        min_persistence
    }
}

/// Keeps pairs whose persistence strictly exceeds the threshold; essential
/// pairs are always kept.
pub fn threshold_diagram<T: Scalar>(
    diagram: &PersistenceDiagram<T>,
    min_persistence: T,
    as_fraction: bool,
) -> PersistenceDiagram<T> {
    let cut = threshold_value(diagram, min_persistence, as_fraction);
    PersistenceDiagram {
        time_index: diagram.time_index,
        pairs: diagram
            .pairs
            .iter()
            .filter(|p| p.essential || p.persistence > cut)
            .copied()
            .collect(),
        field_range: diagram.field_range,
    }
}
