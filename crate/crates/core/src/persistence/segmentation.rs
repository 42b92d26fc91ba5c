//! Extremum-region segmentation from a union-find sweep (split tree for
//! maxima, merge tree for minima).

use serde::{Deserialize, Serialize};

use super::{vertex_order, UnionFind};
use crate::grid::ScalarField;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepDirection {
    /// Sweep from the top: regions grow down from maxima.
    AscendingToMax,
    /// Sweep from the bottom: regions grow up from minima.
    DescendingToMin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentationField {
    /// Region label of every vertex.
    pub labels: Vec<usize>,
    /// Extremum vertex of every region label.
    pub label_to_extremum: Vec<usize>,
}

impl SegmentationField {
    pub fn num_regions(&self) -> usize {
        self.label_to_extremum.len()
    }

    /// Number of vertices carrying each label.
    pub fn region_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_regions()];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

/// Labels every vertex with the extremum of the leaf region it joins during
/// the sweep. A vertex joining one component inherits its current label;
/// where components meet, the merged component keeps the label of the older
/// extremum.
pub fn compute_segmentation<T: Scalar>(field: &ScalarField<T>, direction: SweepDirection) -> SegmentationField {
    let n = field.len();
    let (order, rank) = vertex_order(&field.values);
    let (sweep, position): (Vec<usize>, Vec<usize>) = match direction {
        SweepDirection::DescendingToMin => (order, rank),
        SweepDirection::AscendingToMax => (
            order.iter().rev().copied().collect(),
            rank.iter().map(|&r| n - 1 - r).collect(),
        ),
    };

    let mut uf = UnionFind::new(n);
    let mut root_label = vec![usize::MAX; n];
    let mut labels = vec![usize::MAX; n];
    let mut label_to_extremum = Vec::new();
    let mut roots = Vec::with_capacity(14);
    for (p, &v) in sweep.iter().enumerate() {
        roots.clear();
        field.grid.for_each_neighbor(v, |u| {
            if position[u] < p {
                roots.push(uf.find(u));
            }
        });
        roots.sort_unstable();
        roots.dedup();
        if roots.is_empty() {
            let label = label_to_extremum.len();
            label_to_extremum.push(v);
            labels[v] = label;
            root_label[v] = label;
            continue;
        }
        // labels are created in sweep order, so the smallest label is the oldest
        let label = roots.iter().map(|&r| root_label[r]).min().expect("non-empty");
        labels[v] = label;
        for &r in &roots {
            uf.union(r, v);
        }
        let root = uf.find(v);
        root_label[root] = label;
    }
    SegmentationField {
        labels,
        label_to_extremum,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{gen_gaussian_mixture, Grid};
    use std::collections::VecDeque;

    fn connected(field: &ScalarField<f64>, seg: &SegmentationField, label: usize) -> bool {
        let members: Vec<usize> = (0..field.len()).filter(|&v| seg.labels[v] == label).collect();
        let mut seen = vec![false; field.len()];
        let mut queue = VecDeque::from([members[0]]);
        seen[members[0]] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            field.grid.for_each_neighbor(v, |u| {
                if !seen[u] && seg.labels[u] == label {
                    seen[u] = true;
                    count += 1;
                    queue.push_back(u);
                }
            });
        }
        count == members.len()
    }

    #[test]
    fn unimodal_is_one_region() {
        let grid = Grid::<f64>::unit([33, 33, 1]).unwrap();
        let f = gen_gaussian_mixture(grid, &[grid.center()], &[1.0], &[0.2]).unwrap();
        let seg = compute_segmentation(&f, SweepDirection::AscendingToMax);
        assert_eq!(seg.num_regions(), 1);
        assert!(seg.labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn constant_field_is_one_region() {
        let grid = Grid::<f64>::unit([6, 6, 1]).unwrap();
        let f = ScalarField::new(grid, vec![1.0; 36], 0).unwrap();
        for dir in [SweepDirection::AscendingToMax, SweepDirection::DescendingToMin] {
            let seg = compute_segmentation(&f, dir);
            assert_eq!(seg.num_regions(), 1);
        }
    }

    #[test]
    fn two_gaussians_two_regions() {
        let grid = Grid::<f64>::unit([41, 21, 1]).unwrap();
        let f = gen_gaussian_mixture(
            grid,
            &[[0.25, 0.25, 0.0], [0.75, 0.25, 0.0]],
            &[1.0, 0.7],
            &[0.08, 0.08],
        )
        .unwrap();
        let seg = compute_segmentation(&f, SweepDirection::AscendingToMax);
        assert_eq!(seg.num_regions(), 2);
        let a = grid.index([10, 10, 0]);
        let b = grid.index([30, 10, 0]);
        assert_eq!(seg.label_to_extremum, vec![a, b]);
        assert_ne!(seg.labels[a], seg.labels[b]);
        for l in 0..2 {
            assert_eq!(seg.labels[seg.label_to_extremum[l]], l);
            assert!(connected(&f, &seg, l));
        }
        assert_eq!(seg.labels[grid.index([14, 10, 0])], 0);
        assert_eq!(seg.labels[grid.index([28, 10, 0])], 1);
    }
}
