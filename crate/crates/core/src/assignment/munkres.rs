//! Dense Kuhn-Munkres with row/column potentials.

use super::{AssignmentProblem, AssignmentResult, SolverKind, SolverStats};
use crate::scalar::Scalar;

/// Feasible dual potentials and a partial matching of tight entries to
/// start from. Rows absent from `col_to_row` are augmented one by one.
#[derive(Debug, Clone)]
pub struct HungarianWarmStart<T> {
    pub u: Vec<T>,
    pub v: Vec<T>,
    pub col_to_row: Vec<Option<usize>>,
}

/// Minimum-cost perfect matching of a square `size x size` row-major matrix.
/// Infinite entries are forbidden. Returns `row_to_col` and the counts of
/// augmentations and dual updates.
///
/// Panics if no perfect matching with finite cost exists.
pub fn hungarian<T: Scalar>(cost: &[T], size: usize, warm: Option<HungarianWarmStart<T>>) -> (Vec<usize>, u64, u64) {
    assert_eq!(cost.len(), size * size);
    let inf = T::infinity();
    // 1-based; column 0 is the virtual root of each search
    let mut u = vec![T::zero(); size + 1];
    let mut v = vec![T::zero(); size + 1];
    let mut p = vec![0usize; size + 1];
    let mut way = vec![0usize; size + 1];
    let mut matched_row = vec![false; size + 1];
    if let Some(w) = warm {
        u[1..].copy_from_slice(&w.u);
        v[1..].copy_from_slice(&w.v);
        for (j, r) in w.col_to_row.iter().enumerate() {
            if let Some(r) = r {
                p[j + 1] = r + 1;
                matched_row[r + 1] = true;
            }
        }
    }

    let mut augmentations = 0u64;
    let mut updates = 0u64;
    let mut minv = vec![inf; size + 1];
    let mut used = vec![false; size + 1];
    for i in 1..=size {
        if matched_row[i] {
            continue;
        }
        p[0] = i;
        let mut j0 = 0usize;
        minv.fill(inf);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let row = &cost[(i0 - 1) * size..i0 * size];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=size {
                if used[j] {
                    continue;
                }
                let cur = row[j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                // among equal slacks prefer a free column: it ends the search
                if minv[j] < delta || (minv[j] == delta && p[j] == 0 && j1 != 0 && p[j1] != 0) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            assert!(j1 != 0, "no finite perfect matching");
            for j in 0..=size {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            updates += 1;
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
        augmentations += 1;
    }

    let mut row_to_col = vec![0usize; size];
    for j in 1..=size {
        row_to_col[p[j] - 1] = j - 1;
    }
    (row_to_col, augmentations, updates)
}

/// Builds the classical `(n+m) x (n+m)` matrix: cross costs top-left, each
/// row of the first diagram repeats its diagonal cost across the top-right
/// block, each column of the second diagram repeats its diagonal cost down
/// the bottom-left block, and zeros bottom-right.
pub(crate) fn full_matrix<T: Scalar>(problem: &AssignmentProblem<T>) -> Vec<T> {
    let (n, m) = (problem.n, problem.m);
    let size = n + m;
    let mut a = vec![T::zero(); size * size];
    for i in 0..n {
        let row = &mut a[i * size..(i + 1) * size];
        row[..m].fill(T::infinity());
        for &(j, c) in &problem.rows[i] {
            row[j] = c;
        }
        row[m..].fill(problem.diag_1[i]);
    }
    for i in n..size {
        let row = &mut a[i * size..(i + 1) * size];
        row[..m].copy_from_slice(&problem.diag_2);
    }
    a
}

/// Exact solver on the full matrix. Pruned entries, if any, are forbidden.
pub fn full_munkres<T: Scalar>(problem: &AssignmentProblem<T>) -> AssignmentResult<T> {
    let stats = SolverStats {
        pruned_fraction: problem.pruned_fraction,
        ..SolverStats::default()
    };
    if problem.n == 0 || problem.m == 0 {
        return AssignmentResult {
            stats,
            ..problem.all_diagonal(SolverKind::FullMunkres)
        };
    }
    let size = problem.n + problem.m;
    let a = full_matrix(problem);
    let (row_to_col, augmentations, updates) = hungarian(&a, size, None);
    let partners: Vec<Option<usize>> = row_to_col[..problem.n]
        .iter()
        .map(|&j| (j < problem.m).then_some(j))
        .collect();
    AssignmentResult::from_partners(
        problem,
        &partners,
        SolverKind::FullMunkres,
        SolverStats {
            iterations: augmentations,
            reductions: updates,
            ..stats
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for k in 0..=p.len() {
                let mut q = p.clone();
                q.insert(k, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn matches_permutation_enumeration() {
        let size = 5;
        let mut state = 12345u64;
        for _ in 0..50 {
            let a: Vec<f64> = (0..size * size)
                .map(|_| {
                    state = state
                        .wrapping_mul(6364136223846793005)
                        .wrapping_add(1442695040888963407);
                    ((state >> 33) % 1000) as f64 / 100.0
                })
                .collect();
            let (r2c, _, _) = hungarian(&a, size, None);
            let got: f64 = (0..size).map(|i| a[i * size + r2c[i]]).sum();
            let best = permutations(size)
                .iter()
                .map(|p| (0..size).map(|i| a[i * size + p[i]]).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            assert!((got - best).abs() < 1e-9);
        }
    }

    #[test]
    fn forbidden_entries_are_avoided() {
        let inf = f64::INFINITY;
        let a = vec![1.0, inf, inf, 5.0, 2.0, inf, 9.0, 9.0, 1.0];
        let (r2c, _, _) = hungarian(&a, 3, None);
        assert_eq!(r2c, vec![0, 1, 2]);
    }

    #[test]
    fn warm_start_reaches_the_same_optimum() {
        let a = vec![4.0, 1.0, 3.0, 2.0, 0.0, 5.0, 3.0, 2.0, 2.0];
        // u = row minima, v = 0; row 0 tightly matched to column 1
        let warm = HungarianWarmStart {
            u: vec![1.0, 0.0, 2.0],
            v: vec![0.0; 3],
            col_to_row: vec![None, Some(0), None],
        };
        let (r2c, aug, _) = hungarian(&a, 3, Some(warm));
        let cold = hungarian(&a, 3, None).0;
        let cost = |r: &[usize]| (0..3).map(|i| a[i * 3 + r[i]]).sum::<f64>();
        assert_eq!(cost(&r2c), cost(&cold));
        assert_eq!(aug, 2);
    }
}
