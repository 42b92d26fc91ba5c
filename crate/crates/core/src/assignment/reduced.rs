//! Kuhn-Munkres on the reduced `(n+1) x m` matrix.
//!
//! Rows are the pairs of the smaller diagram (roles are swapped when the
//! first diagram is larger), columns the pairs of the other one. The extra
//! last row holds the diagonal costs of the column pairs and may carry any
//! number of starred zeros. Entries are never rewritten: the current value
//! of an interior cell is `c_ij + rho_i + rho_j` and of a last-row cell
//! `diag_j + rho_j`, where `rho` accumulates everything added to a row or
//! column. Each row starts at `rho_i = -diag_i`.
//!
//! The search is the usual star/prime/cover scheme, with uncovered columns
//! grown as alternating trees rooted at the unstarred columns. Instead of
//! scanning for zeros, each uncovered row keeps the offset at which its
//! smallest uncovered entry reaches zero in a heap, so an epsilon-reduction
//! is a heap pop and the residuals are updated once per phase.
//!
//! The loop ends once every column holds a star; at that point the
//! residuals form a feasible dual of the full problem that is tight on
//! every star, so the assignment is optimal. The fallback pass re-solves
//! the full matrix from those residuals and only changes how ties are
//! resolved.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::munkres::{hungarian, HungarianWarmStart};
use super::{AssignmentProblem, AssignmentResult, SolverKind, SolverStats};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Default)]
pub struct ReducedOptions {
    /// Always finish with the dense warm-started pass, even when the
    /// first phase needs no correction.
    pub force_fallback: bool,
}

/// Internal state at termination, in the orientation actually solved
/// (rows = smaller diagram).
#[derive(Debug, Clone)]
pub struct ReducedTrace<T> {
    pub transposed: bool,
    /// `n + 1` entries; the last row's residual is always zero.
    pub row_residuals: Vec<T>,
    pub col_residuals: Vec<T>,
    pub banned: Vec<usize>,
    /// Stars in the last row of non-banned columns whose column has an
    /// entry below its row residual.
    pub fallback_condition: bool,
    pub fallback_used: bool,
}

impl<T> Default for ReducedTrace<T> {
    fn default() -> Self {
        Self {
            transposed: false,
            row_residuals: Vec::new(),
            col_residuals: Vec::new(),
            banned: Vec::new(),
            fallback_condition: false,
            fallback_used: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Star {
    Free,
    Row(usize),
    Last,
}

const NONE: usize = usize::MAX;

#[inline]
fn val<T: Scalar>(c: T, rho_i: T, rho_j: T) -> T {
    (c + rho_i) + rho_j
}

pub fn reduced<T: Scalar>(
    problem: &AssignmentProblem<T>,
    options: &ReducedOptions,
) -> (AssignmentResult<T>, ReducedTrace<T>) {
    let base_stats = SolverStats {
        pruned_fraction: problem.pruned_fraction,
        ..SolverStats::default()
    };
    if problem.n == 0 || problem.m == 0 {
        let r = AssignmentResult {
            stats: base_stats,
            ..problem.all_diagonal(SolverKind::ReducedMunkres)
        };
        return (r, ReducedTrace::default());
    }
    if problem.n > problem.m {
        let t = problem.transposed();
        let (r, mut trace) = Solver::new(&t).run(options);
        let mut r = r.swapped();
        r.total_cost = problem.evaluate(&r.matches);
        r.stats.transposed = true;
        trace.transposed = true;
        return (r, trace);
    }
    Solver::new(problem).run(options)
}

/// Heap entry: row `row` gets a zero once the phase offset reaches `key`.
#[derive(Debug, Clone, Copy)]
struct Event<T> {
    key: T,
    row: usize,
}

impl<T: Scalar> PartialEq for Event<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Event<T> {}

impl<T: Scalar> PartialOrd for Event<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Event<T> {
    // reversed: BinaryHeap pops the smallest key, then the lowest row
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .partial_cmp(&self.key)
            .unwrap_or(Ordering::Equal)
            .then(other.row.cmp(&self.row))
    }
}

struct Solver<'a, T> {
    p: &'a AssignmentProblem<T>,
    n: usize,
    m: usize,
    cols: Vec<Vec<(usize, T)>>,
    row_res: Vec<T>,
    col_res: Vec<T>,
    star_col: Vec<usize>,
    star_of_col: Vec<Star>,
    banned: Vec<bool>,
    tol: T,
    // Per phase. Reductions are applied lazily: `offset` is the total
    // epsilon subtracted so far in the phase, and covered rows / tree
    // columns remember the offset at which they joined.
    offset: T,
    row_covered: Vec<bool>,
    row_join: Vec<T>,
    col_join: Vec<T>,
    prime_col: Vec<usize>,
    key: Vec<T>,
    key_col: Vec<usize>,
    heap: BinaryHeap<Event<T>>,
    tree_cols: Vec<usize>,
    covered_rows: Vec<usize>,
    stats: SolverStats,
}

impl<'a, T: Scalar> Solver<'a, T> {
    fn new(p: &'a AssignmentProblem<T>) -> Self {
        let (n, m) = (p.n, p.m);
        let mut cols = vec![Vec::new(); m];
        for (i, row) in p.rows.iter().enumerate() {
            for &(j, c) in row {
                cols[j].push((i, c));
            }
        }
        let scale = p.cost_scale().max(T::one());
        Self {
            p,
            n,
            m,
            cols,
            row_res: p.diag_1.iter().map(|&d| -d).collect(),
            col_res: vec![T::zero(); m],
            star_col: vec![NONE; n],
            star_of_col: vec![Star::Free; m],
            banned: vec![false; m],
            tol: T::epsilon() * T::lit(64.0) * scale,
            offset: T::zero(),
            row_covered: vec![false; n],
            row_join: vec![T::zero(); n],
            col_join: vec![T::zero(); m],
            prime_col: vec![NONE; n],
            key: vec![T::infinity(); n + 1],
            key_col: vec![NONE; n + 1],
            heap: BinaryHeap::new(),
            tree_cols: Vec::new(),
            covered_rows: Vec::new(),
            stats: SolverStats {
                pruned_fraction: p.pruned_fraction,
                ..SolverStats::default()
            },
        }
    }

    #[inline]
    fn last(&self, j: usize) -> T {
        self.p.diag_2[j] + self.col_res[j]
    }

    fn run(mut self, options: &ReducedOptions) -> (AssignmentResult<T>, ReducedTrace<T>) {
        self.reduce_columns();
        let mut stars = self.star_initial();
        while stars < self.m {
            self.phase();
            stars += 1;
        }

        let fallback_condition = self.fallback_condition();
        let use_fallback = fallback_condition || options.force_fallback;
        let partners = if use_fallback {
            self.stats.fallback_used = true;
            self.fallback()
        } else {
            self.star_col.iter().map(|&c| (c != NONE).then_some(c)).collect()
        };
        let mut row_residuals = self.row_res.clone();
        row_residuals.push(T::zero());
        let banned: Vec<usize> = (0..self.m).filter(|&j| self.banned[j]).collect();
        self.stats.banned_columns = banned.len();
        let trace = ReducedTrace {
            transposed: false,
            row_residuals,
            col_residuals: self.col_res.clone(),
            banned,
            fallback_condition,
            fallback_used: use_fallback,
        };
        let result = AssignmentResult::from_partners(self.p, &partners, SolverKind::ReducedMunkres, self.stats);
        (result, trace)
    }

    fn reduce_columns(&mut self) {
        for j in 0..self.m {
            let mut mn = self.p.diag_2[j];
            for &(i, c) in &self.cols[j] {
                mn = mn.min(c + self.row_res[i]);
            }
            self.col_res[j] = -mn;
        }
    }

    /// Greedy stars in (row, col) order; every zero of the last row is
    /// independent of the others.
    fn star_initial(&mut self) -> usize {
        let mut stars = 0;
        for i in 0..self.n {
            for &(j, c) in &self.p.rows[i] {
                if self.star_of_col[j] == Star::Free && val(c, self.row_res[i], self.col_res[j]) <= self.tol {
                    self.star_of_col[j] = Star::Row(i);
                    self.star_col[i] = j;
                    stars += 1;
                    break;
                }
            }
        }
        for j in 0..self.m {
            if self.star_of_col[j] == Star::Free && self.last(j) <= self.tol {
                self.star_of_col[j] = Star::Last;
                stars += 1;
            }
        }
        stars
    }

    /// Uncovers column `j` (adds it to the alternating tree).
    fn join_column(&mut self, j: usize) {
        self.col_join[j] = self.offset;
        self.tree_cols.push(j);
        for k in 0..self.cols[j].len() {
            let (i, c) = self.cols[j][k];
            if self.row_covered[i] {
                continue;
            }
            let at = self.offset + val(c, self.row_res[i], self.col_res[j]);
            self.offer(i, j, at);
        }
        let at = self.offset + self.last(j);
        self.offer(self.n, j, at);
    }

    #[inline]
    fn offer(&mut self, row: usize, col: usize, at: T) {
        if at < self.key[row] || (at == self.key[row] && col < self.key_col[row]) {
            self.key[row] = at;
            self.key_col[row] = col;
            self.heap.push(Event { key: at, row });
        }
    }

    fn pop(&mut self) -> Event<T> {
        while let Some(e) = self.heap.pop() {
            let live = e.row == self.n || !self.row_covered[e.row];
            if live && e.key == self.key[e.row] {
                return e;
            }
        }
        unreachable!("the last row reaches every column")
    }

    /// One search from the current stars to a new star.
    fn phase(&mut self) {
        self.offset = T::zero();
        self.row_covered.fill(false);
        self.prime_col.fill(NONE);
        self.key.fill(T::infinity());
        self.key_col.fill(NONE);
        self.heap.clear();
        self.tree_cols.clear();
        self.covered_rows.clear();
        for j in 0..self.m {
            if self.star_of_col[j] == Star::Free {
                self.join_column(j);
            }
        }

        loop {
            let e = self.pop();
            if e.key > self.offset + self.tol {
                // no uncovered zero left: epsilon-reduction
                self.offset = e.key;
                self.stats.reductions += 1;
                let lc = self.key_col[self.n];
                if self.key[self.n] <= self.offset + self.tol && self.ban_criterion(lc) {
                    self.finish_phase();
                    self.banned[lc] = true;
                    self.augment(None, lc);
                    return;
                }
            }
            let (r, c) = (e.row, self.key_col[e.row]);
            if r == self.n {
                self.finish_phase();
                self.augment(None, c);
                return;
            }
            self.prime_col[r] = c;
            let sc = self.star_col[r];
            if sc == NONE {
                self.finish_phase();
                self.augment(Some(r), c);
                return;
            }
            self.row_covered[r] = true;
            self.row_join[r] = self.offset;
            self.covered_rows.push(r);
            self.join_column(sc);
        }
    }

    /// Applies the pending reductions to the residuals.
    fn finish_phase(&mut self) {
        for &i in &self.covered_rows {
            self.row_res[i] += self.offset - self.row_join[i];
        }
        for &j in &self.tree_cols {
            self.col_res[j] -= self.offset - self.col_join[j];
        }
    }

    /// Every entry of tree column `j` exceeds its row residual, with the
    /// pending reductions included.
    fn ban_criterion(&self, j: usize) -> bool {
        let col_res = self.col_res[j] - (self.offset - self.col_join[j]);
        self.cols[j].iter().all(|&(i, c)| {
            let row_res = if self.row_covered[i] {
                self.row_res[i] + (self.offset - self.row_join[i])
            } else {
                self.row_res[i]
            };
            val(c, row_res, col_res) > row_res
        })
    }

    /// Flips the alternating path that ends with the primed zero at
    /// `(row, col)`; `row == None` is the last row.
    fn augment(&mut self, row: Option<usize>, col: usize) {
        let (mut row, mut col) = (row, col);
        loop {
            let prev = self.star_of_col[col];
            match row {
                Some(r) => {
                    self.star_of_col[col] = Star::Row(r);
                    self.star_col[r] = col;
                }
                None => self.star_of_col[col] = Star::Last,
            }
            match prev {
                Star::Free => break,
                Star::Row(r2) => {
                    row = Some(r2);
                    col = self.prime_col[r2];
                    debug_assert!(col != NONE, "starred row on the path is primed");
                }
                Star::Last => unreachable!("last-row stars stay covered"),
            }
        }
        self.stats.iterations += 1;
    }

    fn fallback_condition(&self) -> bool {
        (0..self.m).any(|j| {
            self.star_of_col[j] == Star::Last
                && !self.banned[j]
                && self.cols[j]
                    .iter()
                    .any(|&(i, c)| val(c, self.row_res[i], self.col_res[j]) < self.row_res[i])
        })
    }

    /// Dense Kuhn-Munkres on the full matrix without banned columns,
    /// warm-started from the residuals and the current stars.
    fn fallback(&mut self) -> Vec<Option<usize>> {
        let n = self.n;
        let kept: Vec<usize> = (0..self.m).filter(|&j| !self.banned[j]).collect();
        let k = kept.len();
        let size = n + k;
        let mut a = vec![T::zero(); size * size];
        for i in 0..n {
            let row = &mut a[i * size..(i + 1) * size];
            row[..k].fill(T::infinity());
            row[k..].fill(self.p.diag_1[i]);
        }
        for (kk, &j) in kept.iter().enumerate() {
            for &(i, c) in &self.cols[j] {
                a[i * size + kk] = c;
            }
            for r in n..size {
                a[r * size + kk] = self.p.diag_2[j];
            }
        }

        let mut u = vec![T::zero(); size];
        let mut v = vec![T::zero(); size];
        for i in 0..n {
            u[i] = -self.row_res[i];
        }
        let mut col_to_row = vec![None; size];
        for (kk, &j) in kept.iter().enumerate() {
            v[kk] = -self.col_res[j];
            col_to_row[kk] = match self.star_of_col[j] {
                Star::Row(i) => Some(i),
                Star::Last => Some(n + kk),
                Star::Free => None,
            };
        }
        let (row_to_col, aug, upd) = hungarian(&a, size, Some(HungarianWarmStart { u, v, col_to_row }));
        self.stats.iterations += aug;
        self.stats.reductions += upd;
        (0..n)
            .map(|i| (row_to_col[i] < k).then(|| kept[row_to_col[i]]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::{brute, full_munkres};

    fn dense(rows: &[&[f64]], d1: &[f64], d2: &[f64]) -> AssignmentProblem<f64> {
        let rows = rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|e| e.1.is_finite())
                    .map(|(j, &c)| (j, c))
                    .collect()
            })
            .collect();
        AssignmentProblem::new(rows, d1.to_vec(), d2.to_vec())
    }

    #[test]
    fn stopping_at_k_covered_columns_is_not_enough() {
        // One row, two columns. Covering a single column stars (0, 0) with
        // cost 0.1 + 1.0 (q_1 to the diagonal); the optimum is (0, 1).
        let p = dense(&[&[0.1, 0.1]], &[0.6], &[0.1, 1.0]);
        let (r, _) = reduced(&p, &ReducedOptions::default());
        assert_eq!(r.matches, vec![(0, 1)]);
        assert!((r.total_cost - 0.2).abs() < 1e-12);
        assert_eq!(r.total_cost, brute(&p).unwrap().total_cost);
    }

    #[test]
    fn forced_fallback_keeps_the_optimum() {
        let p = dense(
            &[
                &[0.3, 0.9, 0.5, f64::INFINITY],
                &[0.2, 0.1, 0.8, 0.4],
                &[0.7, 0.6, 0.05, 0.3],
            ],
            &[0.4, 0.2, 0.3],
            &[0.1, 0.5, 0.2, 0.35],
        );
        let (plain, _) = reduced(&p, &ReducedOptions::default());
        let (forced, trace) = reduced(&p, &ReducedOptions { force_fallback: true });
        assert!(trace.fallback_used && forced.stats.fallback_used);
        assert!((plain.total_cost - forced.total_cost).abs() < 1e-12);
        assert!((forced.total_cost - brute(&p).unwrap().total_cost).abs() < 1e-12);
    }

    #[test]
    fn residuals_stay_feasible() {
        let p = dense(
            &[
                &[0.5, 0.2, 0.9, 0.4, 0.1],
                &[0.3, 0.8, 0.2, 0.6, 0.7],
                &[0.1, 0.4, 0.3, 0.2, 0.5],
            ],
            &[0.25, 0.35, 0.15],
            &[0.2, 0.1, 0.3, 0.05, 0.4],
        );
        let (r, trace) = reduced(&p, &ReducedOptions::default());
        for (i, row) in p.rows.iter().enumerate() {
            // top-right block of the full matrix: diag_i + rho_i
            assert!(p.diag_1[i] + trace.row_residuals[i] >= -1e-12);
            for &(j, c) in row {
                assert!(c + trace.row_residuals[i] + trace.col_residuals[j] >= -1e-12);
            }
        }
        for j in 0..p.m {
            assert!(p.diag_2[j] + trace.col_residuals[j] >= -1e-12);
        }
        assert!((r.total_cost - full_munkres(&p).total_cost).abs() < 1e-12);
    }

    #[test]
    fn wide_and_tall_agree() {
        let p = dense(&[&[0.2, 0.6], &[0.9, 0.1], &[0.4, 0.4]], &[0.3, 0.2, 0.5], &[0.25, 0.3]);
        let (r, trace) = reduced(&p, &ReducedOptions::default());
        assert!(trace.transposed && r.stats.transposed);
        assert!((r.total_cost - brute(&p).unwrap().total_cost).abs() < 1e-12);
        let (rt, _) = reduced(&p.transposed(), &ReducedOptions::default());
        assert!((rt.total_cost - r.total_cost).abs() < 1e-12);
    }
}
