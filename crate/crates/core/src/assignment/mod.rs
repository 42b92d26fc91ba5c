//! Optimal partial matchings between two persistence diagrams.
//!
//! Every pair of the first diagram is either matched to a pair of the second
//! diagram or sent to the diagonal, and symmetrically. Solvers minimize the
//! sum of costs raised to the power `nu`; the root is only taken when a
//! distance is reported.
//!
//! Four solvers share the same [`AssignmentProblem`]:
//!
//! * [`solve_full_munkres`]: Kuhn-Munkres on the classical `(n+m)^2` matrix.
//! * [`solve_reduced`]: Kuhn-Munkres on a sparse `(n+1) x m` matrix whose
//!   last row holds the diagonal costs of the second diagram.
//! * [`solve_auction`]: Bertsekas auction with epsilon scaling (approximate).
//! * [`brute_force`]: exhaustive enumeration, for tests.

mod auction;
mod brute;
mod munkres;
mod reduced;

pub use auction::{accuracy_budget, auction, AuctionOptions};
pub use brute::{brute, BRUTE_FORCE_LIMIT};
pub use munkres::{full_munkres, hungarian, HungarianWarmStart};
pub use reduced::{reduced, ReducedOptions, ReducedTrace};

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{diagonal_cost_pow, lifted_cost, prune_predicate, MatchPoint, MetricError, MetricParams};
use crate::persistence::PairClass;
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum AssignmentError {
    #[error("brute force is limited to {limit} pairs in total, got {n} + {m}")]
    SizeGuard { n: usize, m: usize, limit: usize },
    #[error("diagrams mix pair classes ({0:?} and {1:?})")]
    ClassMismatch(PairClass, PairClass),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("non-finite cost between pairs {0} and {1}")]
    NonFinite(usize, usize),
    #[error("auction accuracy must be positive, got {0}")]
    InvalidAccuracy(f64),
    #[error("auction did not converge after {rounds} rounds")]
    NonConvergence {
        rounds: u64,
        partial: Box<AssignmentResult<f64>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    FullMunkres,
    ReducedMunkres,
    Auction,
    BruteForce,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::FullMunkres => "full",
            SolverKind::ReducedMunkres => "reduced",
            SolverKind::Auction => "auction",
            SolverKind::BruteForce => "brute_force",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    /// Augmenting paths (Munkres) or bids (auction).
    pub iterations: u64,
    /// Matrix reductions (Munkres) or epsilon-scaling phases (auction).
    pub reductions: u64,
    pub rounds: u64,
    pub banned_columns: usize,
    pub fallback_used: bool,
    pub transposed: bool,
    /// Fraction of cross entries removed by the pruning predicate.
    pub pruned_fraction: f64,
    pub wall_ms: f64,
}

/// A partial matching between two diagrams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentResult<T> {
    /// `(index in D1, index in D2)`, sorted by the first index.
    pub matches: Vec<(usize, usize)>,
    pub unmatched_1: Vec<usize>,
    pub unmatched_2: Vec<usize>,
    /// Sum of the matching costs raised to `nu`.
    pub total_cost: T,
    pub solver: SolverKind,
    pub stats: SolverStats,
}

impl<T: Scalar> AssignmentResult<T> {
    /// Builds a result from `partner_of_1[i] = Some(j)` and fills the
    /// unmatched lists and the cost.
    pub(crate) fn from_partners(
        problem: &AssignmentProblem<T>,
        partner_of_1: &[Option<usize>],
        solver: SolverKind,
        stats: SolverStats,
    ) -> Self {
        let mut matched_2 = vec![false; problem.m];
        let mut matches = Vec::new();
        let mut unmatched_1 = Vec::new();
        for (i, p) in partner_of_1.iter().enumerate() {
            match p {
                Some(j) => {
                    matches.push((i, *j));
                    matched_2[*j] = true;
                }
                None => unmatched_1.push(i),
            }
        }
        let unmatched_2 = (0..problem.m).filter(|&j| !matched_2[j]).collect();
        let total_cost = problem.evaluate(&matches);
        Self {
            matches,
            unmatched_1,
            unmatched_2,
            total_cost,
            solver,
            stats,
        }
    }

    /// The result with the roles of the two diagrams exchanged.
    pub fn swapped(mut self) -> Self {
        let mut matches: Vec<_> = self.matches.iter().map(|&(i, j)| (j, i)).collect();
        matches.sort_unstable();
        self.matches = matches;
        std::mem::swap(&mut self.unmatched_1, &mut self.unmatched_2);
        self
    }

    pub fn to_f64(&self) -> AssignmentResult<f64> {
        AssignmentResult {
            matches: self.matches.clone(),
            unmatched_1: self.unmatched_1.clone(),
            unmatched_2: self.unmatched_2.clone(),
            total_cost: self.total_cost.as_f64(),
            solver: self.solver,
            stats: self.stats.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pruning {
    /// Drop cross entries that cost more than sending both pairs to the diagonal.
    Enabled,
    Disabled,
}

/// Cost data of one matching problem: sparse cross costs (absent entries
/// are pruned) and the diagonal costs of both diagrams, all raised to `nu`.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentProblem<T> {
    pub n: usize,
    pub m: usize,
    /// Per row of the first diagram, `(column, cost)` sorted by column.
    pub rows: Vec<Vec<(usize, T)>>,
    pub diag_1: Vec<T>,
    pub diag_2: Vec<T>,
    pub pruned_fraction: f64,
}

impl<T: Scalar> AssignmentProblem<T> {
    pub fn new(rows: Vec<Vec<(usize, T)>>, diag_1: Vec<T>, diag_2: Vec<T>) -> Self {
        let n = diag_1.len();
        let m = diag_2.len();
        assert_eq!(rows.len(), n, "one entry list per row");
        let mut rows = rows;
        for r in rows.iter_mut() {
            r.sort_unstable_by_key(|e| e.0);
            debug_assert!(r.iter().all(|e| e.0 < m));
        }
        let kept: usize = rows.iter().map(Vec::len).sum();
        let total = n * m;
        let pruned_fraction = if total == 0 {
            0.0
        } else {
            1.0 - kept as f64 / total as f64
        };
        Self {
            n,
            m,
            rows,
            diag_1,
            diag_2,
            pruned_fraction,
        }
    }

    pub fn from_points(
        d1: &[MatchPoint<T>],
        d2: &[MatchPoint<T>],
        params: &MetricParams<T>,
        pruning: Pruning,
    ) -> Result<Self, AssignmentError> {
        params.validate()?;
        check_classes(d1, d2)?;
        let diag_1: Vec<T> = d1.iter().map(|p| diagonal_cost_pow(p, params)).collect();
        let diag_2: Vec<T> = d2.iter().map(|q| diagonal_cost_pow(q, params)).collect();
        let mut rows = Vec::with_capacity(d1.len());
        for (i, p) in d1.iter().enumerate() {
            let mut row = Vec::new();
            for (j, q) in d2.iter().enumerate() {
                if pruning == Pruning::Enabled && prune_predicate(p, q, params) {
                    continue;
                }
                let c = lifted_cost(p, q, params);
                if !c.is_finite() {
                    return Err(AssignmentError::NonFinite(i, j));
                }
                row.push((j, c));
            }
            rows.push(row);
        }
        Ok(Self::new(rows, diag_1, diag_2))
    }

    /// Cross cost between row `i` and column `j`, `None` when pruned.
    pub fn cost(&self, i: usize, j: usize) -> Option<T> {
        let row = &self.rows[i];
        row.binary_search_by_key(&j, |e| e.0).ok().map(|k| row[k].1)
    }

    /// Total cost of a matching; unmatched pairs pay their diagonal cost.
    /// Panics if a match uses a pruned entry.
    pub fn evaluate(&self, matches: &[(usize, usize)]) -> T {
        let mut matched_1 = vec![false; self.n];
        let mut matched_2 = vec![false; self.m];
        let mut total = T::zero();
        for &(i, j) in matches {
            total += self.cost(i, j).expect("match uses a pruned entry");
            matched_1[i] = true;
            matched_2[j] = true;
        }
        total += (0..self.n)
            .filter(|&i| !matched_1[i])
            .map(|i| self.diag_1[i])
            .fold(T::zero(), |a, b| a + b);
        total += (0..self.m)
            .filter(|&j| !matched_2[j])
            .map(|j| self.diag_2[j])
            .fold(T::zero(), |a, b| a + b);
        total
    }

    pub fn transposed(&self) -> Self {
        let mut cols: Vec<Vec<(usize, T)>> = vec![Vec::new(); self.m];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, c) in row {
                cols[j].push((i, c));
            }
        }
        Self {
            n: self.m,
            m: self.n,
            rows: cols,
            diag_1: self.diag_2.clone(),
            diag_2: self.diag_1.clone(),
            pruned_fraction: self.pruned_fraction,
        }
    }

    /// Largest finite cost of any option in the problem.
    pub fn cost_scale(&self) -> T {
        let mut s = T::zero();
        for row in &self.rows {
            for &(_, c) in row {
                s = s.max(c);
            }
        }
        for &d in self.diag_1.iter().chain(&self.diag_2) {
            s = s.max(d);
        }
        s
    }

    /// Result for the case where one side is empty: everything goes to the
    /// diagonal.
    pub(crate) fn all_diagonal(&self, solver: SolverKind) -> AssignmentResult<T> {
        AssignmentResult::from_partners(self, &vec![None; self.n], solver, SolverStats::default())
    }
}

fn check_classes<T: Scalar>(d1: &[MatchPoint<T>], d2: &[MatchPoint<T>]) -> Result<(), AssignmentError> {
    let mut it = d1.iter().chain(d2).map(|p| p.pair_class);
    if let Some(first) = it.next() {
        if let Some(other) = it.find(|c| *c != first) {
            return Err(AssignmentError::ClassMismatch(first, other));
        }
    }
    Ok(())
}

fn timed<T>(start: Instant, mut result: AssignmentResult<T>) -> AssignmentResult<T> {
    result.stats.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    result
}

/// Exact optimum with the classical full-matrix Kuhn-Munkres algorithm.
pub fn solve_full_munkres<T: Scalar>(
    d1: &[MatchPoint<T>],
    d2: &[MatchPoint<T>],
    params: &MetricParams<T>,
) -> Result<AssignmentResult<T>, AssignmentError> {
    let start = Instant::now();
    let problem = AssignmentProblem::from_points(d1, d2, params, Pruning::Disabled)?;
    Ok(timed(start, full_munkres(&problem)))
}

/// Exact optimum with the sparse reduced-matrix Kuhn-Munkres extension.
pub fn solve_reduced<T: Scalar>(
    d1: &[MatchPoint<T>],
    d2: &[MatchPoint<T>],
    params: &MetricParams<T>,
) -> Result<AssignmentResult<T>, AssignmentError> {
    let start = Instant::now();
    let problem = AssignmentProblem::from_points(d1, d2, params, Pruning::Enabled)?;
    Ok(timed(start, reduced(&problem, &ReducedOptions::default()).0))
}

/// Approximate matching by auction. The returned cost is within
/// `accuracy * (n + m) * scale` of the optimum, where `scale` is the largest
/// option cost of the problem.
pub fn solve_auction<T: Scalar>(
    d1: &[MatchPoint<T>],
    d2: &[MatchPoint<T>],
    params: &MetricParams<T>,
    accuracy: T,
) -> Result<AssignmentResult<T>, AssignmentError> {
    let start = Instant::now();
    let problem = AssignmentProblem::from_points(d1, d2, params, Pruning::Enabled)?;
    let options = AuctionOptions {
        accuracy,
        ..AuctionOptions::default()
    };
    Ok(timed(start, auction(&problem, &options)?))
}

/// Exhaustive optimum; at most [`BRUTE_FORCE_LIMIT`] pairs in total.
pub fn brute_force<T: Scalar>(
    d1: &[MatchPoint<T>],
    d2: &[MatchPoint<T>],
    params: &MetricParams<T>,
) -> Result<AssignmentResult<T>, AssignmentError> {
    let start = Instant::now();
    let problem = AssignmentProblem::from_points(d1, d2, params, Pruning::Disabled)?;
    Ok(timed(start, brute(&problem)?))
}

/// Solver selection for callers that match many diagram pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverChoice<T> {
    Reduced,
    Full,
    Auction { accuracy: T },
}

impl<T: Scalar> SolverChoice<T> {
    pub fn solve(
        &self,
        d1: &[MatchPoint<T>],
        d2: &[MatchPoint<T>],
        params: &MetricParams<T>,
    ) -> Result<AssignmentResult<T>, AssignmentError> {
        match *self {
            SolverChoice::Reduced => solve_reduced(d1, d2, params),
            SolverChoice::Full => solve_full_munkres(d1, d2, params),
            SolverChoice::Auction { accuracy } => solve_auction(d1, d2, params, accuracy),
        }
    }
}
