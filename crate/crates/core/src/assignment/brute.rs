use super::{AssignmentError, AssignmentProblem, AssignmentResult, SolverKind, SolverStats};
use crate::scalar::Scalar;

pub const BRUTE_FORCE_LIMIT: usize = 12;

/// Enumerates every partial injection from the first diagram into the
/// second. Ties keep the first matching found (row by row, diagonal first).
pub fn brute<T: Scalar>(problem: &AssignmentProblem<T>) -> Result<AssignmentResult<T>, AssignmentError> {
    if problem.n + problem.m > BRUTE_FORCE_LIMIT {
        return Err(AssignmentError::SizeGuard {
            n: problem.n,
            m: problem.m,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut search = Search {
        p: problem,
        current: vec![None; problem.n],
        used: vec![false; problem.m],
        best: vec![None; problem.n],
        best_cost: T::infinity(),
        visited: 0,
    };
    search.go(0);
    let stats = SolverStats {
        iterations: search.visited,
        pruned_fraction: problem.pruned_fraction,
        ..SolverStats::default()
    };
    let best = search.best;
    Ok(AssignmentResult::from_partners(
        problem,
        &best,
        SolverKind::BruteForce,
        stats,
    ))
}

struct Search<'a, T> {
    p: &'a AssignmentProblem<T>,
    current: Vec<Option<usize>>,
    used: Vec<bool>,
    best: Vec<Option<usize>>,
    best_cost: T,
    visited: u64,
}

impl<T: Scalar> Search<'_, T> {
    fn go(&mut self, i: usize) {
        if i == self.p.n {
            self.visited += 1;
            let matches: Vec<(usize, usize)> = self
                .current
                .iter()
                .enumerate()
                .filter_map(|(i, j)| j.map(|j| (i, j)))
                .collect();
            let cost = self.p.evaluate(&matches);
            if cost < self.best_cost {
                self.best_cost = cost;
                self.best = self.current.clone();
            }
            return;
        }
        self.current[i] = None;
        self.go(i + 1);
        for k in 0..self.p.rows[i].len() {
            let j = self.p.rows[i][k].0;
            if self.used[j] {
                continue;
            }
            self.used[j] = true;
            self.current[i] = Some(j);
            self.go(i + 1);
            self.used[j] = false;
        }
        self.current[i] = None;
    }
}
