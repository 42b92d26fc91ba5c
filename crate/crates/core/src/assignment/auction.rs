//! Forward auction with epsilon scaling.
//!
//! Bidders are the `n` pairs of the first diagram plus one diagonal copy
//! per pair of the second; objects are the `m` pairs of the second diagram
//! plus one diagonal copy per pair of the first. A real bidder may take any
//! non-pruned object of the second diagram or its own diagonal copy. The
//! diagonal copy of `q_j` may take `q_j` (paying its diagonal cost) or any
//! diagonal object for free.
//!
//! The final phase runs with `eps <= accuracy * scale`, so the assignment is
//! within `(n + m) * eps` of the optimum. The schedule `eps_0 * factor^k`
//! does not depend on the accuracy, which makes a tighter accuracy run a
//! superset of the phases of a looser one; the best assignment seen at any
//! phase end is returned.

use std::collections::VecDeque;

use super::{AssignmentError, AssignmentProblem, AssignmentResult, SolverKind, SolverStats};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct AuctionOptions<T> {
    /// Final epsilon as a fraction of the largest option cost.
    pub accuracy: T,
    pub scaling_factor: T,
    pub max_bids: u64,
}

impl<T: Scalar> Default for AuctionOptions<T> {
    fn default() -> Self {
        Self {
            accuracy: T::lit(1e-6),
            scaling_factor: T::lit(0.2),
            max_bids: 50_000_000,
        }
    }
}

/// Largest total cost above the optimum that `auction` may return.
pub fn accuracy_budget<T: Scalar>(problem: &AssignmentProblem<T>, accuracy: T) -> T {
    accuracy * T::lit((problem.n + problem.m) as f64) * effective_scale(problem)
}

fn effective_scale<T: Scalar>(problem: &AssignmentProblem<T>) -> T {
    let s = problem.cost_scale();
    if s > T::zero() {
        s
    } else {
        T::one()
    }
}

pub fn auction<T: Scalar>(
    problem: &AssignmentProblem<T>,
    options: &AuctionOptions<T>,
) -> Result<AssignmentResult<T>, AssignmentError> {
    let acc = options.accuracy;
    if !(acc > T::zero()) || !acc.is_finite() {
        return Err(AssignmentError::InvalidAccuracy(acc.as_f64()));
    }
    let mut stats = SolverStats {
        pruned_fraction: problem.pruned_fraction,
        ..SolverStats::default()
    };
    if problem.n == 0 || problem.m == 0 {
        return Ok(AssignmentResult {
            stats,
            ..problem.all_diagonal(SolverKind::Auction)
        });
    }

    let (n, m) = (problem.n, problem.m);
    let scale = effective_scale(problem);
    let eps_final = acc * scale;
    let mut eps = scale * T::lit(0.25);

    let mut state = Auction {
        p: problem,
        price: vec![T::zero(); m + n],
        owner: vec![usize::MAX; m + n],
        assigned: vec![usize::MAX; n + m],
        bids: 0,
    };
    let mut best: Option<(T, Vec<Option<usize>>)> = None;
    loop {
        stats.rounds += 1;
        if !state.run_phase(eps, options.max_bids) {
            stats.iterations = state.bids;
            stats.reductions = stats.rounds;
            let partners = match &best {
                Some((_, b)) => b.clone(),
                None => state.partners(),
            };
            let partial = AssignmentResult::from_partners(problem, &partners, SolverKind::Auction, stats.clone());
            return Err(AssignmentError::NonConvergence {
                rounds: stats.rounds,
                partial: Box::new(partial.to_f64()),
            });
        }
        let partners = state.partners();
        let matches: Vec<(usize, usize)> = partners
            .iter()
            .enumerate()
            .filter_map(|(i, j)| j.map(|j| (i, j)))
            .collect();
        let cost = problem.evaluate(&matches);
        if best.as_ref().map_or(true, |(c, _)| cost < *c) {
            best = Some((cost, partners));
        }
        if eps <= eps_final {
            break;
        }
        eps *= options.scaling_factor;
    }
    stats.iterations = state.bids;
    stats.reductions = stats.rounds;
    let (_, partners) = best.expect("at least one phase");
    Ok(AssignmentResult::from_partners(
        problem,
        &partners,
        SolverKind::Auction,
        stats,
    ))
}

struct Auction<'a, T> {
    p: &'a AssignmentProblem<T>,
    price: Vec<T>,
    owner: Vec<usize>,
    assigned: Vec<usize>,
    bids: u64,
}

impl<T: Scalar> Auction<'_, T> {
    fn partners(&self) -> Vec<Option<usize>> {
        (0..self.p.n)
            .map(|i| (self.assigned[i] < self.p.m).then_some(self.assigned[i]))
            .collect()
    }

    /// Runs until every bidder holds an object; false when the bid cap is hit.
    fn run_phase(&mut self, eps: T, max_bids: u64) -> bool {
        self.owner.fill(usize::MAX);
        self.assigned.fill(usize::MAX);
        let mut queue: VecDeque<usize> = (0..self.p.n + self.p.m).collect();
        while let Some(b) = queue.pop_front() {
            if self.bids >= max_bids {
                return false;
            }
            self.bids += 1;
            let (o1, v1, v2) = self.best_two(b);
            let inc = match v2 {
                Some(v2) => v1 - v2 + eps,
                None => eps,
            };
            self.price[o1] += inc;
            let prev = self.owner[o1];
            if prev != usize::MAX {
                self.assigned[prev] = usize::MAX;
                queue.push_back(prev);
            }
            self.owner[o1] = b;
            self.assigned[b] = o1;
        }
        true
    }

    /// Best object, its value and the second best value, values being
    /// `-cost - price`. Ties go to the lowest object index.
    fn best_two(&self, b: usize) -> (usize, T, Option<T>) {
        let (n, m) = (self.p.n, self.p.m);
        let mut o1 = usize::MAX;
        let mut v1 = T::neg_infinity();
        let mut v2: Option<T> = None;
        let mut offer = |o: usize, v: T| {
            if v > v1 || (v == v1 && o < o1) {
                if o1 != usize::MAX {
                    v2 = Some(v2.map_or(v1, |x: T| x.max(v1)));
                }
                o1 = o;
                v1 = v;
            } else {
                v2 = Some(v2.map_or(v, |x: T| x.max(v)));
            }
        };
        if b < n {
            for &(j, c) in &self.p.rows[b] {
                offer(j, -c - self.price[j]);
            }
            offer(m + b, -self.p.diag_1[b] - self.price[m + b]);
        } else {
            let j = b - n;
            offer(j, -self.p.diag_2[j] - self.price[j]);
            for i in 0..n {
                offer(m + i, -self.price[m + i]);
            }
        }
        (o1, v1, v2)
    }
}
