use std::collections::{BTreeSet, HashMap};

use super::{Event, EventKind, TrackingResult, Trajectory};
use crate::metric::{lifted_cost, MetricParams};
use crate::persistence::PairClass;
use crate::scalar::{pow_nu, root_nu, Scalar};

/// Adds merge and split events between trajectories of the same class whose
/// points at a shared timestep are closer than `epsilon` (lifted distance).
///
/// * merge: neither trajectory starts at `t` and one of them ends there.
///   If the ending one is the older (earlier start, then lower id), it takes
///   over the other's points after `t`, which is cut at `t`.
/// * split: neither trajectory ends at `t` and one of them starts there.
///
/// Timesteps are processed in increasing order. Running the function again
/// on its output changes nothing.
pub fn detect_merge_split<T: Scalar>(
    result: &TrackingResult<T>,
    epsilon: T,
    params: &MetricParams<T>,
) -> TrackingResult<T> {
    let mut out = result.clone();
    if !(epsilon > T::zero()) {
        return out;
    }
    let mut events: BTreeSet<Event> = out.events.iter().copied().collect();
    let times: BTreeSet<usize> = out
        .trajectories
        .iter()
        .flat_map(|t| t.points.iter().map(|p| p.t))
        .collect();
    let eps_pow = pow_nu(epsilon, params.nu);

    for t in times {
        for (a, b) in close_pairs(&out.trajectories, t, epsilon, eps_pow, params) {
            let (ta, tb) = (&out.trajectories[a], &out.trajectories[b]);
            let (sa, sb) = (ta.start_time() == t, tb.start_time() == t);
            let (ea, eb) = (ta.end_time() == t, tb.end_time() == t);
            let (old, young) = if (ta.start_time(), ta.id) <= (tb.start_time(), tb.id) {
                (a, b)
            } else {
                (b, a)
            };
            let kind = if !sa && !sb && (ea || eb) {
                EventKind::Merge
            } else if !ea && !eb && (sa || sb) {
                EventKind::Split
            } else {
                continue;
            };
            if kind == EventKind::Merge
                && out.trajectories[old].end_time() == t
                && out.trajectories[young].end_time() > t
            {
                take_over(&mut out.trajectories, old, young, t, params);
            }
            events.insert(Event {
                time_index: t,
                kind,
                surviving_id: out.trajectories[old].id,
                absorbed_id: out.trajectories[young].id,
            });
        }
    }
    out.events = events.into_iter().collect();
    out
}

/// Moves the points of `young` after `t` to the end of `old`.
fn take_over<T: Scalar>(
    trajectories: &mut [Trajectory<T>],
    old: usize,
    young: usize,
    t: usize,
    params: &MetricParams<T>,
) {
    let y = &mut trajectories[young];
    let k = y.points.iter().position(|p| p.t == t).expect("shared timestep");
    let tail = y.points.split_off(k + 1);
    let tail_costs = y.segment_costs.split_off(k);
    let class = y.pair_class;
    let o = &mut trajectories[old];
    let from = o.points[o.points.len() - 1].match_point(class);
    let to = tail[0].match_point(class);
    o.segment_costs
        .push(root_nu(lifted_cost(&from, &to, params), params.nu));
    o.segment_costs.extend_from_slice(&tail_costs[1..]);
    o.points.extend(tail);
}

/// Unordered pairs of trajectory indices, both of one class, with points
/// at `t` closer than `epsilon`. Points are bucketed on a grid whose cell
/// along each weighted axis is the largest offset the axis term allows.
fn close_pairs<T: Scalar>(
    trajectories: &[Trajectory<T>],
    t: usize,
    epsilon: T,
    eps_pow: T,
    params: &MetricParams<T>,
) -> Vec<(usize, usize)> {
    let cell: [Option<T>; 3] =
        std::array::from_fn(|a| (params.gamma[a] > T::zero()).then(|| epsilon / root_nu(params.gamma[a], params.nu)));
    let present: Vec<(usize, PairClass, [i64; 3])> = trajectories
        .iter()
        .enumerate()
        .filter_map(|(k, tr)| {
            let p = tr.point_at(t)?;
            let c = p.coords();
            let key = std::array::from_fn(|a| cell[a].map_or(0, |h| (c[a] / h).floor().to_i64().unwrap_or(0)));
            Some((k, tr.pair_class, key))
        })
        .collect();
    let mut buckets: HashMap<(PairClass, [i64; 3]), Vec<usize>> = HashMap::new();
    for (slot, &(_, class, key)) in present.iter().enumerate() {
        buckets.entry((class, key)).or_default().push(slot);
    }

    let mut out = Vec::new();
    for (slot, &(k, class, key)) in present.iter().enumerate() {
        let p = trajectories[k].point_at(t).expect("present").match_point(class);
        for dx in -1..=1i64 {
            for dy in -1..=1i64 {
                for dz in -1..=1i64 {
                    let d = [dx, dy, dz];
                    if (0..3).any(|a| cell[a].is_none() && d[a] != 0) {
                        continue;
                    }
                    let nkey = [key[0] + dx, key[1] + dy, key[2] + dz];
                    let Some(slots) = buckets.get(&(class, nkey)) else {
                        continue;
                    };
                    for &other in slots {
                        if other <= slot {
                            continue;
                        }
                        let k2 = present[other].0;
                        let q = trajectories[k2].point_at(t).expect("present").match_point(class);
                        if lifted_cost(&p, &q, params) < eps_pow {
                            out.push((k.min(k2), k.max(k2)));
                        }
                    }
                }
            }
        }
    }
    out.sort_by_key(|&(a, b)| {
        (
            trajectories[a].id.min(trajectories[b].id),
            trajectories[a].id.max(trajectories[b].id),
        )
    });
    out
}
