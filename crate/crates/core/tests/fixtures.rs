use topotrack::assignment::{solve_full_munkres, solve_reduced, SolverChoice};
use topotrack::grid::{
    add_noise_series, downsample_time, gen_birth_lift_fixture, gen_merge_fixture, gen_swap_fixture,
    gen_translating_gaussians, gen_whirling_gaussians, MergeFixtureParams, ScalarField, TimeSeries, TranslatingParams,
    WhirlingParams,
};
use topotrack::metric::{match_points, MetricParams};
use topotrack::persistence::{compute_diagram, threshold_diagram, PairClass, PersistenceDiagram, SweepDirection};
use topotrack::tracking::{overlap_tracking, track_diagrams, EventKind, TrackingResult};

fn diagrams(series: &TimeSeries<f64>, threshold_fraction: f64) -> Vec<PersistenceDiagram<f64>> {
    series
        .fields
        .iter()
        .map(|f| threshold_diagram(&compute_diagram(f), threshold_fraction, true))
        .collect()
}

fn track(series: &TimeSeries<f64>, threshold_fraction: f64, epsilon: f64) -> TrackingResult<f64> {
    track_diagrams(
        &diagrams(series, threshold_fraction),
        PairClass::SaddleMax,
        &MetricParams::maxima(),
        SolverChoice::Reduced,
        epsilon,
        4,
    )
    .unwrap()
}

fn reversed(series: &TimeSeries<f64>) -> TimeSeries<f64> {
    let mut fields = series.fields.clone();
    fields.reverse();
    for (t, f) in fields.iter_mut().enumerate() {
        f.time_index = t;
    }
    TimeSeries::new(fields).unwrap()
}

fn maxima_matches(f: &ScalarField<f64>, g: &ScalarField<f64>, params: &MetricParams<f64>) -> Vec<(usize, usize)> {
    let a = compute_diagram(f).class_pairs(PairClass::SaddleMax);
    let b = compute_diagram(g).class_pairs(PairClass::SaddleMax);
    let full = solve_full_munkres(&match_points(&a), &match_points(&b), params).unwrap();
    let reduced = solve_reduced(&match_points(&a), &match_points(&b), params).unwrap();
    assert!((full.total_cost - reduced.total_cost).abs() < 1e-12);
    // report matches by extremum x coordinate order so the check does not
    // depend on diagram order
    let key = |p: &topotrack::PersistencePair| (p.extremum().coords[0] * 1e6) as i64;
    let mut out: Vec<(usize, usize)> = full
        .matches
        .iter()
        .map(|&(i, j)| (rank(&a, i, key), rank(&b, j, key)))
        .collect();
    out.sort();
    out
}

fn rank(pairs: &[topotrack::PersistencePair], i: usize, key: impl Fn(&topotrack::PersistencePair) -> i64) -> usize {
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by_key(|&k| (key(&pairs[k]), (pairs[k].extremum().coords[1] * 1e6) as i64));
    order.iter().position(|&k| k == i).unwrap()
}

#[test]
fn swap_fixture_needs_geometry() {
    let (f, g) = gen_swap_fixture::<f64>().unwrap();
    // maxima by (x, y): 0 = (0.25, 0.25), 1 = (0.5, 0.75), 2 = (0.75, 0.25)
    let plain = MetricParams {
        alpha: 1.0,
        beta: 1.0,
        gamma: [0.0; 3],
        ..MetricParams::maxima()
    };
    assert_eq!(maxima_matches(&f, &g, &plain), vec![(0, 2), (1, 1), (2, 0)]);
    assert_eq!(
        maxima_matches(&f, &g, &MetricParams::maxima()),
        vec![(0, 0), (1, 1), (2, 2)]
    );
}

#[test]
fn birth_lifting_fixes_the_essential_swap() {
    let (f, g) = gen_birth_lift_fixture::<f64>().unwrap();
    // maxima by (x, y): 0 = (0.5, 0.3), 1 = (0.5, 0.7)
    let equal = MetricParams {
        alpha: 1.0,
        beta: 1.0,
        ..MetricParams::maxima()
    };
    assert_eq!(maxima_matches(&f, &g, &equal), vec![(0, 1), (1, 0)]);
    assert_eq!(maxima_matches(&f, &g, &MetricParams::maxima()), vec![(0, 0), (1, 1)]);
}

#[test]
fn clean_whirl_gives_eight_full_trajectories() {
    let params = WhirlingParams::default();
    let r = track(&gen_whirling_gaussians(&params).unwrap(), 0.0, 0.0);
    assert_eq!(r.trajectories.len(), 8);
    for t in &r.trajectories {
        assert_eq!((t.start_time(), t.end_time()), (0, params.timesteps - 1));
    }
}

#[test]
fn noisy_whirl_is_cleaned_by_the_threshold() {
    let clean = gen_whirling_gaussians(&WhirlingParams::default()).unwrap();
    let noisy = add_noise_series(&clean, 0.1, 11);
    let r = track(&noisy, 0.1, 0.0);
    assert_eq!(r.trajectories.len(), 8);
    assert!(r.trajectories.iter().all(|t| t.len() == 50));
}

#[test]
fn merge_fixture_and_its_reverse() {
    let series = gen_merge_fixture(&MergeFixtureParams::default()).unwrap();
    let r = track(&series, 0.02, 0.4);
    assert_eq!(r.trajectories.len(), 2);
    assert_eq!(r.events.len(), 1);
    let e = r.events[0];
    assert_eq!(e.kind, EventKind::Merge);
    let start = |id: usize| r.trajectories[id].start_time();
    assert!(start(e.surviving_id) < start(e.absorbed_id));

    let rev = track(&reversed(&series), 0.02, 0.4);
    assert_eq!(rev.events.len(), 1);
    assert_eq!(rev.events[0].kind, EventKind::Split);
    assert_eq!(rev.events[0].time_index, series.len() - 1 - e.time_index);

    assert!(track(&series, 0.02, 0.0).events.is_empty());
}

#[test]
fn downsampled_translation() {
    let params = TranslatingParams::default();
    let series = downsample_time(&gen_translating_gaussians(&params).unwrap(), 5).unwrap();
    let steps = series.len();
    let r = track(&series, 0.02, 0.0);
    assert_eq!(r.trajectories.len(), params.starts.len());
    assert!(r.trajectories.iter().all(|t| t.len() == steps));

    let o = overlap_tracking(&series, 0.02, SweepDirection::AscendingToMax, 4).unwrap();
    assert!(o.trajectories.len() > params.starts.len());
    let full = o.trajectories.iter().filter(|t| t.len() == steps).count();
    // only the global maximum keeps overlapping, through the background
    assert_eq!(full, 1);
}

#[test]
fn worker_count_does_not_change_results() {
    let series = add_noise_series(&gen_whirling_gaussians(&WhirlingParams::default()).unwrap(), 0.1, 3);
    let d = diagrams(&series, 0.05);
    let params = MetricParams::maxima();
    let one = track_diagrams(&d, PairClass::SaddleMax, &params, SolverChoice::Reduced, 0.05, 1).unwrap();
    let many = track_diagrams(&d, PairClass::SaddleMax, &params, SolverChoice::Reduced, 0.05, 8).unwrap();
    assert_eq!(one, many);
}

#[test]
fn every_pair_is_used_once() {
    let series = add_noise_series(&gen_whirling_gaussians(&WhirlingParams::default()).unwrap(), 0.25, 5);
    let d = diagrams(&series, 0.05);
    let r = track_diagrams(
        &d,
        PairClass::SaddleMax,
        &MetricParams::maxima(),
        SolverChoice::Reduced,
        0.0,
        2,
    )
    .unwrap();
    let mut seen: Vec<Vec<bool>> = d.iter().map(|x| vec![false; x.count(PairClass::SaddleMax)]).collect();
    for t in &r.trajectories {
        for p in &t.points {
            assert!(!seen[p.t][p.index]);
            seen[p.t][p.index] = true;
        }
    }
    assert!(seen.iter().flatten().all(|&s| s));
}
