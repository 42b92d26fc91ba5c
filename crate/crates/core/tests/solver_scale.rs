use std::time::Instant;

use topotrack::assignment::{solve_auction, solve_full_munkres, solve_reduced};
use topotrack::metric::{match_points, MetricParams};
use topotrack::synthetic::random_diagram_pair;

#[test]
fn reduced_is_exact_on_large_instances() {
    let params = MetricParams::maxima();
    for (seed, n) in [(10u64, 150usize), (11, 300), (12, 400)] {
        let (a, b) = random_diagram_pair::<f64>(seed, n, n - n / 7, 0.8);
        let (p, q) = (match_points(&a.pairs), match_points(&b.pairs));
        let full = solve_full_munkres(&p, &q, &params).unwrap();
        let reduced = solve_reduced(&p, &q, &params).unwrap();
        assert!((full.total_cost - reduced.total_cost).abs() < 1e-9, "seed {seed}");
        assert!(reduced.stats.pruned_fraction > 0.5);
        let auction = solve_auction(&p, &q, &params, 1e-6).unwrap();
        assert!(auction.total_cost >= full.total_cost - 1e-9);
    }
}

#[test]
fn reduced_growth_stays_polynomial() {
    // doubling n should cost far less than the 8x of a cubic worst case
    // once sparsity kicks in; allow the full 8x plus slack for timer noise
    let params = MetricParams::maxima();
    let time = |n: usize| {
        let (a, b) = random_diagram_pair::<f64>(n as u64, n, n, 0.8);
        let (p, q) = (match_points(&a.pairs), match_points(&b.pairs));
        let start = Instant::now();
        for _ in 0..3 {
            solve_reduced(&p, &q, &params).unwrap();
        }
        start.elapsed().as_secs_f64()
    };
    let small = time(200);
    let large = time(400);
    assert!(large <= 8.0 * small + 0.05, "{small} -> {large}");
}
