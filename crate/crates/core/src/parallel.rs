use rayon::prelude::*;

/// `items.iter().map(f)` on at most `workers` threads. The output order
/// always follows `items`, so results do not depend on the worker count.
pub fn map_ordered<I, O, F>(workers: usize, items: &[I], f: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Sync + Send,
{
    if workers <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("failed to start worker threads");
    pool.install(|| items.par_iter().map(f).collect())
}
