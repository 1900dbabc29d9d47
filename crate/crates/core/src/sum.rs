//! Deterministic accumulation.
//!
//! Parallel work is split into independent indexed pieces whose partial
//! results are collected in index order and then summed left to right, so
//! the result does not depend on how many threads ran the pieces.

use rayon::prelude::*;

/// Environment variable that caps the worker pool used by the CLI.
pub const THREADS_ENV: &str = "DISC_THREADS";

/// Row count from which per-row partial sums are computed in parallel.
/// The decision depends only on the problem size, never on the pool size.
pub(crate) const PARALLEL_ROWS: usize = 192;

/// Sums `f(0) + f(1) + … + f(count - 1)` left to right. When `parallel` is
/// set the terms are evaluated on the rayon pool first; the addition order
/// is the same either way.
pub(crate) fn indexed_sum<F>(count: usize, parallel: bool, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    if parallel {
        let terms: Vec<f64> = (0..count).into_par_iter().map(&f).collect();
        terms.into_iter().fold(0.0, |acc, t| acc + t)
    } else {
        (0..count).fold(0.0, |acc, i| acc + f(i))
    }
}

/// Evaluates `f` on every index, in parallel when asked, returning results in
/// index order.
pub(crate) fn indexed_map<T, F>(count: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if parallel {
        (0..count).into_par_iter().map(f).collect()
    } else {
        (0..count).map(f).collect()
    }
}

/// Reads the `DISC_THREADS` cap, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
}

/// Configures the global rayon pool from `DISC_THREADS`. Safe to call more
/// than once; only the first call takes effect.
pub fn init_thread_pool() {
    if let Some(threads) = thread_cap() {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}
