use rayon::prelude::*;

use crate::error::{SimError, SimResult};

/// Evaluates `f(0..count)` on a pool of `workers` threads and returns the
/// results in index order. The first error (by index) wins.
pub fn map_indexed<T, F>(workers: usize, count: u64, f: F) -> SimResult<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> SimResult<T> + Sync + Send,
{
    if workers == 0 {
        return Err(SimError::Config("workers must be at least 1".into()));
    }
    if workers == 1 {
        return (0..count).map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SimError::Pool(e.to_string()))?;
    let results: Vec<SimResult<T>> = pool.install(|| (0..count).into_par_iter().map(&f).collect());
    results.into_iter().collect()
}
