//! Independent runs over a worker pool. Results always come back in input
//! order, so output never depends on scheduling.

/// Maps `f` over `items` with up to `jobs` threads (0 = one per core).
/// `jobs == 1`, or a build without the `parallel` feature, runs inline.
pub fn run_indexed<T, R, F>(items: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync + Send,
{
    if jobs == 1 || items.len() <= 1 {
        return run_serial(items, f);
    }
    run_parallel(items, jobs, f)
}

pub fn run_serial<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(usize, &T) -> R,
{
    items.iter().enumerate().map(|(i, t)| f(i, t)).collect()
}

#[cfg(feature = "parallel")]
pub fn run_parallel<T, R, F>(items: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync + Send,
{
    use rayon::prelude::*;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    pool.install(|| items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect())
}

#[cfg(not(feature = "parallel"))]
pub fn run_parallel<T, R, F>(items: &[T], _jobs: usize, f: F) -> Vec<R>
where
    F: Fn(usize, &T) -> R,
{
    run_serial(items, f)
}
