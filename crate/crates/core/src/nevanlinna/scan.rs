//! Order-preserving parallel map for grid scans.

use std::sync::OnceLock;

use rayon::prelude::*;

/// Environment variable capping the number of scan threads.
pub const THREADS_ENV: &str = "WEYLKIT_THREADS";

fn pool() -> Option<&'static rayon::ThreadPool> {
    static POOL: OnceLock<Option<rayon::ThreadPool>> = OnceLock::new();
    POOL.get_or_init(|| {
        let n: usize = std::env::var(THREADS_ENV).ok()?.trim().parse().ok()?;
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build().ok()
    })
    .as_ref()
}

/// Maps `f` over `items` in parallel. Each item is computed independently, so
/// the output is identical to a sequential map whatever the thread count.
pub fn par_map<I, O, F>(items: &[I], f: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Sync + Send,
{
    match pool() {
        Some(p) => p.install(|| items.par_iter().map(&f).collect()),
        None => items.par_iter().map(&f).collect(),
    }
}
