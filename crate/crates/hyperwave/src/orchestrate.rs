//! Worker pool and deterministic parallel maps.
//!
//! Work items are indexed up front and results are collected in index
//! order, so outputs do not depend on the number of workers.

use hyperwave_core::chaos::{Kernel, McPlan, PolyspectrumSample};
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::Result;

pub const THREADS_ENV: &str = "HYPERWAVE_THREADS";

/// Worker count: explicit value, else `HYPERWAVE_THREADS`, else the number
/// of available cores.
pub fn resolve_workers(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()))
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub fn pool(workers: usize) -> Result<ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?)
}

/// Ordered parallel map with early exit on the first error.
pub fn par_map<T, U, F>(pool: &ThreadPool, items: &[T], f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U> + Sync,
{
    pool.install(|| items.par_iter().map(&f).collect())
}

/// Runs every design block of `plan` across the pool; realizations come
/// back in index order.
pub fn run_plan(pool: &ThreadPool, plan: &McPlan, kernels: &[Kernel]) -> Result<Vec<Vec<PolyspectrumSample>>> {
    let designs: Vec<usize> = (0..plan.design_count()).collect();
    let blocks = par_map(pool, &designs, |&d| Ok(plan.run_design(d, kernels)?))?;
    Ok(blocks.into_iter().flatten().collect())
}

/// Single-kernel convenience over [`run_plan`].
pub fn run_kernel(pool: &ThreadPool, plan: &McPlan, kernel: Kernel) -> Result<Vec<PolyspectrumSample>> {
    Ok(run_plan(pool, plan, &[kernel])?.into_iter().map(|mut row| row.remove(0)).collect())
}
