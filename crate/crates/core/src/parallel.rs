//! Worker pool shared by the grid- and path-parallel routines.
//!
//! The pool size is read once from `MULTIFLOW_THREADS` (falling back to the
//! available parallelism). Results never depend on the pool size: work is
//! split into fixed chunks and reassembled in order.

use std::sync::OnceLock;

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

pub const THREADS_ENV: &str = "MULTIFLOW_THREADS";

pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

fn global_pool() -> &'static ThreadPool {
    static POOL: OnceLock<ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        ThreadPoolBuilder::new()
            .num_threads(thread_count())
            .build()
            .expect("thread pool construction")
    })
}

/// Runs `op` inside the shared pool.
pub fn install<R: Send>(op: impl FnOnce() -> R + Send) -> R {
    global_pool().install(op)
}

/// Runs `op` inside a dedicated pool of `threads` workers.
pub fn with_threads<R: Send>(threads: usize, op: impl FnOnce() -> R + Send) -> R {
    ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("thread pool construction")
        .install(op)
}

/// Order-preserving parallel map. Uses the current pool when called from
/// inside one, otherwise the shared pool.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    if rayon::current_thread_index().is_some() {
        items.par_iter().map(&f).collect()
    } else {
        install(|| items.par_iter().map(&f).collect())
    }
}

/// Pairwise (cascade) summation; the grouping depends only on the length.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}
