//! Execution strategy for the data-parallel kernels.
//!
//! Every hot loop (sumsets, bounding-box scans, per-degree sweeps, oracle
//! trials) goes through these helpers. With the `parallel` feature enabled
//! the default strategy fans out over the rayon pool; without it, or when
//! [`Strategy::Sequential`] is requested explicitly, everything runs on the
//! calling thread. Results are identical either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Sequential,
    Parallel,
}

impl Default for Strategy {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Strategy::Parallel
        } else {
            Strategy::Sequential
        }
    }
}

impl Strategy {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Strategy::Parallel
    }
}

pub(crate) fn map<T, R, F>(items: &[T], strategy: Strategy, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = strategy;
    items.iter().map(f).collect()
}

pub(crate) fn flat_map<T, R, F>(items: &[T], strategy: Strategy, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Vec<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy.is_parallel() {
        return items.par_iter().flat_map_iter(f).collect();
    }
    let _ = strategy;
    items.iter().flat_map(f).collect()
}

pub(crate) fn sort_dedup<T: Ord + Send>(v: &mut Vec<T>, strategy: Strategy) {
    #[cfg(feature = "parallel")]
    if strategy.is_parallel() {
        v.par_sort_unstable();
        v.dedup();
        return;
    }
    let _ = strategy;
    v.sort_unstable();
    v.dedup();
}
