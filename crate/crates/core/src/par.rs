//! Data-parallel pair scans with a sequential fallback.
//!
//! Most verifiers in this crate are exhaustive loops over vertex or element
//! pairs. With the `parallel` feature (default) those loops fan out over
//! rayon; without it they run sequentially. The benchmark suite compares
//! both paths explicitly via [`Strategy`].

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution strategy for a pair scan. Library entry points use
/// [`Strategy::default`], which is parallel when the feature is enabled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Strategy {
    #[cfg(feature = "parallel")]
    fn default() -> Self {
        Strategy::Parallel
    }
    #[cfg(not(feature = "parallel"))]
    fn default() -> Self {
        Strategy::Sequential
    }
}

/// Finds the first index (in index order) for which `check` returns `Some`,
/// scanning `0..n`. The parallel path uses `find_map_first`, so the result
/// is deterministic across strategies.
pub fn find_violation<T, F>(strategy: Strategy, n: usize, check: F) -> Option<T>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    match strategy {
        Strategy::Sequential => (0..n).find_map(check),
        #[cfg(feature = "parallel")]
        Strategy::Parallel => (0..n).into_par_iter().find_map_first(check),
    }
}

/// Maps `0..n` and collects results in index order.
pub fn map_collect<T, F>(strategy: Strategy, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match strategy {
        Strategy::Sequential => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        Strategy::Parallel => (0..n).into_par_iter().map(f).collect(),
    }
}
