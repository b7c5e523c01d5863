//! Data-parallel fan-out with a sequential fallback.
//!
//! All parallel loops in the crate go through these helpers: order-preserving
//! maps over immutable inputs, so sequential and parallel execution produce
//! bit-identical results. With the `parallel` feature disabled the helpers
//! compile to plain iterator chains.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution strategy for the data-parallel inner loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// rayon work-stealing pool (requires the `parallel` feature; falls back
    /// to sequential when the feature is off).
    #[default]
    Parallel,
    Sequential,
}

impl Strategy {
    pub fn from_jobs(jobs: usize) -> Self {
        if jobs == 1 {
            Strategy::Sequential
        } else {
            Strategy::Parallel
        }
    }
}

/// Order-preserving map over a slice.
pub fn map_slice<T: Sync, U: Send, F: Fn(&T) -> U + Sync + Send>(
    strategy: Strategy,
    items: &[T],
    f: F,
) -> Vec<U> {
    #[cfg(feature = "parallel")]
    if strategy == Strategy::Parallel {
        return items.par_iter().map(f).collect();
    }
    let _ = strategy;
    items.iter().map(f).collect()
}

/// Order-preserving map over an index range.
pub fn map_range<U: Send, F: Fn(usize) -> U + Sync + Send>(
    strategy: Strategy,
    n: usize,
    f: F,
) -> Vec<U> {
    #[cfg(feature = "parallel")]
    if strategy == Strategy::Parallel {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = strategy;
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree() {
        let items: Vec<u64> = (0..500).collect();
        let f = |x: &u64| x.wrapping_mul(2654435761).rotate_left(7);
        let seq = map_slice(Strategy::Sequential, &items, f);
        let par = map_slice(Strategy::Parallel, &items, f);
        assert_eq!(seq, par);
        assert_eq!(
            map_range(Strategy::Sequential, 100, |i| i * i),
            map_range(Strategy::Parallel, 100, |i| i * i)
        );
    }
}
