//! Execution policy for the data-parallel loops.
//!
//! With the `parallel` feature (default) the hot loops run on the rayon
//! global pool; without it, or with [`Execution::Sequential`], they run on
//! the calling thread. Both paths produce bit-identical results: every
//! parallel map is followed by an order-preserving collect, and reductions
//! are either integer sums or carry an explicit tie-break.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential when built without the `parallel` feature.
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maps `f` over `0..n`, preserving index order in the output.
pub fn map_indexed<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Index of the maximum of `key(i)` over `lo..hi`; ties resolve to the lowest index.
///
/// Returns `None` for an empty range.
pub fn argmax_lowest<F>(exec: Execution, lo: usize, hi: usize, key: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    if lo >= hi {
        return None;
    }
    let better = |a: (usize, f64), b: (usize, f64)| {
        if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
            b
        } else {
            a
        }
    };
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && hi - lo >= PAR_ARGMAX_MIN {
        return (lo..hi)
            .into_par_iter()
            .map(|i| (i, key(i)))
            .reduce_with(better);
    }
    let _ = exec;
    (lo..hi).map(|i| (i, key(i))).reduce(better)
}

/// Below this range length the argmax scan stays on one thread.
#[cfg(feature = "parallel")]
const PAR_ARGMAX_MIN: usize = 1 << 14;
