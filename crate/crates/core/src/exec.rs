//! Execution strategy for the data-parallel loops (property sweeps, quadrature
//! node sums, covariance grids).
//!
//! With the `parallel` feature the work is spread over rayon's global pool;
//! without it, or with [`Execution::Sequential`], the same closures run in order.
//! Both paths reduce in the same chunk order, so results are identical.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// `(0..n).map(f).collect()`, in index order.
    pub fn map_range<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Maps every item of a slice, preserving order.
    pub fn map_slice<S, T, F>(self, items: &[S], f: F) -> Vec<T>
    where
        S: Sync,
        T: Send,
        F: Fn(&S) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Splits `0..n` into fixed chunks, folds each chunk into a fresh accumulator,
    /// then merges the per-chunk accumulators left to right.
    pub fn chunked_fold<A, I, F, M>(self, n: usize, chunk: usize, init: I, fold: F, merge: M) -> A
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        F: Fn(&mut A, usize) + Sync + Send,
        M: Fn(&mut A, A),
    {
        let chunk = chunk.max(1);
        let n_chunks = n.div_ceil(chunk);
        let partials = self.map_range(n_chunks, |c| {
            let mut acc = init();
            for k in c * chunk..((c + 1) * chunk).min(n) {
                fold(&mut acc, k);
            }
            acc
        });
        let mut total = init();
        for p in partials {
            merge(&mut total, p);
        }
        total
    }
}
