//! Execution strategy for the data-parallel loops.
//!
//! With the `parallel` feature (on by default) the sweeps and long
//! convolutions fan out over rayon's pool. Without it every loop runs
//! sequentially and [`Execution::Parallel`] silently degrades to
//! [`Execution::Sequential`], so callers never need their own `cfg`.

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
    /// Whether work will actually be split across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Order-preserving map over `items`.
    pub fn map<T, U, F>(self, items: Vec<T>, f: F) -> Vec<U>
    where
        T: Send,
        U: Send,
        F: Fn(T) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.into_par_iter().map(f).collect();
        }
        items.into_iter().map(f).collect()
    }

    /// Sum of `f(k)` over `range`.
    pub fn sum_range<S, F>(self, range: std::ops::Range<usize>, f: F) -> S
    where
        S: Send + std::iter::Sum<S>,
        F: Fn(usize) -> S + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return range.into_par_iter().map(f).sum();
        }
        range.map(f).sum()
    }
}
