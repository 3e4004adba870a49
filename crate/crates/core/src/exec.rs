//! Data-parallel sweeps.
//!
//! Experiments evaluate many independent cells (one integration per step
//! size and method). [`Execution::map`] evaluates such cells either on the
//! rayon pool or sequentially; the output order always follows the input
//! order, so results do not depend on the thread count.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Uses the rayon thread pool when the `parallel` feature is enabled and
    /// falls back to sequential evaluation otherwise.
    #[default]
    Parallel,
}

impl Execution {
    pub fn map<T, U, F>(self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        match self {
            Execution::Sequential => items.iter().map(f).collect(),
            Execution::Parallel => par_map(items, f),
        }
    }

    /// Whether this build can actually run cells concurrently.
    pub fn is_concurrent(self) -> bool {
        self == Execution::Parallel && cfg!(feature = "parallel")
    }
}

#[cfg(feature = "parallel")]
fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.iter().map(f).collect()
}
