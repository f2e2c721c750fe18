// Index-parallel helpers. With the `parallel` feature these fan out on the
// current rayon pool; without it they run sequentially. Results are always
// collected in index order, so output never depends on the worker count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub(crate) fn map_indices<T, F>(n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indices<T, F>(n: u64, f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub(crate) fn count_indices<F>(n: u64, f: F) -> u64
where
    F: Fn(u64) -> bool + Sync + Send,
{
    (0..n).into_par_iter().filter(|&i| f(i)).count() as u64
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn count_indices<F>(n: u64, f: F) -> u64
where
    F: Fn(u64) -> bool,
{
    (0..n).filter(|&i| f(i)).count() as u64
}
