//! Index-parallel map used by the multi-start and multi-trial loops.
//!
//! With the default `parallel` feature the closure runs under rayon; without
//! it the same loop runs sequentially. Callers derive all randomness from
//! per-index substreams, so the two builds produce identical results.

#[cfg(feature = "parallel")]
pub(crate) fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
