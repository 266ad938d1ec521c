//! Data-parallel map with a sequential fallback. Results always come back in
//! index order and all reductions are done afterwards in a fixed order, so
//! values are bit-identical with or without the `parallel` feature.

use num_complex::Complex64 as C64;

#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    // a one-thread pool only adds scheduling cost
    if n < 2 || rayon::current_num_threads() < 2 {
        return (0..n).map(f).collect();
    }
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Runs `f` with at most `n` worker threads (0 = rayon's default).
#[cfg(feature = "parallel")]
pub fn with_threads<R: Send>(n: usize, f: impl FnOnce() -> R + Send) -> R {
    if n == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_threads<R: Send>(_n: usize, f: impl FnOnce() -> R + Send) -> R {
    f()
}

pub const PARALLEL: bool = cfg!(feature = "parallel");

/// Sequential version regardless of the feature; used by benches.
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Pairwise sum with a fixed tree shape (depends only on the length).
pub fn tree_sum(v: &[C64]) -> C64 {
    match v.len() {
        0 => C64::new(0.0, 0.0),
        1 => v[0],
        n if n <= 8 => v.iter().fold(C64::new(0.0, 0.0), |a, b| a + b),
        n => {
            let h = n / 2;
            tree_sum(&v[..h]) + tree_sum(&v[h..])
        }
    }
}

pub fn tree_sum_real(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        n if n <= 8 => v.iter().sum(),
        n => {
            let h = n / 2;
            tree_sum_real(&v[..h]) + tree_sum_real(&v[h..])
        }
    }
}
