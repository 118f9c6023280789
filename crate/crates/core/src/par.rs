//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) [`Exec::Parallel`] runs on the rayon
//! global pool; without it every strategy runs sequentially. Reductions are
//! always chunked in a fixed pattern and combined in index order, so results
//! are bit-identical between strategies and across thread counts.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Fixed reduction chunk; part of the summation order, do not tune per call.
const CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Serial,
    #[default]
    Parallel,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// `(0..n).map(f).collect()`.
pub fn map_range<T, F>(exec: Exec, n: usize, f: F) -> Vec<T>
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

/// Applies `f` to every element in place.
pub fn for_each_mut<T, F>(exec: Exec, data: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        data.par_iter_mut().enumerate().for_each(|(i, x)| f(i, x));
        return;
    }
    let _ = exec;
    data.iter_mut().enumerate().for_each(|(i, x)| f(i, x));
}

/// Applies `f` to consecutive chunks of `chunk` elements.
pub fn for_each_chunk_mut<T, F>(exec: Exec, data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(&mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        data.par_chunks_mut(chunk).for_each(f);
        return;
    }
    let _ = exec;
    data.chunks_mut(chunk).for_each(f);
}

/// Deterministic `Σ_{i<n} f(i)`.
pub fn sum_range<F>(exec: Exec, n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let chunk_sum = |c: usize| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(n);
        (lo..hi).map(&f).sum::<f64>()
    };
    let chunks = n.div_ceil(CHUNK);
    map_range(exec, chunks, chunk_sum).into_iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree_bitwise() {
        let f = |i: usize| ((i as f64) * 0.37).sin() / (1.0 + i as f64);
        let a = sum_range(Exec::Serial, 100_003, f);
        let b = sum_range(Exec::Parallel, 100_003, f);
        assert_eq!(a.to_bits(), b.to_bits());
        assert_eq!(sum_range(Exec::Parallel, 0, f), 0.0);
    }

    #[test]
    fn map_preserves_order() {
        let v = map_range(Exec::Parallel, 5000, |i| i * 2);
        assert!(v.iter().enumerate().all(|(i, &x)| x == 2 * i));
    }
}
