//! Data-parallel helpers. With the `parallel` feature these dispatch to rayon,
//! otherwise they run the same chunking sequentially.
//!
//! Reductions are always summed over fixed-size chunks in index order, so the
//! result does not depend on how work is scheduled across threads.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk length for deterministic reductions.
const REDUCE_CHUNK: usize = 4096;

/// Calls `f(chunk_index, chunk)` for each `chunk_len`-sized piece of `data`.
pub fn for_each_chunk_mut<T, F>(data: &mut [T], chunk_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    let chunk_len = chunk_len.max(1);
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(chunk_len)
        .enumerate()
        .for_each(|(i, c)| f(i, c));
    #[cfg(not(feature = "parallel"))]
    data.chunks_mut(chunk_len)
        .enumerate()
        .for_each(|(i, c)| f(i, c));
}

/// Elementwise map into `out`: `out[i] = f(i)`.
pub fn fill_with<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    for_each_chunk_mut(out, REDUCE_CHUNK, |ci, chunk| {
        let base = ci * REDUCE_CHUNK;
        for (k, o) in chunk.iter_mut().enumerate() {
            *o = f(base + k);
        }
    });
}

/// Deterministic sum of `f(i)` over `0..n`.
pub fn sum_by<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let chunks = n.div_ceil(REDUCE_CHUNK);
    let partial = |c: usize| {
        let lo = c * REDUCE_CHUNK;
        let hi = (lo + REDUCE_CHUNK).min(n);
        (lo..hi).map(&f).sum::<f64>()
    };
    #[cfg(feature = "parallel")]
    let parts: Vec<f64> = (0..chunks).into_par_iter().map(partial).collect();
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<f64> = (0..chunks).map(partial).collect();
    parts.iter().sum()
}

/// Maps `0..n` to a vector in parallel.
pub fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return (0..n).into_par_iter().map(f).collect();
    #[cfg(not(feature = "parallel"))]
    return (0..n).map(f).collect();
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    sum_by(a.len(), |i| a[i] * b[i])
}

pub fn norm_sq(a: &[f64]) -> f64 {
    sum_by(a.len(), |i| a[i] * a[i])
}

pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for_each_chunk_mut(y, REDUCE_CHUNK, |ci, chunk| {
        let base = ci * REDUCE_CHUNK;
        for (k, v) in chunk.iter_mut().enumerate() {
            *v += alpha * x[base + k];
        }
    });
}

pub fn scale(alpha: f64, y: &mut [f64]) {
    for_each_chunk_mut(y, REDUCE_CHUNK, |_, chunk| {
        chunk.iter_mut().for_each(|v| *v *= alpha);
    });
}
