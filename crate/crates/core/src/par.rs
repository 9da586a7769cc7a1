//! Data-parallel dispatch helpers.
//!
//! With the `parallel` feature (default) the heavy inner loops — dense row
//! updates, per-column solves, experiment sweep cells — run on rayon.
//! Without it everything falls back to plain sequential iteration, which is
//! what the criterion bench suite compares against.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this many elements a row sweep runs sequentially: the fork-join
/// latency otherwise dwarfs the per-row arithmetic (measured ~50us per
/// barrier against sub-microsecond rows at n < 512).
pub const PAR_MIN_ELEMS: usize = 1 << 18;

/// Apply `f` to every `row_len` chunk of `data`, indexed by chunk number.
/// Runs on rayon only when the slice is large enough to amortize the
/// scheduling cost.
pub fn for_each_row_mut<T, F>(data: &mut [T], row_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if data.len() >= PAR_MIN_ELEMS {
            data.par_chunks_mut(row_len)
                .enumerate()
                .for_each(|(i, row)| f(i, row));
            return;
        }
    }
    for (i, row) in data.chunks_mut(row_len).enumerate() {
        f(i, row);
    }
}

/// Collect `f(0), f(1), ..., f(len - 1)` preserving index order.
pub fn map_indexed<U, F>(len: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// [`map_indexed`] that drops to a sequential loop when the estimated total
/// work (`len * work_per_item` elements) is too small to parallelize.
pub fn map_indexed_sized<U, F>(len: usize, work_per_item: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    if len.saturating_mul(work_per_item) >= PAR_MIN_ELEMS {
        map_indexed(len, f)
    } else {
        (0..len).map(f).collect()
    }
}

/// Fallible variant of [`map_indexed`]; returns the first error encountered.
pub fn try_map_indexed<U, E, F>(len: usize, f: F) -> Result<Vec<U>, E>
where
    U: Send,
    E: Send,
    F: Fn(usize) -> Result<U, E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}
