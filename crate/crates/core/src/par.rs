//! Data-parallel helpers. With the `parallel` feature these run on the rayon
//! global pool; without it they are plain sequential loops with the same
//! results and ordering.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `range`, returning results in index order.
pub fn map_range<R, F>(range: Range<u64>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        range.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        range.map(f).collect()
    }
}

/// Maps `f` over a slice, returning results in slice order.
pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Splits `range` into contiguous chunks, folds each chunk sequentially with
/// `fold`, then combines chunk results left to right with `combine`. The
/// combination order is fixed, so the result does not depend on scheduling.
pub fn fold_chunks<A, Init, Fold, Combine>(
    range: Range<u64>,
    chunk: u64,
    init: Init,
    fold: Fold,
    combine: Combine,
) -> A
where
    A: Send,
    Init: Fn() -> A + Sync + Send,
    Fold: Fn(A, u64) -> A + Sync + Send,
    Combine: Fn(A, A) -> A,
{
    let chunk = chunk.max(1);
    let len = range.end.saturating_sub(range.start);
    let chunks = len.div_ceil(chunk);
    let start = range.start;
    let end = range.end;
    let partials = map_range(0..chunks, |c| {
        let lo = start + c * chunk;
        let hi = (lo + chunk).min(end);
        (lo..hi).fold(init(), &fold)
    });
    partials.into_iter().fold(init(), combine)
}

/// Number of worker threads the helpers above will use.
pub fn threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fold_chunks_matches_sequential_sum() {
        let total = fold_chunks(0..10_001, 97, || 0u64, |acc, i| acc + i, |a, b| a + b);
        assert_eq!(total, (0..10_001u64).sum());
    }

    #[test]
    fn map_range_preserves_order() {
        let v = map_range(5..12, |i| i * i);
        assert_eq!(v, (5..12u64).map(|i| i * i).collect::<Vec<_>>());
    }
}
