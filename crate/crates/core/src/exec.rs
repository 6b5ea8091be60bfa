//! Fixed-chunk work splitting.
//!
//! Work over `0..n` is cut into chunks whose boundaries depend only on `n` and
//! the chunk size. Each chunk is reduced sequentially and the chunk results
//! come back in index order, so a caller that folds them left to right gets the
//! same floating-point result for any number of worker threads.

use alloc::vec::Vec;
use core::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub(crate) const DEFAULT_CHUNK: usize = 1024;

pub(crate) fn chunked<T, F>(n: usize, chunk: usize, f: F) -> Vec<T>
where
    F: Fn(Range<usize>) -> T + Sync + Send,
    T: Send,
{
    let chunk = chunk.max(1);
    let chunks = n.div_ceil(chunk);
    let bounds = move |c: usize| c * chunk..((c + 1) * chunk).min(n);
    #[cfg(feature = "parallel")]
    {
        (0..chunks).into_par_iter().map(|c| f(bounds(c))).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..chunks).map(|c| f(bounds(c))).collect()
    }
}
