//! Deterministic block-parallel maps.
//!
//! Work is cut into a fixed number of blocks that does not depend on the
//! thread count; results come back in block order so any subsequent
//! reduction is identical for every `threads` value.

use alloc::vec::Vec;

/// Thread count used when the caller passes `0`.
pub fn default_threads() -> usize {
    #[cfg(feature = "std")]
    {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    }
    #[cfg(not(feature = "std"))]
    {
        1
    }
}

/// Evaluates `f(0), …, f(n_blocks-1)` on up to `threads` workers and
/// returns the results in index order.
pub fn map_blocks<T, F>(n_blocks: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        let threads = if threads == 0 { default_threads() } else { threads };
        if threads > 1 && n_blocks > 1 {
            use rayon::prelude::*;
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
                return pool.install(|| (0..n_blocks).into_par_iter().map(&f).collect());
            }
        }
    }
    let _ = threads;
    (0..n_blocks).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        for t in [1, 2, 4, 8] {
            let v = map_blocks(100, t, |i| i * i);
            assert_eq!(v, (0..100).map(|i| i * i).collect::<Vec<_>>());
        }
    }
}
