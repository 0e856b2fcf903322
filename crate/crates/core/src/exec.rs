//! Chunked map-reduce drivers backing the counting engines.
//!
//! Every engine partitions its outer loop into independent chunks whose
//! partial results merge by commutative exact addition, so the parallel
//! and sequential drivers produce identical values. With the `parallel`
//! feature disabled the crate builds without rayon and the sequential
//! driver is the only one.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution strategy for a chunked engine. `Auto` uses rayon when the
/// `parallel` feature is enabled; `Sequential` always folds in order and is
/// what the bench suite compares against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Driver {
    Auto,
    Sequential,
}

/// Splits `0..n` into roughly `pieces` contiguous ranges.
pub(crate) fn split_ranges(n: usize, pieces: usize) -> Vec<std::ops::Range<usize>> {
    if n == 0 {
        return Vec::new();
    }
    let pieces = pieces.clamp(1, n);
    let base = n / pieces;
    let extra = n % pieces;
    let mut out = Vec::with_capacity(pieces);
    let mut start = 0;
    for i in 0..pieces {
        let len = base + usize::from(i < extra);
        out.push(start..start + len);
        start += len;
    }
    out
}

/// Number of chunks to split a domain of size `n` into.
pub(crate) fn chunk_count(n: usize) -> usize {
    #[cfg(feature = "parallel")]
    {
        (rayon::current_num_threads() * 8).min(n.max(1))
    }
    #[cfg(not(feature = "parallel"))]
    {
        n.clamp(1, 8)
    }
}

/// Maps every range to a partial result and merges the partials.
pub(crate) fn map_merge_driver<T, F, R>(
    driver: Driver,
    ranges: Vec<std::ops::Range<usize>>,
    map: &F,
    merge: &R,
) -> Option<T>
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> T + Sync,
    R: Fn(T, T) -> T + Sync + Send,
{
    match driver {
        Driver::Sequential => ranges.into_iter().map(map).reduce(merge),
        Driver::Auto => {
            #[cfg(feature = "parallel")]
            {
                ranges.into_par_iter().map(map).reduce_with(merge)
            }
            #[cfg(not(feature = "parallel"))]
            {
                ranges.into_iter().map(map).reduce(merge)
            }
        }
    }
}

/// Sums `u128` partials over the given ranges.
pub(crate) fn merge_sums<F>(driver: Driver, ranges: Vec<std::ops::Range<usize>>, map: &F) -> u128
where
    F: Fn(std::ops::Range<usize>) -> u128 + Sync,
{
    map_merge_driver(driver, ranges, map, &|a, b| a + b).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_cover_everything() {
        for n in [0usize, 1, 2, 7, 100] {
            for pieces in [1usize, 2, 3, 16] {
                let rs = split_ranges(n, pieces);
                let total: usize = rs.iter().map(|r| r.len()).sum();
                assert_eq!(total, n);
                for w in rs.windows(2) {
                    assert_eq!(w[0].end, w[1].start);
                }
            }
        }
    }

    #[test]
    fn drivers_agree() {
        let f = |r: std::ops::Range<usize>| r.map(|i| (i * i) as u128).sum::<u128>();
        let ranges = split_ranges(1000, chunk_count(1000));
        let par = merge_sums(Driver::Auto, ranges.clone(), &f);
        let seq = merge_sums(Driver::Sequential, ranges, &f);
        assert_eq!(par, seq);
        assert_eq!(merge_sums(Driver::Auto, split_ranges(0, 4), &f), 0);
    }
}
