//! Parallel execution lane for embarrassingly parallel sweeps.
//!
//! With the default `parallel` feature, [`indexed_map`] fans work items out
//! over rayon; without it, the same call degrades to a plain sequential map.
//! Results come back in index order in both lanes, and every work item
//! derives its own sub-seed from its index, so output bytes are identical
//! whichever lane ran. [`indexed_map_seq`] is always sequential and exists
//! so benchmarks and tests can compare the two lanes directly.

/// Map `f` over `0..n`, preserving index order.
#[cfg(feature = "parallel")]
pub fn indexed_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// Map `f` over `0..n`, preserving index order.
#[cfg(not(feature = "parallel"))]
pub fn indexed_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Sequential reference lane with the same signature as [`indexed_map`].
pub fn indexed_map_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{fold_in, SplitMix64};

    #[test]
    fn lanes_agree() {
        let work = |i: usize| {
            let mut rng = SplitMix64::new(fold_in(123, i as u64));
            (0..8).map(|_| rng.next_u64()).collect::<Vec<_>>()
        };
        assert_eq!(indexed_map(64, work), indexed_map_seq(64, work));
    }
}
