//! Exhaustive search helpers.
//!
//! Every search returns the lexicographically least hit in index order, so
//! parallel and sequential runs report the same witness.

use rayon::prelude::*;

pub(crate) fn first_index(n: usize, bad: impl Fn(usize) -> bool + Sync) -> Option<usize> {
    (0..n).into_par_iter().find_first(|&i| bad(i))
}

pub(crate) fn first_pair(n: usize, bad: impl Fn(usize, usize) -> bool + Sync) -> Option<(usize, usize)> {
    (0..n)
        .into_par_iter()
        .find_map_first(|i| (0..n).find(|&j| bad(i, j)).map(|j| (i, j)))
}

/// Like [`first_pair`], returning the first `Some` produced by `probe`.
pub(crate) fn first_pair_map<T: Send>(
    n: usize,
    probe: impl Fn(usize, usize) -> Option<T> + Sync,
) -> Option<T> {
    (0..n)
        .into_par_iter()
        .find_map_first(|i| (0..n).find_map(|j| probe(i, j)))
}

pub(crate) fn first_triple(
    n: usize,
    bad: impl Fn(usize, usize, usize) -> bool + Sync,
) -> Option<(usize, usize, usize)> {
    (0..n).into_par_iter().find_map_first(|i| {
        (0..n).find_map(|j| (0..n).find(|&k| bad(i, j, k)).map(|k| (i, j, k)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_hit_wins() {
        assert_eq!(first_pair(10, |i, j| i + j == 7 && i > 2), Some((3, 4)));
        assert_eq!(first_triple(5, |i, j, k| i == 1 && k == j + 2), Some((1, 0, 2)));
        assert_eq!(first_index(5, |i| i > 9), None);
    }
}
