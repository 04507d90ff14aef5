//! Parallel searches over k-subsets of `[0, n)`.
//!
//! Work is split on the smallest element of the subset and each branch is
//! walked in lexicographic order, so `find_first` always returns the
//! lexicographically least match no matter how rayon schedules the branches.

use itertools::Itertools;
use rayon::prelude::*;

/// Lexicographically least `k`-subset of `[0, n)` satisfying `pred`.
pub fn find_first<F>(n: usize, k: usize, pred: F) -> Option<Vec<usize>>
where
    F: Fn(&[usize]) -> bool + Sync,
{
    if k == 0 {
        return pred(&[]).then(Vec::new);
    }
    if k > n {
        return None;
    }
    (0..=n - k).into_par_iter().find_map_first(|first| {
        (first + 1..n).combinations(k - 1).find_map(|rest| {
            let mut s = Vec::with_capacity(k);
            s.push(first);
            s.extend(rest);
            pred(&s).then_some(s)
        })
    })
}

/// The `idx`-th `k`-subset of `[0, n)` in lexicographic order.
pub fn unrank(n: usize, k: usize, mut idx: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        let left = (k - slot - 1) as u64;
        loop {
            let block = crate::arith::binomial((n - next - 1) as u64, left);
            if idx < block {
                break;
            }
            idx -= block;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    out
}

/// True iff some `k`-subset of `[0, n)` satisfies `pred`.
pub fn any<F>(n: usize, k: usize, pred: F) -> bool
where
    F: Fn(&[usize]) -> bool + Sync,
{
    find_first(n, k, pred).is_some()
}
