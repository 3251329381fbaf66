//! Enumeration of free trees, one per isomorphism class.
//!
//! Trees are produced as canonical level sequences, rooted at a center,
//! walking the rooted-tree successor function and skipping sequences that
//! are not the canonical rooting of their free tree. Emission order is
//! strictly decreasing lexicographic order of the level sequence, starting
//! from the path and ending at the star.

use std::collections::HashSet;

use thiserror::Error;

use crate::tree_model::{canonical_code, Tree};

pub const MAX_ENUM_ORDER: usize = 20;
pub const PRUFER_ORACLE_MAX_ORDER: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumError {
    #[error("order {0} outside the supported range 1..={MAX_ENUM_ORDER}")]
    OrderOutOfRange(usize),
    #[error("order {order} exceeds the oracle limit {limit}")]
    OrderTooLargeForOracle { order: usize, limit: usize },
}

/// Depth-first depths of a rooted tree: `levels[0] == 0` and every later
/// entry lies in `1..=previous + 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LevelSequence(pub Vec<usize>);

impl LevelSequence {
    pub fn is_well_formed(&self) -> bool {
        let l = &self.0;
        !l.is_empty() && l[0] == 0 && l.windows(2).all(|w| w[1] >= 1 && w[1] <= w[0] + 1)
    }

    pub fn to_tree(&self) -> Tree {
        Tree::from_level_sequence(&self.0)
    }
}

/// Stable key of an enumerated tree: its order and zero-based emission
/// index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeId {
    pub order: usize,
    pub index: usize,
}

impl std::fmt::Display for TreeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.index)
    }
}

/// Rooted-tree successor. With `p = None` the pivot is the last entry above
/// level 1. Returns `None` after the star.
fn next_rooted(layout: &[usize], p: Option<usize>) -> Option<Vec<usize>> {
    let p = match p {
        Some(p) => p,
        None => {
            let mut p = layout.len() - 1;
            while p > 0 && layout[p] == 1 {
                p -= 1;
            }
            p
        }
    };
    if p == 0 {
        return None;
    }
    let mut q = p - 1;
    while layout[q] != layout[p] - 1 {
        q -= 1;
    }
    let mut result = layout.to_vec();
    for i in p..result.len() {
        result[i] = result[i - p + q];
    }
    Some(result)
}

/// Splits off the first subtree of the root. Returns the index where the
/// second root child starts (or the length) plus the heights of the first
/// subtree and of the remainder.
struct Split {
    boundary: usize,
    left_height: usize,
    rest_height: usize,
}

fn split(layout: &[usize]) -> Split {
    let boundary = layout[2..]
        .iter()
        .position(|&l| l == 1)
        .map(|i| i + 2)
        .unwrap_or(layout.len());
    let left_height = layout[1..boundary].iter().max().map_or(0, |&m| m - 1);
    let rest_height = layout[boundary..].iter().copied().max().unwrap_or(0);
    Split {
        boundary,
        left_height,
        rest_height,
    }
}

/// Returns `candidate` if it is a canonical center rooting, otherwise the
/// next canonical sequence after it.
fn next_free(candidate: Vec<usize>) -> Vec<usize> {
    let s = split(&candidate);
    let left_len = s.boundary - 1;
    let rest_len = candidate.len() - s.boundary + 1;
    let mut valid = s.rest_height >= s.left_height;
    if valid && s.rest_height == s.left_height {
        if left_len > rest_len {
            valid = false;
        } else if left_len == rest_len {
            // Compare the first subtree (shifted up one level) with the rest.
            let left = candidate[1..s.boundary].iter().map(|&l| l - 1);
            let rest = std::iter::once(0).chain(candidate[s.boundary..].iter().copied());
            if left.gt(rest) {
                valid = false;
            }
        }
    }
    if valid {
        return candidate;
    }
    let p = left_len;
    let mut next = next_rooted(&candidate, Some(p)).expect("pivot is positive");
    if candidate[p] > 2 {
        let new_left_height = split(&next).left_height;
        let len = next.len();
        for (k, slot) in next[len - (new_left_height + 1)..].iter_mut().enumerate() {
            *slot = k + 1;
        }
    }
    next
}

/// Streams the free trees of order `n` as level sequences.
pub struct FreeTrees {
    pending: Option<Vec<usize>>,
    single: bool,
}

impl FreeTrees {
    pub fn new(n: usize) -> Result<Self, EnumError> {
        if !(1..=MAX_ENUM_ORDER).contains(&n) {
            return Err(EnumError::OrderOutOfRange(n));
        }
        if n == 1 {
            return Ok(FreeTrees {
                pending: Some(vec![0]),
                single: true,
            });
        }
        // The path rooted at a center.
        let start: Vec<usize> = (0..=n / 2).chain(1..n.div_ceil(2)).collect();
        Ok(FreeTrees {
            pending: Some(start),
            single: false,
        })
    }
}

impl Iterator for FreeTrees {
    type Item = LevelSequence;

    fn next(&mut self) -> Option<LevelSequence> {
        let candidate = self.pending.take()?;
        if self.single {
            return Some(LevelSequence(candidate));
        }
        let tree = next_free(candidate);
        self.pending = next_rooted(&tree, None);
        Some(LevelSequence(tree))
    }
}

/// Every free tree on `n` vertices, tagged with its id, in a deterministic
/// order.
pub fn enumerate_free_trees(n: usize) -> Result<impl Iterator<Item = (TreeId, Tree)>, EnumError> {
    Ok(FreeTrees::new(n)?
        .enumerate()
        .map(move |(index, seq)| (TreeId { order: n, index }, seq.to_tree())))
}

pub fn count_free_trees(n: usize) -> Result<u64, EnumError> {
    Ok(FreeTrees::new(n)?.count() as u64)
}

/// Counts isomorphism classes among all `n^(n-2)` labeled trees, decoded
/// from every Prüfer sequence and compared by canonical code.
pub fn prufer_dedup_oracle(n: usize) -> Result<u64, EnumError> {
    if n > PRUFER_ORACLE_MAX_ORDER {
        return Err(EnumError::OrderTooLargeForOracle {
            order: n,
            limit: PRUFER_ORACLE_MAX_ORDER,
        });
    }
    if n == 0 {
        return Err(EnumError::OrderOutOfRange(0));
    }
    if n <= 2 {
        return Ok(1);
    }
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let mut seq = vec![0usize; n - 2];
    loop {
        seen.insert(canonical_code(&Tree::from_prufer(&seq)));
        // odometer increment
        let mut i = seq.len();
        loop {
            if i == 0 {
                return Ok(seen.len() as u64);
            }
            i -= 1;
            seq[i] += 1;
            if seq[i] < n {
                break;
            }
            seq[i] = 0;
        }
    }
}

/// The same count over only those Prüfer sequences in which label `i`
/// occurs at least as often as label `i + 1`. Labeling any tree by
/// non-increasing degree yields such a sequence, so every class is still
/// reached, at a small fraction of the `n^(n-2)` cost.
pub fn prufer_dedup_oracle_degree_sorted(n: usize) -> Result<u64, EnumError> {
    if n > PRUFER_ORACLE_MAX_ORDER {
        return Err(EnumError::OrderTooLargeForOracle {
            order: n,
            limit: PRUFER_ORACLE_MAX_ORDER,
        });
    }
    if n == 0 {
        return Err(EnumError::OrderOutOfRange(0));
    }
    if n <= 2 {
        return Ok(1);
    }
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    for counts in partitions(n - 2, n) {
        let mut seq: Vec<usize> = counts.iter().enumerate().flat_map(|(label, &c)| std::iter::repeat_n(label, c)).collect();
        loop {
            seen.insert(canonical_code(&Tree::from_prufer(&seq)));
            if !next_permutation(&mut seq) {
                break;
            }
        }
    }
    Ok(seen.len() as u64)
}

/// Partitions of `total` into at most `max_parts` parts, largest first.
fn partitions(total: usize, max_parts: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, cap: usize, parts_left: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(current.clone());
            return;
        }
        if parts_left == 0 {
            return;
        }
        for part in (1..=cap.min(rest)).rev() {
            current.push(part);
            go(rest - part, part, parts_left - 1, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    go(total, total, max_parts, &mut Vec::new(), &mut out);
    out
}

/// Next lexicographic permutation in place; false after the last one.
fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|&x| x > v[i]).expect("pivot has a larger successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Free-tree counts from rooted-tree counts (Euler transform) and the
    /// dissimilarity relation; independent of the generator.
    fn counting_oracle(max_n: usize) -> Vec<u64> {
        let mut rooted = vec![0u64; max_n + 1];
        rooted[1] = 1;
        for n in 1..max_n {
            // r(n+1) = (1/n) sum_{k=1}^{n} (sum_{d | k} d r(d)) r(n-k+1)
            let mut total = 0u64;
            for k in 1..=n {
                let s: u64 = (1..=k).filter(|d| k % d == 0).map(|d| d as u64 * rooted[d]).sum();
                total += s * rooted[n - k + 1];
            }
            rooted[n + 1] = total / n as u64;
        }
        let mut free = vec![0u64; max_n + 1];
        for n in 1..=max_n {
            let pairs: u64 = (1..n).map(|i| rooted[i] * rooted[n - i]).sum();
            let half = if n % 2 == 0 { rooted[n / 2] } else { 0 };
            free[n] = rooted[n] - (pairs - half) / 2;
        }
        free
    }

    #[test]
    fn small_orders() {
        assert_eq!(count_free_trees(1).unwrap(), 1);
        assert_eq!(count_free_trees(2).unwrap(), 1);
        assert_eq!(count_free_trees(4).unwrap(), 2);
        assert_eq!(count_free_trees(7).unwrap(), 11);
        let trees: Vec<_> = enumerate_free_trees(4).unwrap().map(|(_, t)| t).collect();
        let mut degs: Vec<Vec<usize>> = trees.iter().map(Tree::degree_sequence).collect();
        degs.sort();
        assert_eq!(degs, vec![vec![2, 2, 1, 1], vec![3, 1, 1, 1]]);
        assert_eq!(count_free_trees(0), Err(EnumError::OrderOutOfRange(0)));
        assert_eq!(count_free_trees(21), Err(EnumError::OrderOutOfRange(21)));
    }

    #[test]
    fn prufer_oracle_small() {
        assert_eq!(prufer_dedup_oracle(1).unwrap(), 1);
        assert_eq!(prufer_dedup_oracle(3).unwrap(), 1);
        assert_eq!(prufer_dedup_oracle(4).unwrap(), 2);
        assert_eq!(prufer_dedup_oracle(6).unwrap(), 6);
        assert!(prufer_dedup_oracle(11).is_err());
    }

    #[test]
    fn counts_agree_with_prufer_oracle() {
        for n in 1..=8 {
            assert_eq!(count_free_trees(n).unwrap(), prufer_dedup_oracle(n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn degree_sorted_oracle_matches() {
        for n in 1..=8 {
            assert_eq!(prufer_dedup_oracle_degree_sorted(n).unwrap(), prufer_dedup_oracle(n).unwrap(), "n = {n}");
        }
        assert_eq!(prufer_dedup_oracle_degree_sorted(10).unwrap(), count_free_trees(10).unwrap());
        assert!(prufer_dedup_oracle_degree_sorted(11).is_err());
        let mut v = vec![0, 0, 1];
        let mut all = vec![v.clone()];
        while next_permutation(&mut v) {
            all.push(v.clone());
        }
        assert_eq!(all, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
        assert_eq!(partitions(4, 2), vec![vec![4], vec![3, 1], vec![2, 2]]);
    }

    #[test]
    fn counts_agree_with_counting_oracle() {
        let expected = counting_oracle(16);
        for n in 1..=16 {
            assert_eq!(count_free_trees(n).unwrap(), expected[n], "n = {n}");
        }
    }

    #[test]
    fn emitted_trees_are_valid_distinct_and_ordered() {
        for n in 1..=13 {
            let seqs: Vec<LevelSequence> = FreeTrees::new(n).unwrap().collect();
            assert!(seqs.windows(2).all(|w| w[0] > w[1]), "order not decreasing at n = {n}");
            let mut codes = HashSet::new();
            for s in &seqs {
                assert!(s.is_well_formed());
                let t = s.to_tree();
                assert!(t.is_valid());
                assert_eq!(t.order(), n);
                assert!(codes.insert(canonical_code(&t)), "duplicate at n = {n}: {s:?}");
            }
        }
    }

    #[test]
    fn emission_is_deterministic() {
        let a: Vec<_> = FreeTrees::new(11).unwrap().collect();
        let b: Vec<_> = FreeTrees::new(11).unwrap().collect();
        assert_eq!(a, b);
        let ids: Vec<TreeId> = enumerate_free_trees(6).unwrap().map(|(id, _)| id).collect();
        assert_eq!(ids.iter().map(|id| id.index).collect::<Vec<_>>(), (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn order_fourteen_count() {
        let count = count_free_trees(14).unwrap();
        let codes: HashSet<Vec<u8>> = enumerate_free_trees(14).unwrap().map(|(_, t)| canonical_code(&t)).collect();
        assert_eq!(codes.len() as u64, count);
        println!("free trees of order 14: {count}");
    }
}
