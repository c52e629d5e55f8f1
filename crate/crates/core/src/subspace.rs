//! Enumeration of linear subspaces of F₂ⁿ by canonical RREF representatives.
//!
//! A `k`-dimensional subspace is emitted once as the RREF basis whose row `i`
//! has its lowest set bit at pivot column `p_i`, with zeros at every other
//! pivot column. Patterns `p_0 < … < p_{k−1}` are visited in lexicographic
//! order; within a pattern the free entries run through a binary counter whose
//! bit `j` is the `j`-th free slot (row-major, ascending column).

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{ensure_budget, Error, Result};
use crate::matrix::GF2Matrix;

/// Number of `k`-dimensional subspaces of F₂ⁿ.
pub fn gaussian_binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    // [n k] = [n−1 k−1] + 2^k [n−1 k]
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for m in 1..=n {
        for j in (1..=k.min(m)).rev() {
            row[j] = row[j - 1].saturating_add(row[j].saturating_mul(1u128 << j));
        }
    }
    row[k]
}

/// `Σ_{j=lo..=hi} [n j]₂`.
pub fn gaussian_binomial_sum(n: usize, lo: usize, hi: usize) -> u128 {
    (lo..=hi).map(|j| gaussian_binomial(n, j)).fold(0u128, |a, b| a.saturating_add(b))
}

/// All pivot patterns of size `k` in lexicographic order.
pub fn pivot_patterns(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        out.push(c.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Free slots `(row, column)` of a pivot pattern, in counter order.
pub fn free_slots(n: usize, pattern: &[usize]) -> Vec<(usize, usize)> {
    let mut pivot_mask = 0u64;
    for &p in pattern {
        pivot_mask |= 1 << p;
    }
    let mut slots = Vec::new();
    for (r, &p) in pattern.iter().enumerate() {
        for c in p + 1..n {
            if pivot_mask >> c & 1 == 0 {
                slots.push((r, c));
            }
        }
    }
    slots
}

/// Number of subspaces sharing this pivot pattern.
pub fn pattern_size(n: usize, pattern: &[usize]) -> u128 {
    1u128 << free_slots(n, pattern).len()
}

/// Calls `f` with the basis rows of every subspace with the given pattern.
/// Rows are packed integers; requires `n ≤ 64`.
pub fn for_each_in_pattern(n: usize, pattern: &[usize], mut f: impl FnMut(&[u64])) {
    assert!(n <= 64, "packed enumeration needs n ≤ 64");
    let slots = free_slots(n, pattern);
    assert!(slots.len() < 64);
    let base: Vec<u64> = pattern.iter().map(|&p| 1u64 << p).collect();
    let mut rows = base.clone();
    // Gray-code walk: each step flips one free slot
    f(&rows);
    for step in 1u64..1u64 << slots.len() {
        let (r, c) = slots[step.trailing_zeros() as usize];
        rows[r] ^= 1 << c;
        f(&rows);
    }
}

/// Calls `f` with the rows of every subspace with the given pattern, in
/// counter order (slower than the Gray walk but matches the documented order).
pub fn for_each_in_pattern_ordered(n: usize, pattern: &[usize], mut f: impl FnMut(&[u64])) {
    let slots = free_slots(n, pattern);
    let mut rows: Vec<u64> = pattern.iter().map(|&p| 1u64 << p).collect();
    for counter in 0u64..1u64 << slots.len() {
        for (r, &p) in pattern.iter().enumerate() {
            rows[r] = 1 << p;
        }
        let mut c = counter;
        while c != 0 {
            let j = c.trailing_zeros() as usize;
            let (r, col) = slots[j];
            rows[r] |= 1 << col;
            c &= c - 1;
        }
        f(&rows);
    }
}

/// Visits every `k`-dimensional subspace of F₂ⁿ once, after checking the count
/// against `budget`.
pub fn for_each_subspace(n: usize, k: usize, budget: u128, mut f: impl FnMut(&[u64])) -> Result<()> {
    if n > 64 {
        return Err(Error::InvalidParameter("packed enumeration needs n ≤ 64".into()));
    }
    ensure_budget("subspace enumeration", gaussian_binomial(n, k), budget)?;
    for pattern in pivot_patterns(n, k) {
        for_each_in_pattern(n, &pattern, &mut f);
    }
    Ok(())
}

/// Stream of `k`-dimensional subspaces as RREF matrices, in canonical order.
pub struct SubspaceIter {
    n: usize,
    patterns: alloc::vec::IntoIter<Vec<usize>>,
    current: Option<(Vec<usize>, Vec<(usize, usize)>)>,
    counter: u64,
}

pub fn enumerate_subspaces(n: usize, k: usize, budget: u128) -> Result<SubspaceIter> {
    if n > 64 {
        return Err(Error::InvalidParameter("subspace enumeration needs n ≤ 64".into()));
    }
    ensure_budget("subspace enumeration", gaussian_binomial(n, k), budget)?;
    Ok(SubspaceIter { n, patterns: pivot_patterns(n, k).into_iter(), current: None, counter: 0 })
}

impl Iterator for SubspaceIter {
    type Item = GF2Matrix;

    fn next(&mut self) -> Option<GF2Matrix> {
        loop {
            if let Some((pattern, slots)) = &self.current {
                if self.counter < 1u64 << slots.len() {
                    let mut rows: Vec<u64> = pattern.iter().map(|&p| 1u64 << p).collect();
                    let mut c = self.counter;
                    while c != 0 {
                        let (r, col) = slots[c.trailing_zeros() as usize];
                        rows[r] |= 1 << col;
                        c &= c - 1;
                    }
                    self.counter += 1;
                    return Some(GF2Matrix::from_u64_rows(self.n, &rows));
                }
            }
            let pattern = self.patterns.next()?;
            let slots = free_slots(self.n, &pattern);
            self.current = Some((pattern, slots));
            self.counter = 0;
        }
    }
}

/// Vectors that are zero on every pivot column: one representative per coset.
pub fn coset_representatives(n: usize, pattern: &[usize]) -> Vec<u64> {
    let mut pivot_mask = 0u64;
    for &p in pattern {
        pivot_mask |= 1 << p;
    }
    let full = if n == 64 { !0 } else { (1u64 << n) - 1 };
    let free = full & !pivot_mask;
    let mut out = Vec::with_capacity(1 << free.count_ones());
    // enumerate submasks of `free` ascending
    let mut s = 0u64;
    loop {
        out.push(s);
        if s == free {
            break;
        }
        s = (s.wrapping_sub(free)) & free;
    }
    out
}

/// Uniformly random `k`-dimensional subspace, returned in RREF.
pub fn random_subspace<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> GF2Matrix {
    GF2Matrix::random_full_rank(k, n, rng).row_space()
}

/// RREF basis of the span of packed rows, sorted by pivot.
pub fn rref_u64(rows: &[u64]) -> Vec<u64> {
    let mut basis: Vec<u64> = Vec::new();
    for &r in rows {
        let mut v = r;
        for &b in &basis {
            if v >> b.trailing_zeros() & 1 == 1 {
                v ^= b;
            }
        }
        if v != 0 {
            let p = v.trailing_zeros();
            for b in basis.iter_mut() {
                if *b >> p & 1 == 1 {
                    *b ^= v;
                }
            }
            basis.push(v);
        }
    }
    basis.sort_by_key(|b| b.trailing_zeros());
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::rank_u64;

    #[test]
    fn gaussian_binomials() {
        assert_eq!(gaussian_binomial(4, 2), 35);
        assert_eq!(gaussian_binomial(8, 4), 200787);
        assert_eq!(gaussian_binomial(6, 3), 1395);
        assert_eq!(gaussian_binomial(5, 5), 1);
        assert_eq!(gaussian_binomial(5, 0), 1);
        // closed form (2⁴−1)(2⁴−2)/((2²−1)(2²−2))
        assert_eq!((15 * 14) / (3 * 2), 35);
    }

    #[test]
    fn counts_match_and_are_distinct() {
        for (n, k) in [(4, 2), (5, 2), (5, 3), (6, 3), (4, 4), (4, 0)] {
            let all: Vec<GF2Matrix> = enumerate_subspaces(n, k, u128::MAX).unwrap().collect();
            assert_eq!(all.len() as u128, gaussian_binomial(n, k));
            let mut spans: Vec<Vec<u64>> = all
                .iter()
                .map(|m| {
                    let mut s: Vec<u64> = m.span_elements().iter().map(|v| v.to_u64()).collect();
                    s.sort();
                    s
                })
                .collect();
            spans.sort();
            spans.dedup();
            assert_eq!(spans.len(), all.len());
            for m in &all {
                assert_eq!(m.rank(), k);
                assert_eq!(&m.row_space(), m);
            }
        }
    }

    #[test]
    fn gray_walk_covers_pattern() {
        let n = 6;
        for pattern in pivot_patterns(n, 3) {
            let mut a = Vec::new();
            let mut b = Vec::new();
            for_each_in_pattern(n, &pattern, |r| a.push(r.to_vec()));
            for_each_in_pattern_ordered(n, &pattern, |r| b.push(r.to_vec()));
            a.sort();
            b.sort();
            assert_eq!(a, b);
        }
        let mut count = 0u128;
        for_each_subspace(8, 4, u128::MAX, |r| {
            debug_assert_eq!(rank_u64(r), 4);
            count += 1;
        })
        .unwrap();
        assert_eq!(count, 200787);
    }

    #[test]
    fn cosets_partition_space() {
        let pattern = [1, 3];
        let reps = coset_representatives(5, &pattern);
        assert_eq!(reps.len(), 8);
        assert!(reps.iter().all(|r| r & 0b1010 == 0));
    }

    #[test]
    fn budget_rejects() {
        assert!(enumerate_subspaces(8, 4, 1000).is_err());
    }

    #[test]
    fn rref_u64_is_canonical() {
        assert_eq!(rref_u64(&[0b110, 0b011]), vec![0b101, 0b110]);
    }
}
