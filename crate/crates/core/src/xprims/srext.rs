//! Extractors for affine somewhere-random sources: `t` rows of `r` bits, at
//! least one of them uniform.
//!
//! The default folds rows pairwise, `merge(a, b) = a ⊕ C(a ⊕ b; b[..w])`,
//! where `C` is cyclic hashing seeded by a slice of the right operand. If the
//! operands are equal the merge returns `a`. Each merge at most doubles the
//! joint degree, so a balanced fold over `t` rows has degree at most `t`.

use alloc::vec::Vec;

use crate::bits::BitVec;
use crate::error::{ensure_dim, Error, Result};
use crate::xprims::lsext::LinearSeededExtractor;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SrStrategy {
    /// Balanced pairwise fold with slice-seeded merges of the given seed width.
    Fold { seed_width: usize },
    /// XOR of all rows. Degree 1, fooled by two equal uniform rows.
    Xor,
}

impl SrStrategy {
    /// Default fold for rows of `r` bits, seeded by half a row.
    pub fn default_for(r: usize) -> Self {
        SrStrategy::Fold { seed_width: (r / 2).max(1) }
    }
}

fn merge(a: &BitVec, b: &BitVec, w: usize) -> Result<BitVec> {
    let e = LinearSeededExtractor::cyclic(a.len(), w, a.len())?;
    let mixed = e.extract(&(a ^ b), &b.prefix(w))?;
    Ok(a ^ &mixed)
}

pub fn affine_srext(rows: &[BitVec]) -> Result<BitVec> {
    let r = rows.first().map(|x| x.len()).unwrap_or(0);
    affine_srext_with(rows, SrStrategy::default_for(r))
}

pub fn affine_srext_with(rows: &[BitVec], strategy: SrStrategy) -> Result<BitVec> {
    let first = rows.first().ok_or_else(|| Error::InvalidParameter("no rows to merge".into()))?;
    let r = first.len();
    for row in rows {
        ensure_dim("somewhere-random row", r, row.len())?;
    }
    match strategy {
        SrStrategy::Xor => {
            let mut acc = first.clone();
            for row in &rows[1..] {
                acc ^= row;
            }
            Ok(acc)
        }
        SrStrategy::Fold { seed_width } => {
            if seed_width == 0 || seed_width > r {
                return Err(Error::InvalidParameter(alloc::format!("fold seed width {seed_width} outside 1..={r}")));
            }
            let mut level: Vec<BitVec> = rows.to_vec();
            while level.len() > 1 {
                let mut next = Vec::with_capacity(level.len().div_ceil(2));
                for pair in level.chunks(2) {
                    match pair {
                        [a, b] => next.push(merge(a, b, seed_width)?),
                        [a] => next.push(a.clone()),
                        _ => unreachable!(),
                    }
                }
                level = next;
            }
            Ok(level.pop().expect("one row left"))
        }
    }
}

/// Joint degree of the fold output when every row has degree `row_degree`.
pub fn fold_degree(t: usize, row_degree: usize) -> usize {
    let mut depth = 0;
    let mut width = t.max(1);
    while width > 1 {
        width = width.div_ceil(2);
        depth += 1;
    }
    row_degree << depth
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::ExactDist;
    use alloc::vec;

    #[test]
    fn single_row_is_identity() {
        let row = BitVec::from_bitstr("10110");
        assert_eq!(affine_srext(core::slice::from_ref(&row)).unwrap(), row);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(affine_srext(&[BitVec::zeros(3), BitVec::zeros(4)]).is_err());
        assert!(affine_srext(&[]).is_err());
    }

    #[test]
    fn equal_uniform_rows_stay_uniform() {
        for t in 1..=5 {
            let d = ExactDist::from_outcomes(
                8,
                (0..256u64).map(|v| {
                    let row = BitVec::from_u64(8, v);
                    affine_srext(&vec![row; t]).unwrap().to_u64()
                }),
            );
            assert_eq!(d, ExactDist::uniform(8), "t = {t}");
        }
    }

    #[test]
    fn xor_strategy_cancels_pairs() {
        let row = BitVec::from_bitstr("1101");
        let out = affine_srext_with(&[row.clone(), row], SrStrategy::Xor).unwrap();
        assert!(out.is_zero());
    }

    #[test]
    fn degree_bound() {
        assert_eq!(fold_degree(1, 3), 3);
        assert_eq!(fold_degree(2, 1), 2);
        assert_eq!(fold_degree(5, 1), 8);
    }
}
