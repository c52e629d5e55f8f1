//! Binary linear codes given by a generator matrix (`k × n`, full rank).

use alloc::vec::Vec;

use crate::bits::BitVec;
use crate::error::{ensure_budget, ensure_dim, Error, Result};
use crate::matrix::GF2Matrix;

/// Largest message length certified by enumeration.
pub const CERTIFY_MAX_K: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    generator: GF2Matrix,
    certified_distance: Option<usize>,
}

impl LinearCode {
    pub fn new(generator: GF2Matrix) -> Result<Self> {
        let r = generator.rank();
        if r != generator.n_rows() {
            return Err(Error::RankDeficient { expected: generator.n_rows(), found: r });
        }
        Ok(LinearCode { generator, certified_distance: None })
    }

    /// Builds and certifies in one step.
    pub fn certified(generator: GF2Matrix) -> Result<Self> {
        let mut c = LinearCode::new(generator)?;
        c.certify()?;
        Ok(c)
    }

    /// `[8, 4, 4]` extended Hamming code in systematic form.
    pub fn extended_hamming() -> Self {
        let rows = [0b1110_0001u64, 0b1101_0010, 0b1011_0100, 0b0111_1000];
        LinearCode { generator: GF2Matrix::from_u64_rows(8, &rows), certified_distance: Some(4) }
    }

    /// First-order Reed-Muller code `[2^r, r + 1, 2^(r−1)]`: the all-ones row
    /// followed by the coordinate functions.
    pub fn reed_muller_first_order(r: usize) -> Result<Self> {
        if r == 0 || r > 16 {
            return Err(Error::InvalidParameter(alloc::format!("Reed-Muller order parameter {r}")));
        }
        let n = 1usize << r;
        let mut rows = Vec::with_capacity(r + 1);
        rows.push(BitVec::ones(n));
        for i in 0..r {
            let mut row = BitVec::zeros(n);
            for p in 0..n {
                row.set(p, p >> i & 1 == 1);
            }
            rows.push(row);
        }
        LinearCode::new(GF2Matrix::from_rows(n, rows)?)
    }

    pub fn identity(k: usize) -> Self {
        LinearCode { generator: GF2Matrix::identity(k), certified_distance: Some(1.min(k)) }
    }

    /// Block-diagonal repetition of `self`: each `k`-bit chunk of the message
    /// is encoded separately. The distance is unchanged.
    pub fn tiled(&self, copies: usize) -> Result<Self> {
        if copies == 0 {
            return Err(Error::InvalidParameter("tiling needs at least one copy".into()));
        }
        let (k, n) = (self.k(), self.n_code());
        let mut rows = Vec::with_capacity(k * copies);
        for c in 0..copies {
            for row in self.generator.rows() {
                let mut wide = BitVec::zeros(n * copies);
                for j in row.ones_iter() {
                    wide.set(c * n + j, true);
                }
                rows.push(wide);
            }
        }
        Ok(LinearCode {
            generator: GF2Matrix::from_rows(n * copies, rows)?,
            certified_distance: self.certified_distance,
        })
    }

    pub fn k(&self) -> usize {
        self.generator.n_rows()
    }

    pub fn n_code(&self) -> usize {
        self.generator.n_cols()
    }

    pub fn generator(&self) -> &GF2Matrix {
        &self.generator
    }

    pub fn certified_distance(&self) -> Option<usize> {
        self.certified_distance
    }

    pub fn encode(&self, msg: &BitVec) -> Result<BitVec> {
        ensure_dim("code message", self.k(), msg.len())?;
        self.generator.combine_rows(msg)
    }

    /// Minimum weight of a nonzero codeword, found by a Gray-code walk over
    /// all messages.
    pub fn certify(&mut self) -> Result<usize> {
        let d = min_distance(&self.generator)?;
        self.certified_distance = Some(d);
        Ok(d)
    }
}

pub fn min_distance(generator: &GF2Matrix) -> Result<usize> {
    let k = generator.n_rows();
    ensure_budget("code certification", 1u128 << k, 1u128 << CERTIFY_MAX_K)?;
    let n = generator.n_cols();
    let mut word = BitVec::zeros(n);
    let mut best = n;
    for i in 1u64..1u64 << k {
        word.xor_in_place(generator.row(i.trailing_zeros() as usize));
        best = best.min(word.weight());
    }
    Ok(if k == 0 { 0 } else { best })
}
