//! Algebraic normal form of Boolean functions via the Möbius transform.
//!
//! Truth tables and coefficient vectors share an index convention: input `x`
//! (bit `i` = variable `i`) and monomial `S` (bit `i` set iff `x_i ∈ S`) are
//! both stored at position `x` / `S`.

use alloc::vec::Vec;

use crate::bits::BitVec;
use crate::error::{Error, Result};

pub const DEFAULT_ANF_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnfPoly {
    num_vars: usize,
    coeffs: BitVec,
}

/// In-place Möbius transform of a table of `2^n` bits. The transform is an
/// involution, so it maps truth tables to coefficients and back.
fn mobius(words: &mut [u64], n: usize) {
    const MASKS: [u64; 6] = [
        0x5555_5555_5555_5555,
        0x3333_3333_3333_3333,
        0x0f0f_0f0f_0f0f_0f0f,
        0x00ff_00ff_00ff_00ff,
        0x0000_ffff_0000_ffff,
        0x0000_0000_ffff_ffff,
    ];
    for (s, &m) in MASKS.iter().enumerate().take(n.min(6)) {
        let shift = 1u32 << s;
        for w in words.iter_mut() {
            *w ^= (*w & m) << shift;
        }
    }
    for s in 6..n {
        let stride = 1usize << (s - 6);
        let mut base = 0;
        while base < words.len() {
            for j in base..base + stride {
                words[j + stride] ^= words[j];
            }
            base += 2 * stride;
        }
    }
}

pub fn anf_of(truth_table: &BitVec) -> Result<AnfPoly> {
    anf_with_cap(truth_table, DEFAULT_ANF_CAP)
}

pub fn anf_with_cap(truth_table: &BitVec, cap: usize) -> Result<AnfPoly> {
    let len = truth_table.len();
    if !len.is_power_of_two() {
        return Err(Error::InvalidParameter(alloc::format!("truth table length {len} is not a power of two")));
    }
    let n = len.trailing_zeros() as usize;
    if n > cap {
        return Err(Error::BudgetExceeded { what: "ANF variable count", needed: n as u128, budget: cap as u128 });
    }
    let mut words = truth_table.words().to_vec();
    mobius(&mut words, n);
    Ok(AnfPoly { num_vars: n, coeffs: BitVec::from_words(len, &words) })
}

/// Truth table of `f` on `n` variables.
pub fn truth_table(n: usize, f: impl Fn(u64) -> bool) -> BitVec {
    let mut t = BitVec::zeros(1 << n);
    for x in 0..1u64 << n {
        if f(x) {
            t.set(x as usize, true);
        }
    }
    t
}

/// Degree of `f` on `n ≤ cap` variables.
pub fn degree_of(n: usize, f: impl Fn(u64) -> bool) -> Result<usize> {
    if n > DEFAULT_ANF_CAP {
        return Err(Error::BudgetExceeded {
            what: "ANF variable count",
            needed: n as u128,
            budget: DEFAULT_ANF_CAP as u128,
        });
    }
    Ok(anf_of(&truth_table(n, f))?.degree())
}

impl AnfPoly {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Monomials as variable-subset masks, ascending.
    pub fn monomials(&self) -> Vec<u64> {
        self.coeffs.ones_iter().map(|i| i as u64).collect()
    }

    pub fn has_monomial(&self, mask: u64) -> bool {
        self.coeffs.get(mask as usize)
    }

    /// Largest monomial size; the zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.ones_iter().map(|i| i.count_ones() as usize).max().unwrap_or(0)
    }

    pub fn eval(&self, x: u64) -> bool {
        // a monomial S contributes iff S ⊆ x
        let mut acc = false;
        for s in self.coeffs.ones_iter() {
            if s as u64 & !x == 0 {
                acc ^= true;
            }
        }
        acc
    }

    pub fn to_truth_table(&self) -> BitVec {
        let mut words = self.coeffs.words().to_vec();
        mobius(&mut words, self.num_vars);
        BitVec::from_words(1 << self.num_vars, &words)
    }
}
