//! Seeded non-malleable extractor over GF(2^(n/2)).
//!
//! Bit `i` of the output is `⟨x, (b_i·Y ∥ b_i·Y³)⟩` where `b_i = X^i` is the
//! polynomial basis. The seed has `n/2 − 1` bits and names a nonzero field
//! element: seed value `y` stands for the element with integer value `y + 1`.

use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;

use crate::affine::AffineSource;
use crate::bits::BitVec;
use crate::dist::ratio;
use crate::error::{ensure_budget, ensure_dim, Error, Result};
use crate::field::GF2k;

/// Widest output handled by the exact testers (the joint table has `4^m` cells).
pub const MAX_TESTED_OUT: usize = 10;

#[derive(Clone, Debug)]
pub struct SnmExtractor {
    n: usize,
    field: GF2k,
}

impl SnmExtractor {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) || n > 128 {
            return Err(Error::InvalidParameter(alloc::format!(
                "non-malleable extractor needs even n in 4..=128, got {n}"
            )));
        }
        Ok(SnmExtractor { n, field: GF2k::new(n / 2)? })
    }

    pub fn with_field(field: GF2k) -> Result<Self> {
        if field.k() < 2 {
            return Err(Error::InvalidParameter("field degree must be at least 2".into()));
        }
        Ok(SnmExtractor { n: 2 * field.k(), field })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed_len(&self) -> usize {
        self.n / 2 - 1
    }

    pub fn field(&self) -> &GF2k {
        &self.field
    }

    /// The nonzero field element named by a seed value.
    pub fn seed_element(&self, y: u64) -> u64 {
        y + 1
    }

    /// The `n`-bit string `(b_i·Y ∥ b_i·Y³)` as two halves.
    pub fn mask_for(&self, y: u64, i: usize) -> (u64, u64) {
        let e = self.seed_element(y);
        let b = 1u64 << i;
        (self.field.mul(b, e), self.field.mul(b, self.field.pow3(e)))
    }

    fn check_indices(&self, indices: &[usize]) -> Result<()> {
        if indices.is_empty() {
            return Err(Error::InvalidParameter("empty output index list".into()));
        }
        let h = self.n / 2;
        if let Some(&bad) = indices.iter().find(|&&i| i >= h) {
            return Err(Error::InvalidParameter(alloc::format!("output index {bad} ≥ {h}")));
        }
        Ok(())
    }

    pub fn eval(&self, x: &BitVec, y: &BitVec, indices: &[usize]) -> Result<BitVec> {
        ensure_dim("non-malleable source", self.n, x.len())?;
        ensure_dim("non-malleable seed", self.seed_len(), y.len())?;
        self.check_indices(indices)?;
        let h = self.n / 2;
        let lo = x.slice(0, h).to_u64();
        let hi = x.slice(h, h).to_u64();
        let yv = y.to_u64();
        let mut out = BitVec::zeros(indices.len());
        for (o, &i) in indices.iter().enumerate() {
            let (u, v) = self.mask_for(yv, i);
            out.set(o, ((lo & u).count_ones() + (hi & v).count_ones()) & 1 == 1);
        }
        Ok(out)
    }

    /// Packed evaluation for `n ≤ 64`: bit `o` of the result is output `o`.
    pub fn eval_u64(&self, x: u64, y: u64, indices: &[usize]) -> u64 {
        let h = self.n / 2;
        let lo = x & self.field.mask();
        let hi = x >> h;
        let mut out = 0;
        for (o, &i) in indices.iter().enumerate() {
            let (u, v) = self.mask_for(y, i);
            out |= ((((lo & u).count_ones() + (hi & v).count_ones()) & 1) as u64) << o;
        }
        out
    }
}

/// The first `m` output indices.
pub fn default_indices(m: usize) -> Vec<usize> {
    (0..m).collect()
}

pub fn snm_ext(x: &BitVec, y: &BitVec, indices: &[usize]) -> Result<BitVec> {
    SnmExtractor::new(x.len())?.eval(x, y, indices)
}

fn packed_source(e: &SnmExtractor, x: &AffineSource) -> Result<(Vec<u64>, u64)> {
    ensure_dim("non-malleable source", e.n(), x.n())?;
    if e.n() > 64 {
        return Err(Error::InvalidParameter("exact testers need n ≤ 64".into()));
    }
    Ok((x.basis().to_u64_rows(), x.shift().to_u64()))
}

/// Counts of `(E(x, y), E(x, y'))` over the support of `X`, walked in Gray order.
fn joint_counts(e: &SnmExtractor, basis: &[u64], shift: u64, y: u64, y2: u64, idx: &[usize]) -> Vec<u64> {
    let m = idx.len();
    let img = |v: u64| e.eval_u64(v, y, idx) | e.eval_u64(v, y2, idx) << m;
    let steps: Vec<u64> = basis.iter().map(|&b| img(b)).collect();
    let mut counts = vec![0u64; 1 << (2 * m)];
    let mut cur = img(shift);
    counts[cur as usize] += 1;
    for i in 1u64..1u64 << basis.len() {
        cur ^= steps[i.trailing_zeros() as usize];
        counts[cur as usize] += 1;
    }
    counts
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonMalleabilityReport {
    pub n: usize,
    pub source_entropy: usize,
    pub out_bits: usize,
    /// Exact distance of `(Z, Z', Y)` from `(U, Z', Y)`.
    pub distance: BigRational,
    pub seeds_checked: u64,
}

/// Exact non-malleability distance for source `X`, uniform seed `Y` and
/// tampering `A`. `A` must map seeds to seeds and have no fixed point.
pub fn verify_nonmalleability(
    e: &SnmExtractor,
    x: &AffineSource,
    tamper: impl Fn(u64) -> u64,
    indices: &[usize],
    budget: u128,
) -> Result<NonMalleabilityReport> {
    e.check_indices(indices)?;
    let m = indices.len();
    if m > MAX_TESTED_OUT {
        return Err(Error::InvalidParameter(alloc::format!("at most {MAX_TESTED_OUT} output bits")));
    }
    let (basis, shift) = packed_source(e, x)?;
    let k = basis.len();
    let d = e.seed_len();
    ensure_budget("non-malleability enumeration", 1u128 << (k + d), budget)?;
    let seeds = 1u64 << d;
    for y in 0..seeds {
        let t = tamper(y);
        if t >= seeds {
            return Err(Error::InvalidParameter(alloc::format!("tamper maps seed {y} outside the seed space")));
        }
        if t == y {
            return Err(Error::InvalidParameter(alloc::format!("tamper has fixed point {y}")));
        }
    }
    let mut num = 0u128;
    for y in 0..seeds {
        let counts = joint_counts(e, &basis, shift, y, tamper(y), indices);
        // cnt'(z') and Σ_z |cnt(z, z')·2^m − cnt'(z')|
        for zp in 0..1usize << m {
            let row = &counts[zp << m..(zp + 1) << m];
            let marginal: u64 = row.iter().sum();
            for &c in row {
                num += ((c as u128) << m).abs_diff(marginal as u128);
            }
        }
    }
    Ok(NonMalleabilityReport {
        n: e.n(),
        source_entropy: k,
        out_bits: m,
        distance: ratio(num, 2u128 << (k + m + d)),
        seeds_checked: seeds,
    })
}

/// Exact distance of `(Z, Y)` from `(U, Y)` for a uniform seed.
pub fn seeded_distance(e: &SnmExtractor, x: &AffineSource, indices: &[usize], budget: u128) -> Result<BigRational> {
    e.check_indices(indices)?;
    let m = indices.len();
    if m > MAX_TESTED_OUT {
        return Err(Error::InvalidParameter(alloc::format!("at most {MAX_TESTED_OUT} output bits")));
    }
    let (basis, shift) = packed_source(e, x)?;
    let k = basis.len();
    let d = e.seed_len();
    ensure_budget("seeded distance enumeration", 1u128 << (k + d), budget)?;
    let mut num = 0u128;
    for y in 0..1u64 << d {
        // same seed twice: the low half of each cell index is Z
        let counts = joint_counts(e, &basis, shift, y, y, indices);
        let mut z = vec![0u64; 1 << m];
        for (cell, &c) in counts.iter().enumerate() {
            z[cell & ((1 << m) - 1)] += c;
        }
        for &c in &z {
            num += ((c as u128) << m).abs_diff(1u128 << k);
        }
    }
    Ok(ratio(num, 2u128 << (k + m + d)))
}
