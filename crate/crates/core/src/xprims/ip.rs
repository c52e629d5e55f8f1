//! Inner product over GF(2^m), reading each string as a vector of `m`-bit
//! field elements. A tail shorter than `m` bits is dropped.

use crate::bits::BitVec;
use crate::error::{ensure_dim, Result};
use crate::field::GF2k;

/// Inner-product extractor with the field fixed once.
#[derive(Clone, Debug)]
pub struct InnerProduct {
    field: GF2k,
}

impl InnerProduct {
    pub fn new(m: usize) -> Result<Self> {
        Ok(InnerProduct { field: GF2k::new(m)? })
    }

    pub fn with_field(field: GF2k) -> Self {
        InnerProduct { field }
    }

    pub fn field(&self) -> &GF2k {
        &self.field
    }

    pub fn out_len(&self) -> usize {
        self.field.k()
    }

    /// Number of field blocks read from a string of `len` bits.
    pub fn blocks(&self, len: usize) -> usize {
        len / self.field.k()
    }

    pub fn eval(&self, x: &BitVec, y: &BitVec) -> Result<BitVec> {
        ensure_dim("inner product operand", x.len(), y.len())?;
        let m = self.field.k();
        let mut acc = 0u64;
        for b in 0..self.blocks(x.len()) {
            let xb = x.slice(b * m, m).to_u64();
            let yb = y.slice(b * m, m).to_u64();
            acc ^= self.field.mul(xb, yb);
        }
        Ok(BitVec::from_u64(m, acc))
    }

    /// Packed form for strings of at most 64 bits.
    pub fn eval_u64(&self, len: usize, x: u64, y: u64) -> u64 {
        let m = self.field.k();
        let mask = self.field.mask();
        let mut acc = 0;
        for b in 0..len / m {
            acc ^= self.field.mul(x >> (b * m) & mask, y >> (b * m) & mask);
        }
        acc
    }
}

/// One-shot inner product with the default field of degree `m`.
pub fn ip(x: &BitVec, y: &BitVec, m: usize) -> Result<BitVec> {
    InnerProduct::new(m)?.eval(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn plain_dot_product() {
        let x = BitVec::from_bitstr("1101");
        let y = BitVec::from_bitstr("1011");
        assert_eq!(ip(&x, &y, 1).unwrap(), BitVec::from_bitstr("0"));
        assert!(ip(&x, &BitVec::zeros(4), 2).unwrap().is_zero());
    }

    #[test]
    fn gf4_by_table() {
        // GF(4) = {0, 1, w, w+1} with w^2 = w + 1; bit 0 is the constant term.
        // table[a][b] for a, b in 0..4
        let table = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]];
        // x = (01, 10), y = (10, 11) as bit strings, first char is bit 0
        let x = BitVec::from_bitstr("0110");
        let y = BitVec::from_bitstr("1011");
        // blocks: x = (2, 1), y = (1, 3)
        let want = table[2][1] ^ table[1][3];
        assert_eq!(ip(&x, &y, 2).unwrap().to_u64(), want);
    }

    #[test]
    fn tail_is_dropped() {
        let p = InnerProduct::new(4).unwrap();
        let x = BitVec::from_bitstr("1000" /* block */).concat(&BitVec::from_bitstr("11"));
        let y = BitVec::from_bitstr("1000").concat(&BitVec::from_bitstr("11"));
        assert_eq!(p.eval(&x, &y).unwrap().to_u64(), 1);
    }

    #[test]
    fn bilinear_and_packed_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in 1..=8 {
            let p = InnerProduct::new(m).unwrap();
            for _ in 0..50 {
                let n = 24;
                let [a, b, c]: [u64; 3] = core::array::from_fn(|_| rng.gen::<u64>() & 0xff_ffff);
                let (va, vb, vc) = (BitVec::from_u64(n, a), BitVec::from_u64(n, b), BitVec::from_u64(n, c));
                let lhs = p.eval(&(&va ^ &vb), &vc).unwrap();
                let rhs = &p.eval(&va, &vc).unwrap() ^ &p.eval(&vb, &vc).unwrap();
                assert_eq!(lhs, rhs);
                let lhs = p.eval(&vc, &(&va ^ &vb)).unwrap();
                let rhs = &p.eval(&vc, &va).unwrap() ^ &p.eval(&vc, &vb).unwrap();
                assert_eq!(lhs, rhs);
                assert_eq!(p.eval_u64(n, a, c), p.eval(&va, &vc).unwrap().to_u64());
            }
        }
    }

    #[test]
    fn length_mismatch() {
        assert!(ip(&BitVec::zeros(4), &BitVec::zeros(5), 1).is_err());
    }
}
