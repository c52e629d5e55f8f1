//! Binary extension fields GF(2^k) for `1 ≤ k ≤ 63`, elements as `u64` in
//! the polynomial basis (bit `i` is the coefficient of `X^i`).

use alloc::vec::Vec;

use crate::bits::BitVec;
use crate::error::{ensure_dim, Error, Result};

/// Full moduli (including the `X^k` term) for `k = 1..=63`: the first
/// irreducible trinomial `X^k + X^a + 1` by increasing `a`, or a pentanomial
/// where no trinomial exists.
pub const DEFAULT_MODULI: [u64; 63] = [
    0x3,
    0x7,
    0xb,
    0x13,
    0x25,
    0x43,
    0x83,
    0x11b,
    0x203,
    0x409,
    0x805,
    0x1009,
    0x201b,
    0x4021,
    0x8003,
    0x1002b,
    0x20009,
    0x40009,
    0x80027,
    0x100009,
    0x200005,
    0x400003,
    0x800021,
    0x100001b,
    0x2000009,
    0x400001b,
    0x8000027,
    0x10000003,
    0x20000005,
    0x40000003,
    0x80000009,
    0x10000008d,
    0x200000401,
    0x400000081,
    0x800000005,
    0x1000000201,
    0x2000000053,
    0x4000000063,
    0x8000000011,
    0x10000000039,
    0x20000000009,
    0x40000000081,
    0x80000000059,
    0x100000000021,
    0x20000000001b,
    0x400000000003,
    0x800000000021,
    0x100000000002d,
    0x2000000000201,
    0x400000000001d,
    0x800000000004b,
    0x10000000000009,
    0x20000000000047,
    0x40000000000201,
    0x80000000000081,
    0x100000000000095,
    0x200000000000011,
    0x400000000080001,
    0x800000000000095,
    0x1000000000000003,
    0x2000000000000027,
    0x4000000020000001,
    0x8000000000000003,
];

/// Largest degree certified by exhaustive trial division.
pub const EXHAUSTIVE_CERT_MAX: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GF2k {
    k: usize,
    modulus: u64,
}

fn clmul(a: u64, b: u64) -> u128 {
    let mut r = 0u128;
    let mut b = b;
    let a = a as u128;
    while b != 0 {
        let i = b.trailing_zeros();
        r ^= a << i;
        b &= b - 1;
    }
    r
}

fn degree(p: u128) -> i32 {
    127 - p.leading_zeros() as i32
}

fn poly_mod(mut a: u128, m: u128) -> u128 {
    let dm = degree(m);
    while a != 0 && degree(a) >= dm {
        a ^= m << (degree(a) - dm);
    }
    a
}

fn poly_gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = poly_mod(a, b);
        a = b;
        b = r;
    }
    a
}

/// Exhaustive irreducibility: no polynomial of degree `1..=k/2` divides `m`.
pub fn irreducible_by_trial_division(m: u64) -> bool {
    let k = degree(m as u128);
    if k < 1 {
        return false;
    }
    for d in 1..=k / 2 {
        for low in 0u64..1u64 << d {
            let p = (1u128 << d) | low as u128;
            if poly_mod(m as u128, p) == 0 {
                return false;
            }
        }
    }
    true
}

/// Ben-Or: `m` of degree `k` is irreducible iff `gcd(m, X^{2^i} − X) = 1`
/// for every `i ≤ k/2`.
pub fn irreducible_ben_or(m: u64) -> bool {
    let k = degree(m as u128);
    if k < 1 {
        return false;
    }
    let f = GF2k { k: k as usize, modulus: m };
    let x = if k == 1 { 0 } else { 2u64 };
    let mut xp = x;
    for _ in 1..=k / 2 {
        xp = f.mul(xp, xp);
        if poly_gcd(m as u128, (xp ^ x) as u128) != 1 {
            return false;
        }
    }
    true
}

impl GF2k {
    /// The default field of degree `k`, certified on construction.
    pub fn new(k: usize) -> Result<Self> {
        if !(1..=63).contains(&k) {
            return Err(Error::InvalidParameter(alloc::format!("field degree {k} outside 1..=63")));
        }
        GF2k::with_modulus(DEFAULT_MODULI[k - 1])
    }

    /// A field from a full modulus; irreducibility is certified exhaustively
    /// for degree ≤ 24 and by Ben-Or above.
    pub fn with_modulus(modulus: u64) -> Result<Self> {
        let k = degree(modulus as u128);
        if !(1..=63).contains(&k) {
            return Err(Error::InvalidParameter(alloc::format!("modulus {modulus:#x} has bad degree")));
        }
        let ok = if k as usize <= EXHAUSTIVE_CERT_MAX {
            irreducible_by_trial_division(modulus)
        } else {
            irreducible_ben_or(modulus)
        };
        if !ok {
            return Err(Error::Uncertified(alloc::format!("modulus {modulus:#x} is reducible")));
        }
        Ok(GF2k { k: k as usize, modulus })
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    pub fn mask(&self) -> u64 {
        (1u64 << self.k) - 1
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        poly_mod(clmul(a, b), self.modulus as u128) as u64
    }

    pub fn square(&self, a: u64) -> u64 {
        self.mul(a, a)
    }

    pub fn pow3(&self, a: u64) -> u64 {
        self.mul(self.mul(a, a), a)
    }

    pub fn pow(&self, a: u64, mut e: u128) -> u64 {
        let mut base = a;
        let mut acc = 1u64;
        while e != 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        if a & self.mask() == 0 {
            return None;
        }
        Some(self.pow(a, (1u128 << self.k) - 2))
    }

    /// Width-checked multiplication of bit vectors.
    pub fn mul_bits(&self, a: &BitVec, b: &BitVec) -> Result<BitVec> {
        ensure_dim("field element", self.k, a.len())?;
        ensure_dim("field element", self.k, b.len())?;
        Ok(BitVec::from_u64(self.k, self.mul(a.to_u64(), b.to_u64())))
    }

    /// Matrix of `y ↦ c·y` acting on bit vectors (column `j` is `c·X^j`).
    pub fn mul_matrix(&self, c: u64) -> Vec<u64> {
        // packed rows: row i holds bit i of c·X^j at column j
        let mut rows = alloc::vec![0u64; self.k];
        for j in 0..self.k {
            let col = self.mul(c, 1 << j);
            for (i, row) in rows.iter_mut().enumerate() {
                if col >> i & 1 == 1 {
                    *row |= 1 << j;
                }
            }
        }
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf16_basics() {
        let f = GF2k::new(4).unwrap();
        assert_eq!(f.modulus(), 0b1_0011);
        assert_eq!(f.square(0b0010), 0b0100);
        assert_eq!(f.mul(0b1001, 1), 0b1001);
        assert_eq!(f.pow3(0), 0);
        // X^4 = X + 1
        assert_eq!(f.mul(0b1000, 0b0010), 0b0011);
        for a in 1..16 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
    }

    #[test]
    fn field_axioms_spot_check() {
        for k in [3usize, 8, 13, 16, 31] {
            let f = GF2k::new(k).unwrap();
            let m = f.mask();
            let samples = [1u64, 2, 3, 0x55 & m, m, (m >> 1) | 1, 0x1234_5678 & m];
            for &a in &samples {
                for &b in &samples {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &samples {
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn table_certifies_both_ways() {
        for k in 1..=16 {
            let m = DEFAULT_MODULI[k - 1];
            assert!(irreducible_by_trial_division(m), "k = {k}");
            assert!(irreducible_ben_or(m), "k = {k}");
        }
        for k in 1..=63 {
            assert!(GF2k::new(k).is_ok(), "k = {k}");
        }
        // X^4 + 1 = (X + 1)^4
        assert!(!irreducible_by_trial_division(0b1_0001));
        assert!(!irreducible_ben_or(0b1_0001));
        assert!(GF2k::with_modulus(0b1_0001).is_err());
    }

    #[test]
    fn multiplication_matrix_agrees() {
        let f = GF2k::new(6).unwrap();
        let c = 0b101101;
        let m = f.mul_matrix(c);
        for y in 0..64u64 {
            assert_eq!(crate::matrix::mul_vec_u64(&m, y), f.mul(c, y));
        }
    }
}
