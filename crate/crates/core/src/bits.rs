//! Packed bit vectors over F₂.
//!
//! Bit `i` lives in word `i / 64` at position `i % 64`. Bits beyond `len` in
//! the last word are always zero, so word-wise equality is value equality.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{BitAnd, BitXor, BitXorAssign};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; words_for(len)] }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = BitVec { len, words: vec![!0; words_for(len)] };
        v.clear_pad();
        v
    }

    /// The low `len` bits of `value`; `len` must be at most 64.
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= 64, "from_u64 takes at most 64 bits");
        let mut v = BitVec { len, words: vec![value; words_for(len)] };
        v.clear_pad();
        v
    }

    pub fn from_words(len: usize, words: &[u64]) -> Self {
        let mut w = words.to_vec();
        w.resize(words_for(len), 0);
        let mut v = BitVec { len, words: w };
        v.clear_pad();
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Parses a string of `0`/`1` characters; character `i` is bit `i`.
    /// Any other character (spaces, underscores) is skipped.
    pub fn from_bitstr(s: &str) -> Self {
        let bits: Vec<bool> = s
            .chars()
            .filter_map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect();
        BitVec::from_bools(&bits)
    }

    fn clear_pad(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        let m = 1u64 << (i & 63);
        if b {
            self.words[i >> 6] |= m;
        } else {
            self.words[i >> 6] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// F₂ inner product. Panics on length mismatch.
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "dot of unequal lengths");
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    /// Value of the first (up to) 64 bits as an integer, bit 0 least significant.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= 64, "to_u64 on a vector longer than 64 bits");
        self.words.first().copied().unwrap_or(0)
    }

    /// Bits `start..start+len`.
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        assert!(start + len <= self.len, "slice out of range");
        let mut out = BitVec::zeros(len);
        if start.is_multiple_of(64) {
            let w0 = start / 64;
            let nw = words_for(len);
            out.words.copy_from_slice(&self.words[w0..w0 + nw]);
            out.clear_pad();
            return out;
        }
        for i in 0..len {
            if self.get(start + i) {
                out.set(i, true);
            }
        }
        out
    }

    /// The first `len` bits (the `Slice` primitive).
    pub fn prefix(&self, len: usize) -> BitVec {
        self.slice(0, len)
    }

    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.extend(other);
        out
    }

    pub fn concat_all<'a, I: IntoIterator<Item = &'a BitVec>>(parts: I) -> BitVec {
        let mut out = BitVec::zeros(0);
        for p in parts {
            out.extend(p);
        }
        out
    }

    pub fn extend(&mut self, other: &BitVec) {
        if self.len.is_multiple_of(64) {
            self.words.extend_from_slice(&other.words);
            self.len += other.len;
            return;
        }
        let old = self.len;
        self.len += other.len;
        self.words.resize(words_for(self.len), 0);
        for i in 0..other.len {
            if other.get(i) {
                self.set(old + i, true);
            }
        }
    }

    pub fn push(&mut self, b: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        self.len += 1;
        if b {
            self.set(self.len - 1, true);
        }
    }

    /// Splits into consecutive chunks of `width` bits; a short tail is dropped.
    pub fn chunks(&self, width: usize) -> Vec<BitVec> {
        assert!(width > 0);
        (0..self.len / width).map(|i| self.slice(i * width, width)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Indices of the set bits, ascending.
    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            core::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + t)
                }
            })
        })
    }

    pub fn xor_in_place(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "xor of unequal lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        for (i, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(i * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }
}

impl BitXor for &BitVec {
    type Output = BitVec;
    fn bitxor(self, rhs: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_in_place(rhs);
        out
    }
}

impl BitXorAssign<&BitVec> for BitVec {
    fn bitxor_assign(&mut self, rhs: &BitVec) {
        self.xor_in_place(rhs);
    }
}

impl BitAnd for &BitVec {
    type Output = BitVec;
    fn bitand(self, rhs: &BitVec) -> BitVec {
        assert_eq!(self.len, rhs.len, "and of unequal lengths");
        BitVec { len: self.len, words: self.words.iter().zip(&rhs.words).map(|(a, b)| a & b).collect() }
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec(")?;
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    #[test]
    fn pad_bits_stay_zero() {
        let v = BitVec::ones(70);
        assert_eq!(v.weight(), 70);
        assert_eq!(v.words()[1], (1 << 6) - 1);
        let w = BitVec::from_u64(3, 0xff);
        assert_eq!(w.to_u64(), 7);
    }

    #[test]
    fn slice_concat_roundtrip() {
        let v = BitVec::from_bitstr("1101001110101");
        let a = v.slice(0, 5);
        let b = v.slice(5, 8);
        assert_eq!(a.concat(&b), v);
        assert_eq!(a, BitVec::from_bitstr("11010"));
    }

    #[test]
    fn long_extend() {
        let a = BitVec::ones(63);
        let b = BitVec::from_bitstr("101");
        let c = a.concat(&b);
        assert_eq!(c.len(), 66);
        assert!(c.get(63) && !c.get(64) && c.get(65));
        assert_eq!(c.weight(), 65);
    }

    #[test]
    fn dot_matches_definition() {
        let x = BitVec::from_bitstr("1101");
        let y = BitVec::from_bitstr("1011");
        // 1·1 ⊕ 1·0 ⊕ 0·1 ⊕ 1·1 = 0
        assert!(!x.dot(&y));
        assert_eq!(x.ones_iter().collect::<Vec<_>>(), vec![0, 1, 3]);
    }
}
