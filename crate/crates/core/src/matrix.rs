//! Row-major matrices over F₂.
//!
//! A matrix `M` with `rows × cols` acts on column vectors: `M·x` has one bit
//! per row, `(M·x)_i = ⟨row_i, x⟩`.

use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::bits::BitVec;
use crate::error::{ensure_dim, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GF2Matrix {
    cols: usize,
    rows: Vec<BitVec>,
}

impl GF2Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        GF2Matrix { cols, rows: (0..rows).map(|_| BitVec::zeros(cols)).collect() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = GF2Matrix::zero(n, n);
        for i in 0..n {
            m.rows[i].set(i, true);
        }
        m
    }

    /// A matrix with no rows and `cols` columns (the basis of `{0}`).
    pub fn empty(cols: usize) -> Self {
        GF2Matrix { cols, rows: Vec::new() }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Result<Self> {
        for r in &rows {
            ensure_dim("matrix row length", cols, r.len())?;
        }
        Ok(GF2Matrix { cols, rows })
    }

    /// Rows given as the low `cols` bits of each integer.
    pub fn from_u64_rows(cols: usize, rows: &[u64]) -> Self {
        GF2Matrix { cols, rows: rows.iter().map(|&r| BitVec::from_u64(cols, r)).collect() }
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let rows = (0..rows)
            .map(|_| {
                let words: Vec<u64> = (0..cols.div_ceil(64)).map(|_| rng.gen()).collect();
                BitVec::from_words(cols, &words)
            })
            .collect();
        GF2Matrix { cols, rows }
    }

    /// Uniformly random invertible `n × n` matrix (rejection sampling).
    pub fn random_invertible<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let m = GF2Matrix::random(n, n, rng);
            if m.rank() == n {
                return m;
            }
        }
    }

    /// Uniformly random full-rank `k × n` matrix (rejection sampling).
    pub fn random_full_rank<R: Rng + ?Sized>(k: usize, n: usize, rng: &mut R) -> Self {
        loop {
            let m = GF2Matrix::random(k, n, rng);
            if m.rank() == k {
                return m;
            }
        }
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    #[inline]
    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, b: bool) {
        self.rows[r].set(c, b)
    }

    pub fn push_row(&mut self, row: BitVec) -> Result<()> {
        ensure_dim("matrix row length", self.cols, row.len())?;
        self.rows.push(row);
        Ok(())
    }

    pub fn into_rows(self) -> Vec<BitVec> {
        self.rows
    }

    /// Rows as integers; only valid for `cols <= 64`.
    pub fn to_u64_rows(&self) -> Vec<u64> {
        assert!(self.cols <= 64);
        self.rows.iter().map(|r| r.to_u64()).collect()
    }

    /// `M · x`.
    pub fn mul_vec(&self, x: &BitVec) -> Result<BitVec> {
        ensure_dim("matrix-vector product", self.cols, x.len())?;
        let mut out = BitVec::zeros(self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            if r.dot(x) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// `x^T · M`: the XOR of the rows selected by `x`.
    pub fn combine_rows(&self, x: &BitVec) -> Result<BitVec> {
        ensure_dim("row combination", self.rows.len(), x.len())?;
        let mut out = BitVec::zeros(self.cols);
        for i in x.ones_iter() {
            out.xor_in_place(&self.rows[i]);
        }
        Ok(out)
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &GF2Matrix) -> Result<GF2Matrix> {
        ensure_dim("matrix product", self.cols, other.n_rows())?;
        let rows = self.rows.iter().map(|r| other.combine_rows(r).expect("checked above")).collect();
        Ok(GF2Matrix { cols: other.cols, rows })
    }

    pub fn transpose(&self) -> GF2Matrix {
        let mut t = GF2Matrix::zero(self.cols, self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            for j in r.ones_iter() {
                t.rows[j].set(i, true);
            }
        }
        t
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &GF2Matrix) -> Result<GF2Matrix> {
        ensure_dim("vertical stack", self.cols, other.cols)?;
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(GF2Matrix { cols: self.cols, rows })
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &GF2Matrix) -> Result<GF2Matrix> {
        ensure_dim("horizontal stack", self.n_rows(), other.n_rows())?;
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| a.concat(b)).collect();
        Ok(GF2Matrix { cols: self.cols + other.cols, rows })
    }

    /// Columns `start..start+len` of every row.
    pub fn column_block(&self, start: usize, len: usize) -> GF2Matrix {
        GF2Matrix { cols: len, rows: self.rows.iter().map(|r| r.slice(start, len)).collect() }
    }

    /// Reduced row echelon form. Returns the nonzero rows and their pivot
    /// columns; the pivot of a row is its lowest set column index.
    pub fn rref(&self) -> (GF2Matrix, Vec<usize>) {
        let mut rows: Vec<BitVec> = self.rows.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(p) = (r..rows.len()).find(|&i| rows[i].get(c)) else {
                continue;
            };
            rows.swap(r, p);
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.get(c) {
                    row.xor_in_place(&pivot_row);
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        rows.truncate(r);
        (GF2Matrix { cols: self.cols, rows }, pivots)
    }

    /// Dimension of the row span, by Gaussian elimination.
    pub fn rank(&self) -> usize {
        if self.cols <= 64 {
            return rank_u64(&self.to_u64_rows());
        }
        rank_words(self.cols, self.rows.iter().map(|r| r.words()))
    }

    /// Basis of `{v : M v = 0}`, one vector per row of the result.
    pub fn kernel_basis(&self) -> GF2Matrix {
        let (r, pivots) = self.rref();
        let mut is_pivot = alloc::vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut out = GF2Matrix::empty(self.cols);
        for f in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitVec::zeros(self.cols);
            v.set(f, true);
            for (row, &p) in r.rows.iter().zip(&pivots) {
                if row.get(f) {
                    v.set(p, true);
                }
            }
            out.rows.push(v);
        }
        out
    }

    /// Inverse of a square matrix, or `None` when singular.
    pub fn inverse(&self) -> Option<GF2Matrix> {
        let n = self.rows.len();
        if n != self.cols {
            return None;
        }
        let aug = self.hstack(&GF2Matrix::identity(n)).ok()?;
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(r.column_block(n, n))
    }

    /// Canonical basis of the row span (RREF with zero rows removed).
    pub fn row_space(&self) -> GF2Matrix {
        self.rref().0
    }

    /// Every element of the row span, in the order of the combining integer.
    pub fn span_elements(&self) -> Vec<BitVec> {
        let k = self.rows.len();
        assert!(k < 32, "span enumeration limited to 31 generators");
        (0..1u64 << k).map(|c| self.combine_rows(&BitVec::from_u64(k, c)).expect("sized")).collect()
    }

    /// Reduces `v` against an RREF basis with the given pivots.
    pub fn reduce(rref_rows: &GF2Matrix, pivots: &[usize], v: &BitVec) -> BitVec {
        let mut out = v.clone();
        for (row, &p) in rref_rows.rows.iter().zip(pivots) {
            if out.get(p) {
                out.xor_in_place(row);
            }
        }
        out
    }
}

impl fmt::Debug for GF2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GF2Matrix {}x{} [", self.rows.len(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

/// Rank of rows packed as integers (columns ≤ 64).
pub fn rank_u64(rows: &[u64]) -> usize {
    let mut basis = [0u64; 64];
    let mut filled = 0u64;
    let mut rank = 0;
    for &r in rows {
        let mut v = r;
        while v != 0 {
            let p = v.trailing_zeros() as usize;
            if filled >> p & 1 == 1 {
                v ^= basis[p];
            } else {
                basis[p] = v;
                filled |= 1 << p;
                rank += 1;
                break;
            }
        }
    }
    rank
}

/// Rank of packed rows of `cols` bits, each keyed by its lowest set bit.
pub fn rank_words<'a, I: IntoIterator<Item = &'a [u64]>>(cols: usize, rows: I) -> usize {
    let mut basis: Vec<Option<Vec<u64>>> = alloc::vec![None; cols];
    let mut rank = 0;
    for r in rows {
        if rank == cols {
            break;
        }
        let mut v = r.to_vec();
        let mut w = 0;
        loop {
            while w < v.len() && v[w] == 0 {
                w += 1;
            }
            if w == v.len() {
                break;
            }
            let p = w * 64 + v[w].trailing_zeros() as usize;
            match &basis[p] {
                Some(b) => {
                    for (x, y) in v[w..].iter_mut().zip(&b[w..]) {
                        *x ^= *y;
                    }
                }
                None => {
                    basis[p] = Some(v);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

/// Incremental echelon basis for vectors of up to 64 bits. Each stored
/// vector is keyed by its lowest set bit.
#[derive(Clone, Debug)]
pub struct EchelonU64 {
    basis: [u64; 64],
    filled: u64,
    rank: usize,
}

impl Default for EchelonU64 {
    fn default() -> Self {
        EchelonU64 { basis: [0; 64], filled: 0, rank: 0 }
    }
}

impl EchelonU64 {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reduce(&self, mut v: u64) -> u64 {
        while v != 0 {
            let p = v.trailing_zeros() as usize;
            if self.filled >> p & 1 == 1 {
                v ^= self.basis[p];
            } else {
                return v;
            }
        }
        0
    }

    /// Inserts `v`; returns true when it was independent.
    pub fn insert(&mut self, v: u64) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        let p = r.trailing_zeros() as usize;
        self.basis[p] = r;
        self.filled |= 1 << p;
        self.rank += 1;
        true
    }

    pub fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vectors(&self) -> Vec<u64> {
        (0..64).filter(|&p| self.filled >> p & 1 == 1).map(|p| self.basis[p]).collect()
    }
}

/// `M · x` for a matrix packed as integer rows and a vector of ≤ 64 bits.
#[inline]
pub fn mul_vec_u64(rows: &[u64], x: u64) -> u64 {
    let mut out = 0u64;
    for (i, &r) in rows.iter().enumerate() {
        out |= (((r & x).count_ones() & 1) as u64) << i;
    }
    out
}

/// XOR of the rows selected by the bits of `c`.
#[inline]
pub fn combine_u64(rows: &[u64], mut c: u64) -> u64 {
    let mut out = 0u64;
    while c != 0 {
        let i = c.trailing_zeros() as usize;
        out ^= rows[i];
        c &= c - 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Span-enumeration oracle: rank = log2 of the number of distinct span elements.
    fn rank_by_span(m: &GF2Matrix) -> usize {
        let mut elems = m.span_elements();
        elems.sort();
        elems.dedup();
        elems.len().trailing_zeros() as usize
    }

    #[test]
    fn rank_trivial_cases() {
        assert_eq!(GF2Matrix::identity(8).rank(), 8);
        assert_eq!(GF2Matrix::zero(5, 7).rank(), 0);
    }

    #[test]
    fn rank_matches_span_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let m = GF2Matrix::random(6, 6, &mut rng);
            assert_eq!(m.rank(), rank_by_span(&m));
            assert_eq!(m.rref().1.len(), m.rank());
        }
        // a wide matrix takes the generic path
        for _ in 0..10 {
            let m = GF2Matrix::random(6, 70, &mut rng);
            assert_eq!(m.rank(), rank_by_span(&m));
        }
    }

    #[test]
    fn kernel_trivial_cases() {
        assert_eq!(GF2Matrix::identity(5).kernel_basis().n_rows(), 0);
        let k = GF2Matrix::zero(4, 4).kernel_basis();
        assert_eq!(k.n_rows(), 4);
        assert_eq!(k.rank(), 4);
    }

    #[test]
    fn kernel_exhaustive_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let m = GF2Matrix::random(3, 5, &mut rng);
            let kb = m.kernel_basis();
            assert_eq!(kb.n_rows(), 5 - m.rank());
            let span = kb.span_elements();
            assert_eq!(span.len(), 1 << (5 - m.rank()));
            for v in &span {
                assert!(m.mul_vec(v).unwrap().is_zero());
            }
            // and nothing outside the span is in the kernel
            let count = (0..32u64).filter(|&x| m.mul_vec(&BitVec::from_u64(5, x)).unwrap().is_zero()).count();
            assert_eq!(count, span.len());
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = GF2Matrix::random_invertible(9, &mut rng);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), GF2Matrix::identity(9));
        assert!(GF2Matrix::zero(3, 3).inverse().is_none());
    }

    #[test]
    fn echelon_u64_rank() {
        let mut e = EchelonU64::new();
        assert!(e.insert(0b011));
        assert!(e.insert(0b110));
        assert!(!e.insert(0b101));
        assert_eq!(e.rank(), 2);
        assert!(e.contains(0b101));
    }
}
