//! Affine sources: the uniform distribution on `span(basis) + shift`.

use alloc::vec::Vec;

use rand::Rng;

use crate::bits::BitVec;
use crate::error::{ensure_dim, Error, Result};
use crate::matrix::GF2Matrix;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineSource {
    basis: GF2Matrix,
    shift: BitVec,
}

impl AffineSource {
    /// Rows of `basis` must be independent and `shift` must have `basis.n_cols()` bits.
    pub fn new(basis: GF2Matrix, shift: BitVec) -> Result<Self> {
        ensure_dim("affine source shift", basis.n_cols(), shift.len())?;
        let r = basis.rank();
        if r != basis.n_rows() {
            return Err(Error::RankDeficient { expected: basis.n_rows(), found: r });
        }
        Ok(AffineSource { basis, shift })
    }

    /// Builds a source from any spanning set, reducing it to an RREF basis.
    pub fn from_span(generators: &GF2Matrix, shift: BitVec) -> Result<Self> {
        AffineSource::new(generators.row_space(), shift)
    }

    pub fn linear(basis: GF2Matrix) -> Result<Self> {
        let n = basis.n_cols();
        AffineSource::new(basis, BitVec::zeros(n))
    }

    pub fn full(n: usize) -> Self {
        AffineSource { basis: GF2Matrix::identity(n), shift: BitVec::zeros(n) }
    }

    pub fn point(p: BitVec) -> Self {
        AffineSource { basis: GF2Matrix::empty(p.len()), shift: p }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Self {
        let basis = GF2Matrix::random_full_rank(k, n, rng);
        let words: Vec<u64> = (0..n.div_ceil(64)).map(|_| rng.gen()).collect();
        AffineSource { basis, shift: BitVec::from_words(n, &words) }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.basis.n_cols()
    }

    /// Entropy in bits, which is the dimension of the linear part.
    #[inline]
    pub fn entropy(&self) -> usize {
        self.basis.n_rows()
    }

    pub fn basis(&self) -> &GF2Matrix {
        &self.basis
    }

    pub fn shift(&self) -> &BitVec {
        &self.shift
    }

    /// The same subspace moved by `a`.
    pub fn shifted(&self, a: &BitVec) -> Result<Self> {
        ensure_dim("shift", self.n(), a.len())?;
        Ok(AffineSource { basis: self.basis.clone(), shift: &self.shift ^ a })
    }

    /// The support point indexed by `c` (bit `i` of `c` selects basis row `i`).
    pub fn point_at(&self, c: u64) -> BitVec {
        let k = self.entropy();
        let mut v = self.shift.clone();
        let mut c = if k < 64 { c & ((1u64 << k) - 1) } else { c };
        while c != 0 {
            let i = c.trailing_zeros() as usize;
            v.xor_in_place(self.basis.row(i));
            c &= c - 1;
        }
        v
    }

    /// Every support point, in the order of the combining integer.
    pub fn support(&self) -> impl Iterator<Item = BitVec> + '_ {
        let k = self.entropy();
        assert!(k < 40, "support enumeration limited to 2^39 points");
        (0..1u64 << k).map(move |c| self.point_at(c))
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        if v.len() != self.n() {
            return false;
        }
        let (r, piv) = self.basis.rref();
        GF2Matrix::reduce(&r, &piv, &(v ^ &self.shift)).is_zero()
    }

    /// `L(X) + c`, with a reduced basis.
    pub fn apply(&self, l: &GF2Matrix, c: &BitVec) -> Result<AffineSource> {
        ensure_dim("affine map columns", l.n_cols(), self.n())?;
        ensure_dim("affine map offset", l.n_rows(), c.len())?;
        let images: Result<Vec<BitVec>> = self.basis.rows().iter().map(|b| l.mul_vec(b)).collect();
        let gens = GF2Matrix::from_rows(l.n_rows(), images?)?;
        let shift = &l.mul_vec(&self.shift)? ^ c;
        AffineSource::from_span(&gens, shift)
    }

    /// Splits `X = A + B` with `A`, `B` independent, `L` constant on
    /// `Supp(B)` and `L` injective on `A`. `B` is linear; `A` carries the shift.
    pub fn condition(&self, l: &GF2Matrix) -> Result<(AffineSource, AffineSource)> {
        ensure_dim("conditioning map columns", l.n_cols(), self.n())?;
        let k = self.entropy();
        let n = self.n();
        let images: Result<Vec<BitVec>> = self.basis.rows().iter().map(|b| l.mul_vec(b)).collect();
        let img = GF2Matrix::from_rows(l.n_rows(), images?)?;
        // combinations c with c^T img = 0
        let coeffs = img.transpose().kernel_basis();
        let kernel_rows: Result<Vec<BitVec>> = coeffs.rows().iter().map(|c| self.basis.combine_rows(c)).collect();
        let b_basis = GF2Matrix::from_rows(n, kernel_rows?)?.row_space();

        // complete the kernel part to a basis of X using original rows
        let mut span = b_basis.clone();
        let mut a_rows = Vec::new();
        for row in self.basis.rows() {
            let trial = span.vstack(&GF2Matrix::from_rows(n, alloc::vec![row.clone()])?)?;
            if trial.rank() > span.n_rows() {
                span = trial;
                a_rows.push(row.clone());
            }
            if span.n_rows() == k {
                break;
            }
        }
        let a = AffineSource::new(GF2Matrix::from_rows(n, a_rows)?, self.shift.clone())?;
        let b = AffineSource::linear(b_basis)?;
        Ok((a, b))
    }
}
