//! Linear seeded extractors: for every fixed seed the output is `T(seed)·x`.
//!
//! Two hashing families are built in. `Toeplitz` takes a seed of `n + m − 1`
//! bits; `Cyclic` accepts any seed length and fills row `i` with the seed
//! rotated by `i`. Both are bilinear, so every output bit has joint degree 2.
//! Cyclic output repeats with the seed length as its period, so it is only a
//! hash for `m ≤ d`. `Polynomial` reads the seed as a point `σ` of `GF(2^d)`
//! and evaluates `x`, cut into field elements, as a polynomial at `σ + c` for
//! a few constants `c`; its seed degree is the largest popcount of an
//! exponent. A last family is a table of matrices indexed by the seed value.

use alloc::vec::Vec;

use num_rational::BigRational;

use crate::affine::AffineSource;
use crate::anf::degree_of;
use crate::bits::BitVec;
use crate::dist::ratio;
use crate::error::{ensure_budget, ensure_dim, Error, Result};
use crate::field::GF2k;
use crate::matrix::{rank_u64, GF2Matrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Toeplitz,
    Cyclic,
    /// Evaluation over `GF(2^q)`, `q = min(d, 63)`; the seed is read through
    /// its first `q` bits.
    Polynomial {
        field: GF2k,
    },
    /// `matrices[s]` is the map for the seed whose integer value is `s`.
    Table {
        matrices: Vec<GF2Matrix>,
        degree: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSeededExtractor {
    n: usize,
    d: usize,
    m: usize,
    family: Family,
}

impl LinearSeededExtractor {
    pub fn toeplitz(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidParameter("toeplitz extractor needs n, m ≥ 1".into()));
        }
        Ok(LinearSeededExtractor { n, d: n + m - 1, m, family: Family::Toeplitz })
    }

    pub fn cyclic(n: usize, d: usize, m: usize) -> Result<Self> {
        if n == 0 || d == 0 || m == 0 {
            return Err(Error::InvalidParameter("cyclic extractor needs n, d, m ≥ 1".into()));
        }
        Ok(LinearSeededExtractor { n, d, m, family: Family::Cyclic })
    }

    pub fn polynomial(n: usize, d: usize, m: usize) -> Result<Self> {
        if n == 0 || d == 0 || m == 0 {
            return Err(Error::InvalidParameter("polynomial extractor needs n, d, m ≥ 1".into()));
        }
        let field = GF2k::new(d.min(63))?;
        Ok(LinearSeededExtractor { n, d, m, family: Family::Polynomial { field } })
    }

    /// A family given by `2^d` matrices of shape `m × n`. The joint degree is
    /// computed from the seed dependence of every matrix entry.
    pub fn from_table(matrices: Vec<GF2Matrix>) -> Result<Self> {
        let count = matrices.len();
        if count == 0 || !count.is_power_of_two() {
            return Err(Error::InvalidParameter(alloc::format!(
                "extractor table has {count} matrices, not a power of two"
            )));
        }
        let d = count.trailing_zeros() as usize;
        let (m, n) = (matrices[0].n_rows(), matrices[0].n_cols());
        for t in &matrices {
            ensure_dim("table matrix rows", m, t.n_rows())?;
            ensure_dim("table matrix columns", n, t.n_cols())?;
        }
        if d > 20 {
            return Err(Error::BudgetExceeded { what: "table degree", needed: 1 << d, budget: 1 << 20 });
        }
        let mut seed_degree = 0;
        for i in 0..m {
            for j in 0..n {
                let g = degree_of(d, |s| matrices[s as usize].get(i, j))?;
                seed_degree = seed_degree.max(g);
            }
        }
        Ok(LinearSeededExtractor { n, d, m, family: Family::Table { matrices, degree: seed_degree + 1 } })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed_len(&self) -> usize {
        self.d
    }

    pub fn out_len(&self) -> usize {
        self.m
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Bound on the degree of each output bit as a polynomial in the joint
    /// (source, seed) bits. Every monomial holds exactly one source bit.
    pub fn joint_degree(&self) -> usize {
        match &self.family {
            Family::Toeplitz | Family::Cyclic => 2,
            Family::Polynomial { field } => 1 + max_popcount(self.n.div_ceil(field.k())),
            Family::Table { degree, .. } => *degree,
        }
    }

    /// The `m × n` map selected by `seed`.
    pub fn matrix(&self, seed: &BitVec) -> Result<GF2Matrix> {
        ensure_dim("extractor seed", self.d, seed.len())?;
        let (n, m) = (self.n, self.m);
        match &self.family {
            Family::Toeplitz => {
                let rows = (0..m)
                    .map(|i| {
                        let mut row = BitVec::zeros(n);
                        for j in 0..n {
                            row.set(j, seed.get(i + n - 1 - j));
                        }
                        row
                    })
                    .collect();
                GF2Matrix::from_rows(n, rows)
            }
            Family::Cyclic => {
                let rows = (0..m)
                    .map(|i| {
                        let mut row = BitVec::zeros(n);
                        for j in 0..n {
                            row.set(j, seed.get((i + j) % self.d));
                        }
                        row
                    })
                    .collect();
                GF2Matrix::from_rows(n, rows)
            }
            Family::Polynomial { .. } => {
                let mut cols = Vec::with_capacity(n);
                for j in 0..n {
                    let mut e = BitVec::zeros(n);
                    e.set(j, true);
                    cols.push(self.extract(&e, seed)?);
                }
                Ok(GF2Matrix::from_rows(m, cols)?.transpose())
            }
            Family::Table { matrices, .. } => {
                let idx = if self.d == 0 { 0 } else { seed.to_u64() as usize };
                Ok(matrices[idx].clone())
            }
        }
    }

    pub fn extract(&self, x: &BitVec, seed: &BitVec) -> Result<BitVec> {
        ensure_dim("extractor source", self.n, x.len())?;
        match &self.family {
            Family::Table { .. } => self.matrix(seed)?.mul_vec(x),
            Family::Polynomial { field } => {
                ensure_dim("extractor seed", self.d, seed.len())?;
                let q = field.k();
                let sigma = seed.prefix(q).to_u64();
                let coeffs: Vec<u64> =
                    (0..self.n.div_ceil(q)).map(|i| x.slice(i * q, q.min(self.n - i * q)).to_u64()).collect();
                let mut out = BitVec::zeros(0);
                let mut c = 0u64;
                while out.len() < self.m {
                    // Horner at σ + c with no constant term
                    let point = sigma ^ (c & field.mask());
                    let mut acc = 0u64;
                    for &a in coeffs.iter().rev() {
                        acc = field.mul(acc ^ a, point);
                    }
                    let take = q.min(self.m - out.len());
                    out.extend(&BitVec::from_u64(q, acc).prefix(take));
                    c += 1;
                }
                Ok(out)
            }
            Family::Toeplitz | Family::Cyclic => {
                ensure_dim("extractor seed", self.d, seed.len())?;
                let mut out = BitVec::zeros(self.m);
                for i in 0..self.m {
                    let mut b = false;
                    for j in x.ones_iter() {
                        let k = match self.family {
                            Family::Toeplitz => i + self.n - 1 - j,
                            _ => (i + j) % self.d,
                        };
                        b ^= seed.get(k);
                    }
                    out.set(i, b);
                }
                Ok(out)
            }
        }
    }
}

/// How an extractor family is chosen for each stage shape `(n, d, m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtractorProfile {
    /// Toeplitz when the seed is exactly `n + m − 1` bits, else an error.
    Toeplitz,
    /// Cyclic hashing at every shape.
    Cyclic,
    /// Polynomial evaluation at every shape.
    Polynomial,
    /// Toeplitz when the seed is long enough, reading its prefix; cyclic
    /// otherwise.
    Adaptive,
    /// Loaded families, looked up by shape.
    Tables(Vec<LinearSeededExtractor>),
}

impl ExtractorProfile {
    pub fn instantiate(&self, n: usize, d: usize, m: usize) -> Result<LinearSeededExtractor> {
        match self {
            ExtractorProfile::Toeplitz => {
                let e = LinearSeededExtractor::toeplitz(n, m)?;
                ensure_dim("toeplitz seed", e.seed_len(), d)?;
                Ok(e)
            }
            ExtractorProfile::Cyclic => LinearSeededExtractor::cyclic(n, d, m),
            ExtractorProfile::Polynomial => LinearSeededExtractor::polynomial(n, d, m),
            ExtractorProfile::Adaptive => {
                if d == n + m - 1 {
                    LinearSeededExtractor::toeplitz(n, m)
                } else {
                    LinearSeededExtractor::cyclic(n, d, m)
                }
            }
            ExtractorProfile::Tables(list) => {
                list.iter().find(|e| e.n == n && e.d == d && e.m == m).cloned().ok_or_else(|| {
                    Error::InvalidParameter(alloc::format!("no extractor table for shape ({n}, {d}, {m})"))
                })
            }
        }
    }

    /// `LSExt(x, seed)` with `m` output bits.
    pub fn extract(&self, x: &BitVec, seed: &BitVec, m: usize) -> Result<BitVec> {
        self.instantiate(x.len(), seed.len(), m)?.extract(x, seed)
    }

    /// Largest joint degree over the shapes this profile can produce.
    pub fn joint_degree(&self) -> usize {
        match self {
            ExtractorProfile::Tables(list) => list.iter().map(|e| e.joint_degree()).max().unwrap_or(1),
            ExtractorProfile::Polynomial => 64,
            _ => 2,
        }
    }

    /// Joint degree at one shape; falls back to the shape-free bound when the
    /// shape cannot be built.
    pub fn joint_degree_at(&self, n: usize, d: usize, m: usize) -> usize {
        self.instantiate(n, d, m).map(|e| e.joint_degree()).unwrap_or_else(|_| self.joint_degree())
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExtractorProfile::Toeplitz => "toeplitz",
            ExtractorProfile::Cyclic => "cyclic",
            ExtractorProfile::Polynomial => "polynomial",
            ExtractorProfile::Adaptive => "adaptive",
            ExtractorProfile::Tables(_) => "table",
        }
    }
}

/// `LSExt(x, seed)` with the Toeplitz family; the seed must have `n + m − 1` bits.
pub fn lsext(x: &BitVec, seed: &BitVec, m: usize) -> Result<BitVec> {
    ExtractorProfile::Toeplitz.extract(x, seed, m)
}

/// Degree of a bilinear-style stage output given the degrees of its inputs:
/// each monomial has one source bit and at most `joint − 1` seed bits.
pub fn compose_degree(joint: usize, source_degree: usize, seed_degree: usize) -> usize {
    source_degree + joint.saturating_sub(1) * seed_degree
}

/// Largest popcount of an exponent in `1..=b`.
fn max_popcount(b: usize) -> usize {
    if b == 0 {
        return 0;
    }
    let len = (usize::BITS - b.leading_zeros()) as usize;
    (b.count_ones() as usize).max(len - 1)
}

/// Exact distance of `T·X` from uniform when `T·X` spans `rank` of `m` bits.
pub fn linear_image_distance(rank: usize, m: usize) -> BigRational {
    ratio((1u128 << m) - (1u128 << rank), 1u128 << m)
}

/// Exact distance of `(E(X, S), S)` from `(U_m, S)` for an affine `X`, with
/// `S` uniform over the listed seeds. Each seed contributes the distance of
/// an affine image, which depends only on its rank.
pub fn strong_distance<I>(e: &LinearSeededExtractor, x: &AffineSource, seeds: I) -> Result<BigRational>
where
    I: IntoIterator<Item = BitVec>,
{
    let mut count = 0u128;
    let mut num = 0u128;
    let m = e.out_len();
    ensure_budget("extractor output width", m as u128, 64)?;
    for seed in seeds {
        let rank = image_rank(e, x, &seed)?;
        num += (1u128 << m) - (1u128 << rank);
        count += 1;
    }
    if count == 0 {
        return Err(Error::InvalidParameter("empty seed set".into()));
    }
    Ok(ratio(num, count << m))
}

/// Dimension of the image of the linear part of `X` under `T(seed)`.
pub fn image_rank(e: &LinearSeededExtractor, x: &AffineSource, seed: &BitVec) -> Result<usize> {
    let t = e.matrix(seed)?;
    let rows: Result<Vec<BitVec>> = x.basis().rows().iter().map(|b| t.mul_vec(b)).collect();
    let rows = rows?;
    if e.out_len() <= 64 {
        Ok(rank_u64(&rows.iter().map(|r| r.to_u64()).collect::<Vec<_>>()))
    } else {
        Ok(GF2Matrix::from_rows(e.out_len(), rows)?.rank())
    }
}

/// All seeds of `d` bits, by integer value.
pub fn all_seeds(d: usize) -> impl Iterator<Item = BitVec> {
    assert!(d < 32, "seed enumeration limited to 2^31");
    (0..1u64 << d).map(move |s| BitVec::from_u64(d, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anf::anf_of;
    use crate::anf::truth_table;
    use crate::dist::{exact_distribution, stat_distance, ExactDist};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_source_gives_zero() {
        let e = LinearSeededExtractor::toeplitz(6, 3).unwrap();
        for s in all_seeds(8) {
            assert!(e.extract(&BitVec::zeros(6), &s).unwrap().is_zero());
        }
    }

    #[test]
    fn fast_path_matches_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for e in [
            LinearSeededExtractor::toeplitz(13, 5).unwrap(),
            LinearSeededExtractor::cyclic(13, 4, 7).unwrap(),
            LinearSeededExtractor::polynomial(13, 4, 7).unwrap(),
            LinearSeededExtractor::polynomial(13, 5, 3).unwrap(),
        ] {
            for _ in 0..40 {
                let x = BitVec::from_u64(13, rng.gen::<u64>() & 0x1fff);
                let s = BitVec::from_u64(e.seed_len(), rng.gen::<u64>() & ((1 << e.seed_len()) - 1));
                assert_eq!(e.extract(&x, &s).unwrap(), e.matrix(&s).unwrap().mul_vec(&x).unwrap());
            }
        }
    }

    #[test]
    fn toeplitz_is_constant_on_diagonals() {
        let s = BitVec::from_bitstr("1011001");
        let t = LinearSeededExtractor::toeplitz(4, 4).unwrap().matrix(&s).unwrap();
        for i in 1..4 {
            for j in 1..4 {
                assert_eq!(t.get(i, j), t.get(i - 1, j - 1));
            }
        }
        assert!(lsext(&BitVec::zeros(4), &BitVec::zeros(6), 4).is_err());
    }

    #[test]
    fn joint_degree_is_two() {
        // n = 4, m = 2, seed 5 bits: 9 joint variables, source in the low bits
        let e = LinearSeededExtractor::toeplitz(4, 2).unwrap();
        for bit in 0..2 {
            let tt = truth_table(9, |v| {
                let x = BitVec::from_u64(4, v & 0xf);
                let s = BitVec::from_u64(5, v >> 4);
                e.extract(&x, &s).unwrap().get(bit)
            });
            assert_eq!(anf_of(&tt).unwrap().degree(), 2);
        }
    }

    #[test]
    fn table_family_degree() {
        // seed selects between identity and zero: entries are s or 0
        let id = GF2Matrix::identity(3);
        let z = GF2Matrix::zero(3, 3);
        let e = LinearSeededExtractor::from_table(alloc::vec![z, id]).unwrap();
        assert_eq!(e.joint_degree(), 2);
        assert_eq!(e.seed_len(), 1);
        let x = BitVec::from_bitstr("101");
        assert_eq!(e.extract(&x, &BitVec::from_bitstr("1")).unwrap(), x);
    }

    #[test]
    fn rank_shortcut_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let e = LinearSeededExtractor::toeplitz(6, 2).unwrap();
        for _ in 0..10 {
            let x = AffineSource::random(6, 3, &mut rng);
            let fast = strong_distance(&e, &x, all_seeds(7)).unwrap();
            let mut total = BigRational::from_integer(0.into());
            for s in all_seeds(7) {
                let d = exact_distribution(&x, 2, 1 << 10, |p| e.extract(p, &s).unwrap().to_u64()).unwrap();
                total += stat_distance(&d, &ExactDist::uniform(2)).unwrap();
            }
            assert_eq!(fast, total / BigRational::from_integer(128.into()));
        }
    }

    #[test]
    fn composition_rule() {
        assert_eq!(compose_degree(2, 1, 1), 2);
        assert_eq!(compose_degree(4, 1, 1), 4);
        assert_eq!(compose_degree(2, 1, 3), 4);
    }

    #[test]
    fn polynomial_degree_matches_anf() {
        // n = 6 in GF(8): two coefficients, exponents 1 and 2, seed degree 1
        let e = LinearSeededExtractor::polynomial(6, 3, 3).unwrap();
        assert_eq!(e.joint_degree(), 2);
        // n = 9: exponents up to 3, seed degree 2
        let e = LinearSeededExtractor::polynomial(9, 3, 3).unwrap();
        assert_eq!(e.joint_degree(), 3);
        let mut worst = 0;
        for bit in 0..3 {
            let tt = truth_table(12, |v| {
                let x = BitVec::from_u64(9, v & 0x1ff);
                let s = BitVec::from_u64(3, v >> 9);
                e.extract(&x, &s).unwrap().get(bit)
            });
            worst = worst.max(anf_of(&tt).unwrap().degree());
        }
        assert!((2..=3).contains(&worst));
    }

    #[test]
    fn polynomial_is_not_periodic() {
        let e = LinearSeededExtractor::polynomial(32, 6, 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let x = BitVec::from_u64(32, rng.gen::<u64>() & 0xffff_ffff);
        let o = e.extract(&x, &BitVec::from_u64(6, 0b101101)).unwrap();
        assert_ne!(o.slice(0, 6), o.slice(6, 6));
        assert_eq!(max_popcount(7), 3);
        assert_eq!(max_popcount(8), 3);
        assert_eq!(max_popcount(1), 1);
    }
}
