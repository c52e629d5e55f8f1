//! Linear somewhere condensers built from dimension expanders.
//!
//! One basic step splits `x = x₁ ∘ x₂` into halves and outputs the rows
//! `x₁, x₂, x₁+T₁x₂, x₂+T₁x₁, …, x₁+T_dx₂, x₂+T_dx₁`; the general-source
//! variant appends `x₁+x₂`. Iterating a step on every row gives the full
//! condensers, with the children of a row kept contiguous (depth-first order).
//! Every row is stored as an explicit matrix acting on the original input.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bits::BitVec;
use crate::dimexp::{Certificate, DimExpander};
use crate::dist::{ratio, ExactDist};
use crate::error::{ensure_budget, ensure_dim, Error, Result};
use crate::matrix::{rank_u64, GF2Matrix};
use crate::subspace::{for_each_in_pattern, gaussian_binomial, pivot_patterns, random_subspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CondenserKind {
    BasicAffine,
    IteratedAffine,
    BasicGeneral,
    IteratedGeneral,
}

impl CondenserKind {
    pub fn is_general(self) -> bool {
        matches!(self, CondenserKind::BasicGeneral | CondenserKind::IteratedGeneral)
    }

    pub fn rows_per_step(self, d: usize) -> usize {
        if self.is_general() {
            2 * d + 3
        } else {
            2 * d + 2
        }
    }
}

/// Summary of the expander used at one step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepProvenance {
    pub dim: usize,
    pub degree: usize,
    pub alpha: BigRational,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SomewhereCondenser {
    pub n_in: usize,
    pub m_out: usize,
    pub kind: CondenserKind,
    pub row_maps: Vec<GF2Matrix>,
    pub steps: Vec<StepProvenance>,
}

impl SomewhereCondenser {
    /// The trivial condenser: one row, the input itself.
    pub fn identity(n: usize) -> Self {
        SomewhereCondenser {
            n_in: n,
            m_out: n,
            kind: CondenserKind::IteratedAffine,
            row_maps: vec![GF2Matrix::identity(n)],
            steps: Vec::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.row_maps.len()
    }

    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    /// Applies one basic step to every row. `general` appends the `x₁+x₂` row.
    pub fn then_basic(&self, expander: &DimExpander, general: bool) -> Result<Self> {
        if !self.m_out.is_multiple_of(2) {
            return Err(Error::InvalidParameter(alloc::format!(
                "row width {} is odd and cannot be halved",
                self.m_out
            )));
        }
        let half = self.m_out / 2;
        ensure_dim("expander dimension", half, expander.n)?;
        let mut rows = Vec::with_capacity(self.rows() * (2 * expander.degree() + 3));
        for r in &self.row_maps {
            let top = GF2Matrix::from_rows(self.n_in, r.rows()[..half].to_vec())?;
            let bottom = GF2Matrix::from_rows(self.n_in, r.rows()[half..].to_vec())?;
            rows.push(top.clone());
            rows.push(bottom.clone());
            for t in &expander.maps {
                rows.push(add(&top, &t.mul(&bottom)?));
                rows.push(add(&bottom, &t.mul(&top)?));
            }
            if general {
                rows.push(add(&top, &bottom));
            }
        }
        let mut steps = self.steps.clone();
        steps.push(StepProvenance {
            dim: half,
            degree: expander.degree(),
            alpha: expander.alpha.clone(),
            certificate: expander.certificate.clone(),
        });
        let kind = match (general, steps.len()) {
            (false, 1) => CondenserKind::BasicAffine,
            (true, 1) => CondenserKind::BasicGeneral,
            (false, _) => CondenserKind::IteratedAffine,
            (true, _) => CondenserKind::IteratedGeneral,
        };
        Ok(SomewhereCondenser { n_in: self.n_in, m_out: half, kind, row_maps: rows, steps })
    }

    /// Evaluates every row on `x`.
    pub fn apply(&self, x: &BitVec) -> Result<Vec<BitVec>> {
        ensure_dim("condenser input", self.n_in, x.len())?;
        self.row_maps.iter().map(|m| m.mul_vec(x)).collect()
    }

    /// Rows packed as integers for `n_in, m_out ≤ 64`: `packed[row][out_bit]`.
    pub fn packed_rows(&self) -> Result<Vec<Vec<u64>>> {
        if self.n_in > 64 || self.m_out > 64 {
            return Err(Error::InvalidParameter("packed condenser needs widths ≤ 64".into()));
        }
        Ok(self.row_maps.iter().map(|m| m.to_u64_rows()).collect())
    }
}

fn add(a: &GF2Matrix, b: &GF2Matrix) -> GF2Matrix {
    let rows = a.rows().iter().zip(b.rows()).map(|(x, y)| x ^ y).collect();
    GF2Matrix::from_rows(a.n_cols(), rows).expect("same shape")
}

/// One step of the affine condenser.
pub fn basic_cond(expander: &DimExpander, n: usize) -> Result<SomewhereCondenser> {
    SomewhereCondenser::identity(n).then_basic(expander, false)
}

/// One step of the general-source condenser.
pub fn basic_gcond(expander: &DimExpander, n: usize) -> Result<SomewhereCondenser> {
    SomewhereCondenser::identity(n).then_basic(expander, true)
}

fn iterate(family: &[DimExpander], n: usize, h: usize, general: bool) -> Result<SomewhereCondenser> {
    if !n.is_multiple_of(1usize << h) {
        return Err(Error::InvalidParameter(alloc::format!("n = {n} is not divisible by 2^{h}")));
    }
    let mut c = SomewhereCondenser::identity(n);
    for step in 0..h {
        let dim = c.m_out / 2;
        let e = family
            .iter()
            .find(|e| e.n == dim)
            .ok_or_else(|| Error::InvalidParameter(alloc::format!("no expander of dimension {dim} for step {step}")))?;
        c = c.then_basic(e, general)?;
    }
    Ok(c)
}

/// `h` affine steps; `family` must hold an expander for each halved width.
pub fn scond(family: &[DimExpander], n: usize, h: usize) -> Result<SomewhereCondenser> {
    iterate(family, n, h, false)
}

/// `h` general-source steps.
pub fn sgcond(family: &[DimExpander], n: usize, h: usize) -> Result<SomewhereCondenser> {
    iterate(family, n, h, true)
}

/// Smallest `h'` with `δ(1+α/(4d))^{h'} ≥ 1/2`, plus the one final step that
/// lifts a rate-½ row above ½.
pub fn choose_depth(delta: &BigRational, alpha: &BigRational, d: usize) -> Result<usize> {
    if *alpha <= BigRational::zero() {
        return Err(Error::InvalidParameter("certified alpha must be positive".into()));
    }
    if *delta <= BigRational::zero() {
        return Err(Error::InvalidParameter("entropy rate must be positive".into()));
    }
    let gain = BigRational::one() + alpha / BigRational::from_integer(BigInt::from(4 * d as u64));
    let half = ratio(1, 2);
    let mut rate = delta.clone();
    let mut h = 0;
    while rate < half {
        rate *= &gain;
        h += 1;
        if h > 4096 {
            return Err(Error::InvalidParameter("depth search did not terminate".into()));
        }
    }
    Ok(h + 1)
}

/// Recursive evaluation straight from the step definition, independent of
/// the stored row maps.
pub fn eval_recursive(x: &BitVec, steps: &[&DimExpander], general: bool) -> Result<Vec<BitVec>> {
    let Some((e, rest)) = steps.split_first() else {
        return Ok(vec![x.clone()]);
    };
    let half = x.len() / 2;
    ensure_dim("expander dimension", half, e.n)?;
    let x1 = x.slice(0, half);
    let x2 = x.slice(half, half);
    let mut step_rows = vec![x1.clone(), x2.clone()];
    for t in &e.maps {
        step_rows.push(&x1 ^ &t.mul_vec(&x2)?);
        step_rows.push(&x2 ^ &t.mul_vec(&x1)?);
    }
    if general {
        step_rows.push(&x1 ^ &x2);
    }
    let mut out = Vec::new();
    for r in &step_rows {
        out.extend(eval_recursive(r, rest, general)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive { budget: u128 },
    Sampled { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineCondenserReport {
    pub k: usize,
    pub m_out: usize,
    pub rows: usize,
    /// `⌈γ·m_out⌉`.
    pub threshold: usize,
    /// Minimum over sources of the best row's rank.
    pub min_best_rank: usize,
    /// Subspaces whose best row fell below the threshold.
    pub failures: u128,
    pub subspaces_checked: u128,
    /// First subspace (in enumeration order) attaining `min_best_rank`.
    pub witness: GF2Matrix,
    pub witness_best_row: usize,
    pub exhaustive: bool,
}

impl AffineCondenserReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// `⌈γ·m⌉` for a rational `γ`.
pub fn ceil_times(gamma: &BigRational, m: usize) -> usize {
    let v = gamma * BigRational::from_integer(BigInt::from(m as u64));
    let (q, r) = v.numer().div_rem(v.denom());
    let q: usize = q.try_into().unwrap_or(0);
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

/// Best row of the condenser on the subspace spanned by `basis` (packed).
/// Returns `(rank, row index)`, the lowest index on ties.
pub fn best_row_packed(rows: &[Vec<u64>], basis: &[u64]) -> (usize, usize) {
    let mut best = (0usize, 0usize);
    let mut images = vec![0u64; basis.len()];
    for (ri, r) in rows.iter().enumerate() {
        for (img, &b) in images.iter_mut().zip(basis) {
            *img = crate::matrix::mul_vec_u64(r, b);
        }
        let rank = rank_u64(&images);
        if rank > best.0 {
            best = (rank, ri);
            if rank == basis.len().min(r.len()) {
                break;
            }
        }
    }
    best
}

/// Partial result over a slice of the subspace stream; merged in order.
#[derive(Clone, Debug)]
pub struct CondenserTally {
    pub min_best: Option<(usize, usize, Vec<u64>)>,
    pub failures: u128,
    pub checked: u128,
}

impl CondenserTally {
    pub fn new() -> Self {
        CondenserTally { min_best: None, failures: 0, checked: 0 }
    }

    pub fn record(&mut self, rank: usize, row: usize, basis: &[u64], threshold: usize) {
        self.checked += 1;
        if rank < threshold {
            self.failures += 1;
        }
        if self.min_best.as_ref().is_none_or(|(r, _, _)| rank < *r) {
            self.min_best = Some((rank, row, basis.to_vec()));
        }
    }

    /// Merges a tally of a later slice of the stream.
    pub fn merge(mut self, later: CondenserTally) -> Self {
        self.failures += later.failures;
        self.checked += later.checked;
        if let Some(l) = later.min_best {
            if self.min_best.as_ref().is_none_or(|(r, _, _)| l.0.cmp(r) == Ordering::Less) {
                self.min_best = Some(l);
            }
        }
        self
    }
}

impl Default for CondenserTally {
    fn default() -> Self {
        Self::new()
    }
}

/// Tally of one pivot pattern (the unit of parallel work).
pub fn tally_pattern(rows: &[Vec<u64>], n: usize, pattern: &[usize], threshold: usize) -> CondenserTally {
    let mut t = CondenserTally::new();
    for_each_in_pattern(n, pattern, |basis| {
        let (rank, row) = best_row_packed(rows, basis);
        t.record(rank, row, basis, threshold);
    });
    t
}

pub fn finish_report(
    c: &SomewhereCondenser,
    k: usize,
    threshold: usize,
    tally: CondenserTally,
    exhaustive: bool,
) -> Result<AffineCondenserReport> {
    let (min_best_rank, witness_best_row, rows) =
        tally.min_best.ok_or(Error::InvalidParameter("no subspaces checked".into()))?;
    Ok(AffineCondenserReport {
        k,
        m_out: c.m_out,
        rows: c.rows(),
        threshold,
        min_best_rank,
        failures: tally.failures,
        subspaces_checked: tally.checked,
        witness: GF2Matrix::from_u64_rows(c.n_in, &rows),
        witness_best_row,
        exhaustive,
    })
}

/// Checks that every `k`-dimensional linear source has a row of rank at
/// least `⌈γ·m_out⌉`. Shifts do not affect ranks, so linear sources suffice.
pub fn verify_affine_condenser(
    c: &SomewhereCondenser,
    k: usize,
    gamma_target: &BigRational,
    mode: &VerifyMode,
) -> Result<AffineCondenserReport> {
    let threshold = ceil_times(gamma_target, c.m_out);
    let n = c.n_in;
    match mode {
        VerifyMode::Exhaustive { budget } => {
            let rows = c.packed_rows()?;
            ensure_budget("condenser verification", gaussian_binomial(n, k), *budget)?;
            let mut tally = CondenserTally::new();
            for pattern in pivot_patterns(n, k) {
                tally = tally.merge(tally_pattern(&rows, n, &pattern, threshold));
            }
            finish_report(c, k, threshold, tally, true)
        }
        VerifyMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut best: Option<(usize, usize, GF2Matrix)> = None;
            let mut failures = 0u128;
            for _ in 0..*samples {
                let v = random_subspace(n, k, &mut rng);
                let (rank, row) = best_row_matrix(c, &v)?;
                if rank < threshold {
                    failures += 1;
                }
                if best.as_ref().is_none_or(|(r, _, _)| rank < *r) {
                    best = Some((rank, row, v));
                }
            }
            let (min_best_rank, witness_best_row, witness) =
                best.ok_or(Error::InvalidParameter("sampled mode needs samples ≥ 1".into()))?;
            Ok(AffineCondenserReport {
                k,
                m_out: c.m_out,
                rows: c.rows(),
                threshold,
                min_best_rank,
                failures,
                subspaces_checked: *samples as u128,
                witness,
                witness_best_row,
                exhaustive: false,
            })
        }
    }
}

/// Best row on a subspace given as a matrix, for any width.
pub fn best_row_matrix(c: &SomewhereCondenser, v: &GF2Matrix) -> Result<(usize, usize)> {
    let mut best = (0, 0);
    for (ri, r) in c.row_maps.iter().enumerate() {
        let rank = r.mul(&v.transpose())?.rank();
        if rank > best.0 {
            best = (rank, ri);
        }
    }
    Ok(best)
}

/// Per-row measurements of a flat source pushed through a condenser.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowMeasure {
    /// Largest `j` whose clip distance to min-entropy `j` is at most `1/√L`.
    pub smooth_entropy: usize,
    /// Clip distance at `smooth_entropy`.
    pub distance: BigRational,
    pub collision_probability: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralCondenserReport {
    pub rows: Vec<RowMeasure>,
    pub best_row: usize,
    pub smooth_entropy: usize,
    pub distance: BigRational,
    /// Whether the best row's collision probability is at most `1/(K·L)`.
    pub collision_premise: bool,
    pub notes: String,
}

/// Pushes the uniform distribution on `flat_support` through every row and
/// measures smooth min-entropy with tolerance `1/√l`; `k` is the
/// collision-probability target `1/(k·l)` reported for the best row.
pub fn verify_general_condenser(
    c: &SomewhereCondenser,
    flat_support: &[BitVec],
    k: u64,
    l: u64,
    budget: u128,
) -> Result<GeneralCondenserReport> {
    if flat_support.is_empty() {
        return Err(Error::InvalidParameter("flat source with empty support".into()));
    }
    if c.m_out > 63 {
        return Err(Error::InvalidParameter("row width must be below 64 bits".into()));
    }
    ensure_budget("general condenser verification", flat_support.len() as u128 * c.rows() as u128, budget)?;
    let tol_sq = ratio(1, l as u128);
    let mut rows = Vec::with_capacity(c.rows());
    for r in &c.row_maps {
        let outcomes: Result<Vec<u64>> = flat_support.iter().map(|x| Ok(r.mul_vec(x)?.to_u64())).collect();
        let d = ExactDist::from_outcomes(c.m_out, outcomes?);
        let mut best_j = 0;
        let mut best_dist = d.clip_distance(1)?;
        for j in 1..=c.m_out {
            let dist = d.clip_distance(1u64 << j)?;
            if &dist * &dist <= tol_sq {
                best_j = j;
                best_dist = dist;
            } else {
                break;
            }
        }
        rows.push(RowMeasure {
            smooth_entropy: best_j,
            distance: best_dist,
            collision_probability: d.collision_probability(),
        });
    }
    let mut best_row = 0;
    for (i, r) in rows.iter().enumerate() {
        let b = &rows[best_row];
        if r.smooth_entropy > b.smooth_entropy || (r.smooth_entropy == b.smooth_entropy && r.distance < b.distance) {
            best_row = i;
        }
    }
    let best = rows[best_row].clone();
    let premise = best.collision_probability <= ratio(1, k as u128 * l as u128);
    Ok(GeneralCondenserReport {
        best_row,
        smooth_entropy: best.smooth_entropy,
        distance: best.distance,
        collision_premise: premise,
        rows,
        notes: String::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimexp::{search_dimension_expander, SearchConfig};

    fn identity_expander(n: usize, d: usize) -> DimExpander {
        DimExpander {
            n,
            maps: vec![GF2Matrix::identity(n); d],
            alpha: BigRational::zero(),
            certificate: Certificate::None,
            seed: None,
        }
    }

    #[test]
    fn basic_with_identity_maps() {
        let c = basic_cond(&identity_expander(4, 3), 8).unwrap();
        assert_eq!((c.rows(), c.m_out), (8, 4));
        let x = BitVec::from_bitstr("1010 0110");
        let rows: Vec<String> = c.apply(&x).unwrap().iter().map(|r| alloc::format!("{r}")).collect();
        assert_eq!(rows, ["1010", "0110", "1100", "1100", "1100", "1100", "1100", "1100"]);
        assert!(c.apply(&BitVec::zeros(8)).unwrap().iter().all(|r| r.is_zero()));
    }

    #[test]
    fn general_adds_sum_row() {
        let e = search_dimension_expander(&SearchConfig::new(4, 3, ratio(1, 8), 2)).unwrap();
        let g = basic_gcond(&e, 8).unwrap();
        assert_eq!((g.rows(), g.m_out), (9, 4));
        let x = BitVec::from_bitstr("1101 0011");
        let r = g.apply(&x).unwrap();
        assert_eq!(r[8], &r[0] ^ &r[1]);
    }

    #[test]
    fn depth_zero_is_identity() {
        let c = scond(&[], 16, 0).unwrap();
        assert_eq!(c.rows(), 1);
        assert_eq!(c.row_maps[0], GF2Matrix::identity(16));
        assert!(scond(&[], 12, 3).is_err());
    }

    #[test]
    fn depth_choice() {
        // rate 1/2 is already reached, so only the lifting step remains
        assert_eq!(choose_depth(&ratio(1, 2), &ratio(1, 2), 3).unwrap(), 1);
        // (1 + 1/24)^h' ≥ 2 first holds at h' = 17
        assert_eq!(choose_depth(&ratio(1, 4), &ratio(1, 6), 1).unwrap(), 18);
        assert!(choose_depth(&ratio(1, 4), &BigRational::zero(), 3).is_err());
    }

    #[test]
    fn ceil_rounding() {
        assert_eq!(ceil_times(&ratio(1, 2), 4), 2);
        assert_eq!(ceil_times(&ratio(13, 24), 4), 3);
    }
}
