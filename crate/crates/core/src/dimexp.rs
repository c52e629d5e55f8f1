//! Dimension expanders: families of linear maps `T_1..T_d` on F₂ⁿ such that
//! `dim(Σ T_i V) ≥ (1 + α) dim V` for every subspace `V` of dimension at most
//! `n/2`.
//!
//! Families come from seeded random search. Small `n` is certified by walking
//! every subspace; larger `n` by sampling uniform random subspaces.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{ensure_budget, ensure_dim, Error, Result};
use crate::matrix::{mul_vec_u64, EchelonU64, GF2Matrix};
use crate::subspace::{for_each_in_pattern_ordered, gaussian_binomial_sum, pivot_patterns, random_subspace};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Certificate {
    None,
    /// Every subspace of dimension `1..=n/2` was checked.
    Exhaustive {
        n: usize,
    },
    /// `trials` uniform random subspaces per dimension were checked.
    Sampled {
        trials: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimExpander {
    pub n: usize,
    pub maps: Vec<GF2Matrix>,
    pub alpha: BigRational,
    pub certificate: Certificate,
    /// The seed and attempt index that produced the family, when searched.
    pub seed: Option<(u64, u64)>,
}

impl DimExpander {
    pub fn degree(&self) -> usize {
        self.maps.len()
    }
}

/// Expansion of one subspace: `dim V` and `dim Σ T_i V`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub dim: usize,
    pub image_dim: usize,
}

impl Expansion {
    /// Compares `image_dim/dim` as rationals.
    pub fn cmp_ratio(&self, other: &Expansion) -> Ordering {
        (self.image_dim * other.dim).cmp(&(other.image_dim * self.dim))
    }

    pub fn alpha(&self) -> BigRational {
        BigRational::new(BigInt::from(self.image_dim as i64 - self.dim as i64), BigInt::from(self.dim as u64))
    }
}

/// Lowest expansion found and the subspace attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionWitness {
    pub expansion: Expansion,
    pub subspace: GF2Matrix,
}

/// Outcome of checking the expansion inequality against a target `alpha`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpanderCheck {
    pub holds: bool,
    /// First violating subspace in enumeration order.
    pub violation: Option<ExpansionWitness>,
    pub subspaces_checked: u128,
}

fn packed(maps: &[GF2Matrix], n: usize) -> Result<Vec<Vec<u64>>> {
    if n > 64 {
        return Err(Error::InvalidParameter("packed expander maps need n ≤ 64".into()));
    }
    maps.iter()
        .map(|m| {
            ensure_dim("expander map rows", n, m.n_rows())?;
            ensure_dim("expander map cols", n, m.n_cols())?;
            Ok(m.to_u64_rows())
        })
        .collect()
}

/// `dim Σ_i T_i V` for `V` spanned by packed rows.
pub fn image_dim_packed(maps: &[Vec<u64>], basis: &[u64]) -> usize {
    let mut e = EchelonU64::new();
    for t in maps {
        for &b in basis {
            e.insert(mul_vec_u64(t, b));
        }
    }
    e.rank()
}

/// Same as [`image_dim_packed`] for matrices.
pub fn image_dim(maps: &[GF2Matrix], v: &GF2Matrix) -> Result<usize> {
    let mut gens = GF2Matrix::empty(v.n_cols());
    for t in maps {
        for b in v.rows() {
            gens.push_row(t.mul_vec(b)?)?;
        }
    }
    Ok(gens.rank())
}

/// Subspaces checked by the exhaustive certifier at dimension `n`.
pub fn exhaustive_count(n: usize) -> u128 {
    gaussian_binomial_sum(n, 1, n / 2)
}

/// Minimum expansion over all subspaces with the given pivot pattern, in
/// canonical order (first minimum wins).
pub fn min_over_pattern(maps: &[Vec<u64>], n: usize, pattern: &[usize]) -> Option<(Expansion, Vec<u64>)> {
    let mut best: Option<(Expansion, Vec<u64>)> = None;
    let dim = pattern.len();
    for_each_in_pattern_ordered(n, pattern, |rows| {
        let e = Expansion { dim, image_dim: image_dim_packed(maps, rows) };
        if best.as_ref().is_none_or(|(b, _)| e.cmp_ratio(b) == Ordering::Less) {
            best = Some((e, rows.to_vec()));
        }
    });
    best
}

/// Exact minimum of `dim(Σ T_i V)/dim V` over every `V` with
/// `1 ≤ dim V ≤ n/2`, with the first minimizing subspace.
pub fn min_expansion(maps: &[GF2Matrix], n: usize, budget: u128) -> Result<ExpansionWitness> {
    let packed = packed(maps, n)?;
    ensure_budget("expander certification", exhaustive_count(n), budget)?;
    if n < 2 {
        return Err(Error::InvalidParameter("expanders need n ≥ 2".into()));
    }
    let mut best: Option<(Expansion, Vec<u64>)> = None;
    for dim in 1..=n / 2 {
        for pattern in pivot_patterns(n, dim) {
            if let Some((e, rows)) = min_over_pattern(&packed, n, &pattern) {
                if best.as_ref().is_none_or(|(b, _)| e.cmp_ratio(b) == Ordering::Less) {
                    best = Some((e, rows));
                }
            }
        }
    }
    let (expansion, rows) = best.expect("n ≥ 2 has a 1-dimensional subspace");
    Ok(ExpansionWitness { expansion, subspace: GF2Matrix::from_u64_rows(n, &rows) })
}

/// Checks `dim(Σ T_i V) ≥ (1+alpha) dim V` on every `V` with `dim V ≤ n/2`.
pub fn verify_dimension_expander(
    maps: &[GF2Matrix],
    alpha: &BigRational,
    n: usize,
    budget: u128,
) -> Result<ExpanderCheck> {
    let packed = packed(maps, n)?;
    ensure_budget("expander certification", exhaustive_count(n), budget)?;
    let mut checked = 0u128;
    for dim in 1..=n / 2 {
        // image_dim ≥ (1+α)·dim  ⇔  image_dim·den ≥ (num+den)·dim
        let need = (alpha + BigRational::from_integer(1.into())) * BigInt::from(dim as u64);
        for pattern in pivot_patterns(n, dim) {
            let mut violation = None;
            for_each_in_pattern_ordered(n, &pattern, |rows| {
                if violation.is_some() {
                    return;
                }
                checked += 1;
                let image = image_dim_packed(&packed, rows);
                if BigRational::from_integer(BigInt::from(image as u64)) < need {
                    violation = Some(ExpansionWitness {
                        expansion: Expansion { dim, image_dim: image },
                        subspace: GF2Matrix::from_u64_rows(n, rows),
                    });
                }
            });
            if violation.is_some() {
                return Ok(ExpanderCheck { holds: false, violation, subspaces_checked: checked });
            }
        }
    }
    Ok(ExpanderCheck { holds: true, violation: None, subspaces_checked: checked })
}

/// Minimum expansion over `trials` random subspaces per dimension.
pub fn sampled_min_expansion(maps: &[GF2Matrix], n: usize, trials: u64, seed: u64) -> Result<ExpansionWitness> {
    if n < 2 {
        return Err(Error::InvalidParameter("expanders need n ≥ 2".into()));
    }
    for m in maps {
        ensure_dim("expander map rows", n, m.n_rows())?;
        ensure_dim("expander map cols", n, m.n_cols())?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<ExpansionWitness> = None;
    for dim in 1..=n / 2 {
        for _ in 0..trials {
            let v = random_subspace(n, dim, &mut rng);
            let e = Expansion { dim, image_dim: image_dim(maps, &v)? };
            if best.as_ref().is_none_or(|b| e.cmp_ratio(&b.expansion) == Ordering::Less) {
                best = Some(ExpansionWitness { expansion: e, subspace: v });
            }
        }
    }
    best.ok_or(Error::InvalidParameter("sampled certification needs trials ≥ 1".into()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certification {
    Exhaustive { budget: u128 },
    Sampled { trials: u64 },
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub n: usize,
    pub d: usize,
    pub target_alpha: BigRational,
    pub seed: u64,
    pub max_tries: u64,
    /// Maps forced at the front of every candidate family.
    pub fixed: Vec<GF2Matrix>,
    pub certification: Certification,
}

impl SearchConfig {
    pub fn new(n: usize, d: usize, target_alpha: BigRational, seed: u64) -> Self {
        SearchConfig {
            n,
            d,
            target_alpha,
            seed,
            max_tries: 1000,
            fixed: Vec::new(),
            certification: Certification::Exhaustive { budget: 1 << 32 },
        }
    }
}

/// Candidate family number `attempt` for a seed. Each attempt has its own
/// stream, so attempts can be evaluated independently and in any order.
pub fn candidate_family(cfg: &SearchConfig, attempt: u64) -> Vec<GF2Matrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(attempt);
    let mut maps = cfg.fixed.clone();
    while maps.len() < cfg.d {
        maps.push(GF2Matrix::random_invertible(cfg.n, &mut rng));
    }
    maps
}

/// Certifies one family under the configured mode.
pub fn certify(cfg: &SearchConfig, maps: Vec<GF2Matrix>) -> Result<DimExpander> {
    let (witness, certificate) = match cfg.certification {
        Certification::Exhaustive { budget } => {
            (min_expansion(&maps, cfg.n, budget)?, Certificate::Exhaustive { n: cfg.n })
        }
        Certification::Sampled { trials } => {
            (sampled_min_expansion(&maps, cfg.n, trials, cfg.seed ^ 0x5eed)?, Certificate::Sampled { trials })
        }
    };
    Ok(DimExpander { n: cfg.n, maps, alpha: witness.expansion.alpha(), certificate, seed: None })
}

/// Tries candidate families in attempt order until one certifies at the target.
pub fn search_dimension_expander(cfg: &SearchConfig) -> Result<DimExpander> {
    if cfg.fixed.len() > cfg.d {
        return Err(Error::InvalidParameter("more fixed maps than the degree".into()));
    }
    for attempt in 0..cfg.max_tries {
        let mut e = certify(cfg, candidate_family(cfg, attempt))?;
        if e.alpha >= cfg.target_alpha {
            e.seed = Some((cfg.seed, attempt));
            return Ok(e);
        }
    }
    Err(Error::SearchExhausted { tries: cfg.max_tries })
}

/// Conjugates every map by `s`: `T_i ↦ S T_i S⁻¹`.
pub fn conjugate(maps: &[GF2Matrix], s: &GF2Matrix) -> Result<Vec<GF2Matrix>> {
    let inv = s.inverse().ok_or(Error::RankDeficient { expected: s.n_rows(), found: s.rank() })?;
    maps.iter().map(|t| s.mul(t)?.mul(&inv)).collect()
}
