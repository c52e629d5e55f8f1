//! Exact finite distributions over `m`-bit outcomes.
//!
//! A distribution is an integer weight per outcome plus the total weight, so
//! every probability is an exact rational. Sources pushed through functions
//! give power-of-two totals.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

use crate::affine::AffineSource;
use crate::bits::BitVec;
use crate::error::{ensure_budget, ensure_dim, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactDist {
    bits: usize,
    weights: BTreeMap<u64, u64>,
    total: u64,
}

pub fn ratio(num: u128, den: u128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl ExactDist {
    /// Builds a distribution from outcome weights; zero weights are dropped.
    pub fn from_weights(bits: usize, weights: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        if bits > 64 {
            return Err(Error::InvalidParameter(alloc::format!("outcome width {bits} exceeds 64 bits")));
        }
        let mut table = BTreeMap::new();
        let mut total = 0u64;
        for (o, w) in weights {
            if bits < 64 && o >> bits != 0 {
                return Err(Error::InvalidParameter(alloc::format!("outcome {o:#x} wider than {bits} bits")));
            }
            if w > 0 {
                *table.entry(o).or_insert(0) += w;
                total += w;
            }
        }
        if total == 0 {
            return Err(Error::InvalidParameter("distribution with zero total weight".into()));
        }
        Ok(ExactDist { bits, weights: table, total })
    }

    /// Each listed outcome carries weight one.
    pub fn from_outcomes(bits: usize, outcomes: impl IntoIterator<Item = u64>) -> Self {
        ExactDist::from_weights(bits, outcomes.into_iter().map(|o| (o, 1))).expect("nonempty outcome list within width")
    }

    pub fn point(bits: usize, outcome: u64) -> Self {
        ExactDist::from_outcomes(bits, [outcome])
    }

    pub fn uniform(bits: usize) -> Self {
        assert!(bits < 40, "uniform table limited to 2^39 outcomes");
        ExactDist::from_outcomes(bits, 0..1u64 << bits)
    }

    #[inline]
    pub fn bits(&self) -> usize {
        self.bits
    }

    #[inline]
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn weights(&self) -> &BTreeMap<u64, u64> {
        &self.weights
    }

    pub fn weight(&self, outcome: u64) -> u64 {
        self.weights.get(&outcome).copied().unwrap_or(0)
    }

    pub fn prob(&self, outcome: u64) -> BigRational {
        ratio(self.weight(outcome) as u128, self.total as u128)
    }

    /// Reduced probabilities of the support, by outcome.
    pub fn probabilities(&self) -> Vec<(u64, BigRational)> {
        self.weights.iter().map(|(&o, &w)| (o, ratio(w as u128, self.total as u128))).collect()
    }

    pub fn support_size(&self) -> usize {
        self.weights.len()
    }

    /// Push-forward through `f`, which must produce `bits_out`-bit outcomes.
    pub fn map(&self, bits_out: usize, f: impl Fn(u64) -> u64) -> ExactDist {
        let mut out = BTreeMap::new();
        for (&o, &w) in &self.weights {
            *out.entry(f(o)).or_insert(0u64) += w;
        }
        ExactDist { bits: bits_out, weights: out, total: self.total }
    }

    /// `Σ p(s)²`.
    pub fn collision_probability(&self) -> BigRational {
        let num: BigUint = self.weights.values().map(|&w| BigUint::from(w) * BigUint::from(w)).sum();
        let den = BigUint::from(self.total) * BigUint::from(self.total);
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    /// Largest outcome probability.
    pub fn max_prob(&self) -> BigRational {
        ratio(self.weights.values().copied().max().unwrap_or(0) as u128, self.total as u128)
    }

    /// Distance to the nearest distribution with every probability at most
    /// `1/k`, i.e. `Σ max(0, p(s) − 1/k)`. Requires `k ≤ 2^bits`.
    pub fn clip_distance(&self, k: u64) -> Result<BigRational> {
        if k == 0 || (self.bits < 64 && k > 1u64 << self.bits) {
            return Err(Error::InvalidParameter(alloc::format!("min-entropy target {k} outside 1..=2^{}", self.bits)));
        }
        // Σ max(0, w/T − 1/k) = Σ max(0, w·k − T) / (T·k)
        let t = self.total as u128;
        let kk = k as u128;
        let num: u128 = self.weights.values().map(|&w| (w as u128 * kk).saturating_sub(t)).sum();
        Ok(ratio(num, t * kk))
    }
}

/// `½ Σ |D1(s) − D2(s)|`.
pub fn stat_distance(a: &ExactDist, b: &ExactDist) -> Result<BigRational> {
    ensure_dim("distribution width", a.bits, b.bits)?;
    let ta = a.total as u128;
    let tb = b.total as u128;
    let mut num = 0u128;
    let mut ia = a.weights.iter().peekable();
    let mut ib = b.weights.iter().peekable();
    loop {
        let (wa, wb) = match (ia.peek(), ib.peek()) {
            (None, None) => break,
            (Some(&(&oa, &wa)), Some(&(&ob, &wb))) => {
                if oa == ob {
                    ia.next();
                    ib.next();
                    (wa, wb)
                } else if oa < ob {
                    ia.next();
                    (wa, 0)
                } else {
                    ib.next();
                    (0, wb)
                }
            }
            (Some(&(_, &wa)), None) => {
                ia.next();
                (wa, 0)
            }
            (None, Some(&(_, &wb))) => {
                ib.next();
                (0, wb)
            }
        };
        num += (wa as u128 * tb).abs_diff(wb as u128 * ta);
    }
    Ok(ratio(num, 2 * ta * tb))
}

/// Distribution of `f(X)` by enumerating the whole support of `X`.
pub fn exact_distribution(
    x: &AffineSource,
    bits_out: usize,
    budget: u128,
    f: impl Fn(&BitVec) -> u64,
) -> Result<ExactDist> {
    ensure_budget("support enumeration", 1u128 << x.entropy(), budget)?;
    Ok(ExactDist::from_outcomes(bits_out, x.support().map(|p| f(&p))))
}

/// Outcome of checking that small collision probability forces closeness to
/// min-entropy `log k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closeness {
    pub collision_probability: BigRational,
    /// Exact distance to the nearest distribution of min-entropy `log k`.
    pub clip_distance: BigRational,
    /// Whether `cp ≤ 1/(k·l)` holds.
    pub premise: bool,
    /// `1/l`, the square of the certified distance bound `1/√l`.
    pub bound_squared: BigRational,
    pub entropy_floor: u64,
}

/// Checks that `cp(D) ≤ 1/(k·l)` implies `D` is `1/√l`-close to a source of
/// min-entropy `log k`. Errors with `Uncertified` if the premise holds and the
/// conclusion does not.
pub fn min_entropy_closeness(d: &ExactDist, k: u64, l: u64) -> Result<Closeness> {
    if l == 0 {
        return Err(Error::InvalidParameter("closeness parameter l must be positive".into()));
    }
    let cp = d.collision_probability();
    let threshold = ratio(1, k as u128 * l as u128);
    let premise = cp <= threshold;
    let clip = d.clip_distance(k)?;
    let bound_sq = ratio(1, l as u128);
    if premise && &clip * &clip > bound_sq {
        return Err(Error::Uncertified(alloc::format!(
            "collision probability {cp} ≤ 1/(k·l) but clip distance {clip} exceeds 1/√{l}"
        )));
    }
    Ok(Closeness { collision_probability: cp, clip_distance: clip, premise, bound_squared: bound_sq, entropy_floor: k })
}

/// `|1 − 2p|` style bias of a single bit given its count of ones out of `total`.
pub fn bit_bias(ones: u64, total: u64) -> BigRational {
    let num = (total as i128 - 2 * ones as i128).abs();
    BigRational::new(BigInt::from(num), BigInt::from(total))
}
