//! Exhaustive and sampled measurement of extractor properties over every
//! affine subspace of a given dimension.
//!
//! Functions are given as truth tables. For one output bit two kernels are
//! available: the primary kernel walks subspaces in pivot-pattern order and
//! counts agreements with packed coset masks; the dual kernel enumerates
//! orthogonal complements and reads coset sums off Walsh spectra. They share
//! nothing but the truth table and the witness order.

use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dist::ratio;
use crate::error::{ensure_budget, Error, Result};
use crate::subspace::{
    coset_representatives, for_each_in_pattern, gaussian_binomial, pivot_patterns, random_subspace, rref_u64,
};

/// Largest `n` the truth-table kernels accept.
pub const MAX_TABLE_N: usize = 16;

/// Outputs of an `n`-bit to `m`-bit function, indexed by input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthTable {
    n: usize,
    m: usize,
    values: Vec<u64>,
}

impl TruthTable {
    pub fn from_fn(n: usize, m: usize, f: impl Fn(u64) -> u64) -> Result<Self> {
        if n > MAX_TABLE_N || m == 0 || m > 63 {
            return Err(Error::InvalidParameter(alloc::format!(
                "truth tables need n ≤ {MAX_TABLE_N} and 1 ≤ m ≤ 63, got n = {n}, m = {m}"
            )));
        }
        let mask = (1u64 << m) - 1;
        Ok(TruthTable { n, m, values: (0..1u64 << n).map(|x| f(x) & mask).collect() })
    }

    pub fn from_bits(n: usize, f: impl Fn(u64) -> bool) -> Result<Self> {
        TruthTable::from_fn(n, 1, |x| f(x) as u64)
    }

    pub fn from_values(n: usize, m: usize, values: Vec<u64>) -> Result<Self> {
        if values.len() != 1 << n {
            return Err(Error::DimensionMismatch { what: "truth table", expected: 1 << n, found: values.len() });
        }
        TruthTable::from_fn(n, m, |x| values[x as usize])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: u64) -> u64 {
        self.values[x as usize]
    }

    /// Packed truth table of output bit `bit`.
    pub fn bit_mask(&self, bit: usize) -> Vec<u64> {
        let mut w = alloc::vec![0u64; (1usize << self.n).div_ceil(64)];
        for (x, &v) in self.values.iter().enumerate() {
            if v >> bit & 1 == 1 {
                w[x / 64] |= 1 << (x % 64);
            }
        }
        w
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Definition {
    /// Distance of `(f(X), f(X+a))` from `(U_m, f(X+a))`.
    Joint,
    /// `|E[(−1)^{f(x)+f(x+a)}]|`, one output bit.
    XorBias,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exhaustive {
        budget: u128,
    },
    /// `triples` random `(subspace, shift, a)` draws, each estimated from
    /// `points` random points of the coset.
    Sampled {
        triples: u64,
        points: u64,
        seed: u64,
    },
}

/// The extremal instance: RREF rows of the subspace, the coset
/// representative that is zero on every pivot column, and the direction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Witness {
    pub subspace: Vec<u64>,
    pub shift: u64,
    pub a: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Measured {
    Exact(BigRational),
    Estimate { value: f64, radius: f64, confidence: f64 },
}

impl Measured {
    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Measured::Exact(r) => Some(r),
            Measured::Estimate { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub property: &'static str,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub definition: Option<Definition>,
    pub sampled: bool,
    pub value: Measured,
    pub witness: Option<Witness>,
    /// For pass/fail properties.
    pub passed: Option<bool>,
    /// `(subspace, shift, direction)` instances examined.
    pub instances: u128,
}

fn check_shape(t: &TruthTable, k: usize) -> Result<()> {
    if k > t.n {
        return Err(Error::InvalidParameter(alloc::format!("k = {k} exceeds n = {}", t.n)));
    }
    Ok(())
}

/// Point evaluations needed to measure a directional property exhaustively.
pub fn directional_cost(n: usize, k: usize) -> u128 {
    gaussian_binomial(n, k).saturating_mul(1u128 << n).saturating_mul(1u128 << k)
}

/// Elements of the span of packed rows, in Gray order from zero.
fn span_points(rows: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(1 << rows.len());
    let mut cur = 0u64;
    out.push(cur);
    for i in 1u64..1u64 << rows.len() {
        cur ^= rows[i.trailing_zeros() as usize];
        out.push(cur);
    }
    out
}

fn popcount_and(a: &[u64], b: &[u64]) -> u64 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as u64).sum()
}

/// Tracks the largest score with the smallest witness key.
struct Best {
    score: u64,
    witness: Option<Witness>,
}

impl Best {
    fn new() -> Self {
        Best { score: 0, witness: None }
    }

    fn offer(&mut self, score: u64, key: impl FnOnce() -> Witness) {
        if self.witness.is_none() || score > self.score {
            self.score = score;
            self.witness = Some(key());
        } else if score == self.score {
            let k = key();
            if Some(&k) < self.witness.as_ref() {
                self.witness = Some(k);
            }
        }
    }
}

/// `x ↦ f(x ⊕ a)` as a packed mask.
fn shifted_mask(f: &[u64], n: usize, a: u64) -> Vec<u64> {
    let mut w = alloc::vec![0u64; f.len()];
    for x in 0..1u64 << n {
        let y = (x ^ a) as usize;
        if f[y / 64] >> (y % 64) & 1 == 1 {
            w[x as usize / 64] |= 1 << (x % 64);
        }
    }
    w
}

fn coset_mask(points: &[u64], rep: u64, words: usize) -> Vec<u64> {
    let mut w = alloc::vec![0u64; words];
    for &v in points {
        let x = (v ^ rep) as usize;
        w[x / 64] |= 1 << (x % 64);
    }
    w
}

/// Score of one `(coset, a)` pair from its coset sums `A` (of `(−1)^f`) and
/// `B` (of `(−1)^{f(x)+f(x+a)}`); the value is score over `2^k` or `2^{k+1}`.
fn score(def: Definition, a_sum: i64, b_sum: i64) -> u64 {
    match def {
        Definition::XorBias => b_sum.unsigned_abs(),
        Definition::Joint => a_sum.unsigned_abs().max(b_sum.unsigned_abs()),
    }
}

/// Value of a kernel score at dimension `k`.
pub fn score_value(def: Definition, score: u64, k: usize) -> BigRational {
    match def {
        Definition::XorBias => ratio(score as u128, 1u128 << k),
        Definition::Joint => ratio(score as u128, 1u128 << (k + 1)),
    }
}

/// Partial result over a slice of pivot patterns; merge with [`merge`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partial {
    pub score: u64,
    pub witness: Option<Witness>,
    pub instances: u128,
}

pub fn merge(a: Partial, b: Partial) -> Partial {
    let instances = a.instances + b.instances;
    let (score, witness) = match (a.witness, b.witness) {
        (None, w) => (b.score, w),
        (w, None) => (a.score, w),
        (Some(wa), Some(wb)) => {
            if a.score > b.score || (a.score == b.score && wa <= wb) {
                (a.score, Some(wa))
            } else {
                (b.score, Some(wb))
            }
        }
    };
    Partial { score, witness, instances }
}

/// Shifted masks for every nonzero direction.
pub struct Directions {
    f: Vec<u64>,
    xor: Vec<Vec<u64>>,
}

impl Directions {
    pub fn new(t: &TruthTable) -> Result<Self> {
        if t.m != 1 {
            return Err(Error::InvalidParameter("mask kernels need one output bit".into()));
        }
        let f = t.bit_mask(0);
        let xor = (1u64..1u64 << t.n)
            .map(|a| {
                let g = shifted_mask(&f, t.n, a);
                f.iter().zip(&g).map(|(x, y)| x ^ y).collect()
            })
            .collect();
        Ok(Directions { f, xor })
    }
}

/// Primary kernel over the given pivot patterns (one output bit).
pub fn directional_patterns(
    t: &TruthTable,
    dirs: &Directions,
    k: usize,
    def: Definition,
    patterns: &[Vec<usize>],
) -> Partial {
    let n = t.n;
    let words = dirs.f.len();
    let half = 1i64 << k;
    let mut best = Best::new();
    let mut instances = 0u128;
    for pattern in patterns {
        let reps = coset_representatives(n, pattern);
        for_each_in_pattern(n, pattern, |rows| {
            let points = span_points(rows);
            for &rep in &reps {
                let mask = coset_mask(&points, rep, words);
                let a_sum = half - 2 * popcount_and(&dirs.f, &mask) as i64;
                for (ai, h) in dirs.xor.iter().enumerate() {
                    let b_sum = half - 2 * popcount_and(h, &mask) as i64;
                    let s = score(def, a_sum, b_sum);
                    if s >= best.score {
                        best.offer(s, || Witness { subspace: rref_u64(rows), shift: rep, a: Some(ai as u64 + 1) });
                    }
                }
                instances += dirs.xor.len() as u128;
            }
        });
    }
    Partial { score: best.score, witness: best.witness, instances }
}

fn exhaustive_guard(t: &TruthTable, k: usize, budget: u128) -> Result<()> {
    check_shape(t, k)?;
    ensure_budget("directional enumeration", directional_cost(t.n, k), budget)
}

fn report(property: &'static str, t: &TruthTable, k: usize, def: Option<Definition>, value: Measured) -> VerifyReport {
    VerifyReport {
        property,
        n: t.n,
        k,
        m: t.m,
        definition: def,
        sampled: matches!(value, Measured::Estimate { .. }),
        value,
        witness: None,
        passed: None,
        instances: 0,
    }
}

/// Directional measurement under `def`. One output bit uses the mask
/// kernels; `Joint` with more bits enumerates distributions directly.
pub fn directional_bias(t: &TruthTable, k: usize, def: Definition, mode: Mode) -> Result<VerifyReport> {
    check_shape(t, k)?;
    if def == Definition::XorBias && t.m != 1 {
        return Err(Error::InvalidParameter("the xor bias is defined for one output bit".into()));
    }
    match mode {
        Mode::Exhaustive { budget } => {
            exhaustive_guard(t, k, budget)?;
            let (value, witness, instances) = if t.m == 1 {
                let dirs = Directions::new(t)?;
                let p = directional_patterns(t, &dirs, k, def, &pivot_patterns(t.n, k));
                (score_value(def, p.score, k), p.witness, p.instances)
            } else {
                joint_general(t, k)?
            };
            let mut r = report("directional", t, k, Some(def), Measured::Exact(value));
            r.witness = witness;
            r.instances = instances;
            Ok(r)
        }
        Mode::Sampled { triples, points, seed } => sampled_directional(t, k, def, triples, points, seed),
    }
}

/// Dual kernel: enumerates `W = V^⊥` and recovers every coset sum of `V`
/// from the Walsh spectrum restricted to `W`.
pub fn directional_bias_dual(t: &TruthTable, k: usize, def: Definition, budget: u128) -> Result<VerifyReport> {
    exhaustive_guard(t, k, budget)?;
    if t.m != 1 {
        return Err(Error::InvalidParameter("the dual kernel needs one output bit".into()));
    }
    let n = t.n;
    let size = 1usize << n;
    let signs = |g: &dyn Fn(u64) -> bool| -> Vec<i64> {
        let mut v: Vec<i64> = (0..size as u64).map(|x| if g(x) { -1 } else { 1 }).collect();
        walsh(&mut v);
        v
    };
    let f = |x: u64| t.get(x) == 1;
    let f_hat = signs(&f);
    let spectra: Vec<Vec<i64>> = (1u64..1u64 << n).map(|a| signs(&|x| (t.get(x) ^ t.get(x ^ a)) == 1)).collect();
    let r = n - k;
    let mut best = Best::new();
    let mut instances = 0u128;
    let mut visit = |dual_rows: &[u64]| {
        let w_elems = span_points_ordered(dual_rows);
        let v_rows = orthogonal_complement(n, dual_rows);
        let coset_sums = |spec: &[i64]| -> Vec<i64> {
            let mut c: Vec<i64> = w_elems.iter().map(|&w| spec[w as usize]).collect();
            walsh(&mut c);
            // c[s] = |W| · Σ over the coset with syndrome s
            c.into_iter().map(|v| v >> r).collect()
        };
        let a_sums = coset_sums(&f_hat);
        for (ai, spec) in spectra.iter().enumerate() {
            let b_sums = coset_sums(spec);
            for s in 0..1usize << r {
                let sc = score(def, a_sums[s], b_sums[s]);
                if sc >= best.score {
                    best.offer(sc, || Witness {
                        subspace: v_rows.clone(),
                        shift: rep_with_syndrome(n, &v_rows, dual_rows, s as u64),
                        a: Some(ai as u64 + 1),
                    });
                }
            }
            instances += 1 << r;
        }
    };
    if r == 0 {
        visit(&[]);
    } else {
        crate::subspace::for_each_subspace(n, r, u128::MAX, |rows| visit(rows))?;
    }
    let mut rep = report("directional", t, k, Some(def), Measured::Exact(score_value(def, best.score, k)));
    rep.witness = best.witness;
    rep.instances = instances;
    Ok(rep)
}

/// In-place Walsh–Hadamard transform.
fn walsh(v: &mut [i64]) {
    let mut h = 1;
    while h < v.len() {
        for i in (0..v.len()).step_by(2 * h) {
            for j in i..i + h {
                let (x, y) = (v[j], v[j + h]);
                v[j] = x + y;
                v[j + h] = x - y;
            }
        }
        h *= 2;
    }
}

/// Span elements indexed by coefficient vector: element `t` is `Σ t_j r_j`.
fn span_points_ordered(rows: &[u64]) -> Vec<u64> {
    (0u64..1 << rows.len())
        .map(|t| rows.iter().enumerate().filter(|(j, _)| t >> j & 1 == 1).fold(0, |acc, (_, &r)| acc ^ r))
        .collect()
}

/// RREF basis of `{v : ⟨v, w⟩ = 0 for every row w}`.
fn orthogonal_complement(n: usize, rows: &[u64]) -> Vec<u64> {
    let m = crate::matrix::GF2Matrix::from_u64_rows(n, rows);
    rref_u64(&m.kernel_basis().to_u64_rows())
}

/// The coset representative of `V` (zero on pivot columns) whose inner
/// products with the dual rows are the bits of `s`.
fn rep_with_syndrome(n: usize, v_rows: &[u64], dual_rows: &[u64], s: u64) -> u64 {
    let mut pattern: Vec<usize> = v_rows.iter().map(|r| r.trailing_zeros() as usize).collect();
    pattern.sort_unstable();
    coset_representatives(n, &pattern)
        .into_iter()
        .find(|&c| dual_rows.iter().enumerate().all(|(j, &w)| ((w & c).count_ones() & 1) as u64 == s >> j & 1))
        .expect("every syndrome has a representative")
}

/// Calls `f(rows, rep, points)` for every coset of every `k`-dimensional
/// subspace, `points` being the coset in Gray order.
fn for_each_coset(n: usize, k: usize, mut f: impl FnMut(&[u64], u64, &[u64])) {
    for pattern in pivot_patterns(n, k) {
        let reps = coset_representatives(n, &pattern);
        for_each_in_pattern(n, &pattern, |rows| {
            let points = span_points(rows);
            for &rep in &reps {
                let coset: Vec<u64> = points.iter().map(|&v| v ^ rep).collect();
                f(rows, rep, &coset);
            }
        });
    }
}

/// Distance of `(f(X), f(X+a))` from `(U_m, f(X+a))` times `2^{k+m+1}`.
fn joint_numerator(t: &TruthTable, coset: &[u64], a: u64) -> u128 {
    let m = t.m;
    let mut counts = alloc::vec![0u64; 1 << (2 * m)];
    for &x in coset {
        counts[(t.get(x) | t.get(x ^ a) << m) as usize] += 1;
    }
    let mut num = 0u128;
    for c in 0..1usize << m {
        let q: u64 = (0..1usize << m).map(|b| counts[b | c << m]).sum();
        for b in 0..1usize << m {
            num += (counts[b | c << m] as i128 * (1 << m) - q as i128).unsigned_abs();
        }
    }
    num
}

fn joint_general(t: &TruthTable, k: usize) -> Result<(BigRational, Option<Witness>, u128)> {
    let n = t.n;
    let mut best = Best::new();
    let mut instances = 0u128;
    for_each_coset(n, k, |rows, rep, coset| {
        for a in 1u64..1 << n {
            let s = joint_numerator(t, coset, a) as u64;
            if s >= best.score {
                best.offer(s, || Witness { subspace: rref_u64(rows), shift: rep, a: Some(a) });
            }
            instances += 1;
        }
    });
    Ok((ratio(best.score as u128, 1u128 << (k + t.m + 1)), best.witness, instances))
}

/// Value of one instance by direct evaluation of the coset.
pub fn point_value(t: &TruthTable, k: usize, def: Definition, w: &Witness) -> Result<BigRational> {
    if w.subspace.len() != k {
        return Err(Error::DimensionMismatch { what: "witness subspace", expected: k, found: w.subspace.len() });
    }
    let coset: Vec<u64> = span_points(&w.subspace).into_iter().map(|v| v ^ w.shift).collect();
    match w.a {
        None => Ok(ratio(distance_numerator(t, &coset), 1u128 << (k + t.m + 1))),
        Some(a) => match def {
            Definition::XorBias => {
                let b: i64 = coset.iter().map(|&x| if (t.get(x) ^ t.get(x ^ a)) & 1 == 1 { -1 } else { 1 }).sum();
                Ok(ratio(b.unsigned_abs() as u128, 1u128 << k))
            }
            Definition::Joint => Ok(ratio(joint_numerator(t, &coset, a), 1u128 << (k + t.m + 1))),
        },
    }
}

/// `Σ_z |cnt(z)·2^m − 2^k|`: the distance from uniform times `2^{k+m+1}`.
fn distance_numerator(t: &TruthTable, coset: &[u64]) -> u128 {
    let mut counts = alloc::vec![0u64; 1 << t.m];
    for &x in coset {
        counts[t.get(x) as usize] += 1;
    }
    let total = coset.len() as i128;
    counts.iter().map(|&c| (c as i128 * (1 << t.m) - total).unsigned_abs()).sum()
}

/// Largest distance of `f(X)` from uniform over every `k`-dimensional affine
/// subspace.
pub fn affine_extractor_distance(t: &TruthTable, k: usize, mode: Mode) -> Result<VerifyReport> {
    check_shape(t, k)?;
    match mode {
        Mode::Exhaustive { budget } => {
            ensure_budget("affine enumeration", gaussian_binomial(t.n, k).saturating_mul(1u128 << t.n), budget)?;
            let mut best = Best::new();
            let mut instances = 0u128;
            for_each_coset(t.n, k, |rows, rep, coset| {
                let s = distance_numerator(t, coset) as u64;
                if s >= best.score {
                    best.offer(s, || Witness { subspace: rref_u64(rows), shift: rep, a: None });
                }
                instances += 1;
            });
            let mut r =
                report("affine", t, k, None, Measured::Exact(ratio(best.score as u128, 1u128 << (k + t.m + 1))));
            r.witness = best.witness;
            r.instances = instances;
            Ok(r)
        }
        Mode::Sampled { triples, points, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst = 0.0f64;
            for _ in 0..triples {
                let (rows, rep) = random_coset(t.n, k, &mut rng);
                let mut counts = alloc::vec![0u64; 1 << t.m];
                for _ in 0..points {
                    counts[t.get(random_point(&rows, rep, &mut rng)) as usize] += 1;
                }
                let u = points as f64 / (1u64 << t.m) as f64;
                let d: f64 = counts.iter().map(|&c| libm::fabs(c as f64 - u)).sum::<f64>() / (2.0 * points as f64);
                worst = worst.max(d);
            }
            // each output probability carries its own Hoeffding radius
            let cells = (1u64 << t.m) as f64;
            let radius = cells / 2.0 * crate::lbp::hoeffding_radius(points, 0.01 / (triples as f64 * cells));
            Ok(report("affine", t, k, None, Measured::Estimate { value: worst, radius, confidence: 0.99 }))
        }
    }
}

fn random_coset(n: usize, k: usize, rng: &mut ChaCha8Rng) -> (Vec<u64>, u64) {
    let rows = rref_u64(&random_subspace(n, k, rng).to_u64_rows());
    let mask = if n == 64 { !0 } else { (1u64 << n) - 1 };
    let mut rep = rng.gen::<u64>() & mask;
    // clear pivot columns so the representative is canonical
    for &r in &rows {
        if rep >> r.trailing_zeros() & 1 == 1 {
            rep ^= r;
        }
    }
    (rows, rep)
}

fn random_point(rows: &[u64], rep: u64, rng: &mut ChaCha8Rng) -> u64 {
    rows.iter().fold(rep, |acc, &r| if rng.gen::<bool>() { acc ^ r } else { acc })
}

/// Sampled triples behind a sampled directional report, with the estimate of
/// each, so callers can bracket the exact values.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledTriple {
    pub witness: Witness,
    pub estimate: f64,
}

pub fn sampled_triples(
    t: &TruthTable,
    k: usize,
    def: Definition,
    triples: u64,
    points: u64,
    seed: u64,
) -> Result<Vec<SampledTriple>> {
    check_shape(t, k)?;
    if t.m != 1 {
        return Err(Error::InvalidParameter("sampled directional mode needs one output bit".into()));
    }
    sampled_triples_fn(t.n, k, def, |x| t.get(x) == 1, triples, points, seed)
}

/// [`sampled_triples`] for a black-box function on up to 64 input bits.
pub fn sampled_triples_fn(
    n: usize,
    k: usize,
    def: Definition,
    f: impl Fn(u64) -> bool,
    triples: u64,
    points: u64,
    seed: u64,
) -> Result<Vec<SampledTriple>> {
    if n == 0 || n > 64 || k > n || triples == 0 || points == 0 {
        return Err(Error::InvalidParameter("sampling needs 1 ≤ n ≤ 64, k ≤ n, triples and points ≥ 1".into()));
    }
    let mask = if n == 64 { !0 } else { (1u64 << n) - 1 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(triples as usize);
    for _ in 0..triples {
        let (rows, rep) = random_coset(n, k, &mut rng);
        let a = loop {
            let a = rng.gen::<u64>() & mask;
            if a != 0 {
                break a;
            }
        };
        let (mut fa, mut fb) = (0i64, 0i64);
        for _ in 0..points {
            let x = random_point(&rows, rep, &mut rng);
            let fx = f(x);
            fa += if fx { -1 } else { 1 };
            fb += if fx ^ f(x ^ a) { -1 } else { 1 };
        }
        let (ea, eb) = (fa as f64 / points as f64, fb as f64 / points as f64);
        let estimate = match def {
            Definition::XorBias => libm::fabs(eb),
            Definition::Joint => libm::fabs(ea).max(libm::fabs(eb)) / 2.0,
        };
        out.push(SampledTriple { witness: Witness { subspace: rows, shift: rep, a: Some(a) }, estimate });
    }
    Ok(out)
}

/// Sampled directional report for a black-box function, largest estimate
/// first, ties to the smaller witness.
pub fn sampled_directional_fn(
    n: usize,
    k: usize,
    def: Definition,
    f: impl Fn(u64) -> bool,
    triples: u64,
    points: u64,
    seed: u64,
) -> Result<VerifyReport> {
    let list = sampled_triples_fn(n, k, def, f, triples, points, seed)?;
    Ok(sampled_report(n, k, def, &list, triples, points))
}

fn sampled_report(
    n: usize,
    k: usize,
    def: Definition,
    list: &[SampledTriple],
    triples: u64,
    points: u64,
) -> VerifyReport {
    let best = list
        .iter()
        .max_by(|x, y| x.estimate.partial_cmp(&y.estimate).expect("finite").then_with(|| y.witness.cmp(&x.witness)))
        .expect("at least one triple");
    VerifyReport {
        property: "directional",
        n,
        k,
        m: 1,
        definition: Some(def),
        sampled: true,
        value: Measured::Estimate {
            value: best.estimate,
            radius: sampled_radius(def, triples, points),
            confidence: 0.99,
        },
        witness: Some(best.witness.clone()),
        passed: None,
        instances: triples as u128,
    }
}

/// Hoeffding radius for one triple's estimate, union-bounded over the
/// triples (and over both sums for `Joint`).
pub fn sampled_radius(def: Definition, triples: u64, points: u64) -> f64 {
    match def {
        Definition::XorBias => 2.0 * crate::lbp::hoeffding_radius(points, 0.01 / triples as f64),
        Definition::Joint => crate::lbp::hoeffding_radius(points, 0.01 / (2.0 * triples as f64)),
    }
}

fn sampled_directional(
    t: &TruthTable,
    k: usize,
    def: Definition,
    triples: u64,
    points: u64,
    seed: u64,
) -> Result<VerifyReport> {
    let list = sampled_triples(t, k, def, triples, points, seed)?;
    Ok(sampled_report(t.n, k, def, &list, triples, points))
}

/// For every `(X, a)`, some value `b` of `f(X+a)` leaves `f(X)` with full
/// support. Fails with the first violating instance.
pub fn disperser_check(t: &TruthTable, k: usize, budget: u128) -> Result<VerifyReport> {
    exhaustive_guard(t, k, budget)?;
    let n = t.n;
    let m = t.m;
    let full = 1usize << m;
    let mut failure: Option<Witness> = None;
    let mut instances = 0u128;
    for_each_coset(n, k, |rows, rep, coset| {
        if failure.is_some() {
            return;
        }
        for a in 1u64..1 << n {
            instances += 1;
            let mut seen = alloc::vec![0u64; 1 << m];
            for &x in coset {
                seen[t.get(x ^ a) as usize] |= 1 << t.get(x);
            }
            let ok = seen.iter().any(|&s| s.count_ones() as usize == full);
            if !ok {
                failure = Some(Witness { subspace: rref_u64(rows), shift: rep, a: Some(a) });
                return;
            }
        }
    });
    let passed = failure.is_none();
    let mut r = report("disperser", t, k, None, Measured::Exact(ratio(passed as u128, 1)));
    r.witness = failure;
    r.passed = Some(passed);
    r.instances = instances;
    Ok(r)
}

/// Subset biases of a family of `m` bits, from the exact multiset of its
/// outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsBiasReport {
    pub m: usize,
    /// `max_{S ≠ ∅} |bias(⊕_{i∈S} Z_i)|`.
    pub eps: BigRational,
    pub worst_subset: u64,
    /// Exact distance of `Z` from `U_m`.
    pub distance: BigRational,
    /// `ε·2^{m/2}`, rounded up in the last printed digit.
    pub implied_bound: f64,
    /// `distance ≤ ε·2^{m/2}`, decided exactly by squaring.
    pub within_bound: bool,
}

pub const EPS_BIAS_MAX_M: usize = 20;

pub fn eps_bias_check(m: usize, outcomes: &[u64]) -> Result<EpsBiasReport> {
    if m == 0 || m > EPS_BIAS_MAX_M {
        return Err(Error::InvalidParameter(alloc::format!("eps-bias check needs 1 ≤ m ≤ {EPS_BIAS_MAX_M}")));
    }
    if outcomes.is_empty() {
        return Err(Error::InvalidParameter("no outcomes".into()));
    }
    let total = outcomes.len() as u128;
    let mut counts = alloc::vec![0i64; 1 << m];
    for &z in outcomes {
        counts[(z & ((1 << m) - 1)) as usize] += 1;
    }
    let mut spec = counts.clone();
    walsh(&mut spec);
    let (worst_subset, worst) = (1..1usize << m)
        .map(|s| (s as u64, spec[s].unsigned_abs()))
        .fold((0u64, 0u64), |acc, x| if x.1 > acc.1 { x } else { acc });
    let eps = ratio(worst as u128, total);
    let dist_num: u128 = counts.iter().map(|&c| (c as i128 * (1 << m) - total as i128).unsigned_abs()).sum();
    let distance = ratio(dist_num, total << (m + 1));
    // distance² ≤ ε²·2^m
    let lhs = &distance * &distance;
    let rhs = &eps * &eps * BigRational::from_integer((1u64 << m).into());
    let eps_f = worst as f64 / total as f64;
    Ok(EpsBiasReport {
        m,
        eps,
        worst_subset,
        distance,
        implied_bound: eps_f * libm::pow(2.0, m as f64 / 2.0),
        within_bound: lhs <= rhs || lhs.is_zero(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BUDGET: u128 = 1 << 40;

    fn exact(r: &VerifyReport) -> BigRational {
        r.value.exact().unwrap().clone()
    }

    #[test]
    fn constant_function() {
        let t = TruthTable::from_bits(5, |_| false).unwrap();
        let r = directional_bias(&t, 2, Definition::Joint, Mode::Exhaustive { budget: BUDGET }).unwrap();
        assert_eq!(exact(&r), ratio(1, 2));
        let a = affine_extractor_distance(&t, 2, Mode::Exhaustive { budget: BUDGET }).unwrap();
        assert_eq!(exact(&a), ratio(1, 2));
        assert_eq!(disperser_check(&t, 2, BUDGET).unwrap().passed, Some(false));
    }

    #[test]
    fn parity_is_not_directional() {
        let t = TruthTable::from_bits(6, |x| x.count_ones() % 2 == 1).unwrap();
        let r = directional_bias(&t, 3, Definition::XorBias, Mode::Exhaustive { budget: BUDGET }).unwrap();
        assert_eq!(exact(&r), ratio(1, 1));
        let d = directional_bias_dual(&t, 3, Definition::XorBias, BUDGET).unwrap();
        assert_eq!(r.witness, d.witness);
    }

    #[test]
    fn identity_bit_on_full_space() {
        let t = TruthTable::from_bits(4, |x| x & 1 == 1).unwrap();
        let r = affine_extractor_distance(&t, 4, Mode::Exhaustive { budget: BUDGET }).unwrap();
        assert!(exact(&r).is_zero());
    }

    #[test]
    fn kernels_agree_on_random_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for (n, k) in [(4, 2), (5, 2), (5, 3), (6, 3), (4, 4), (4, 0)] {
            let v: Vec<u64> = (0..1 << n).map(|_| rng.gen::<u64>() & 1).collect();
            let t = TruthTable::from_values(n, 1, v).unwrap();
            for def in [Definition::Joint, Definition::XorBias] {
                let p = directional_bias(&t, k, def, Mode::Exhaustive { budget: BUDGET }).unwrap();
                let d = directional_bias_dual(&t, k, def, BUDGET).unwrap();
                assert_eq!(p.value, d.value, "n={n} k={k} {def:?}");
                assert_eq!(p.witness, d.witness, "n={n} k={k} {def:?}");
                assert_eq!(point_value(&t, k, def, p.witness.as_ref().unwrap()).unwrap(), exact(&p));
            }
        }
    }

    #[test]
    fn general_joint_matches_mask_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let v: Vec<u64> = (0..32).map(|_| rng.gen::<u64>() & 1).collect();
        let t = TruthTable::from_values(5, 1, v).unwrap();
        let (val, w, _) = joint_general(&t, 2).unwrap();
        let p = directional_bias(&t, 2, Definition::Joint, Mode::Exhaustive { budget: BUDGET }).unwrap();
        assert_eq!(&val, p.value.exact().unwrap());
        assert_eq!(w, p.witness);
    }

    #[test]
    fn eps_bias_examples() {
        let fair: Vec<u64> = (0..8).collect();
        let r = eps_bias_check(3, &fair).unwrap();
        assert!(r.eps.is_zero() && r.distance.is_zero() && r.within_bound);
        // Z1 = Z2
        let dup: Vec<u64> = [0u64, 3, 0, 3].to_vec();
        let r = eps_bias_check(2, &dup).unwrap();
        assert_eq!(r.eps, ratio(1, 1));
        assert_eq!(r.worst_subset, 0b11);
        assert!(r.within_bound);
    }

    #[test]
    fn sampled_mode_brackets() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let v: Vec<u64> = (0..64).map(|_| rng.gen::<u64>() & 1).collect();
        let t = TruthTable::from_values(6, 1, v).unwrap();
        let def = Definition::XorBias;
        let list = sampled_triples(&t, 3, def, 20, 400, 5).unwrap();
        let r = sampled_radius(def, 20, 400);
        for s in &list {
            let e = point_value(&t, 3, def, &s.witness).unwrap();
            let e = num_traits::ToPrimitive::to_f64(&e).unwrap();
            assert!((s.estimate - e).abs() <= r);
        }
    }
}
