//! Low-degree correlation breaking: the look-ahead extractor, the
//! non-interactive merger, flip-flop assignment and the advice correlation
//! breaker built from them.
//!
//! Every stage is `LSExt(source, seed)` for an extractor profile that is
//! linear in the source, so each stage output is linear in its source once
//! the seed side is fixed. Widths are explicit; nothing is rounded up.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::bits::BitVec;
use crate::error::{ensure_dim, Error, Result};
use crate::xprims::lsext::{compose_degree, ExtractorProfile};

/// Stage widths of the look-ahead extractor run on a source and a seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaWidths {
    /// Seed slice `s_0`.
    pub s: usize,
    /// `r̃_0`.
    pub m1: usize,
    /// `s_1`.
    pub m2: usize,
    /// `r_1`, and `r_0` after slicing.
    pub m: usize,
}

/// Widths of the merger: `seed[i]` is `|s_{i+1}|`, `mid[i]` is `|r_{i+1}|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NipmWidths {
    pub seed: Vec<usize>,
    pub mid: Vec<usize>,
}

impl NipmWidths {
    pub fn uniform(rows: usize, seed: usize, mid: usize) -> Self {
        NipmWidths { seed: vec![seed; rows], mid: vec![mid; rows.saturating_sub(1)] }
    }

    pub fn rows(&self) -> usize {
        self.seed.len()
    }

    pub fn out_len(&self) -> usize {
        self.seed.last().copied().unwrap_or(0)
    }
}

/// Absolute constants the asymptotic statements leave open.
#[derive(Clone, Debug, PartialEq)]
pub struct TheoryConstants {
    pub c: f64,
    /// `log2(1/ε)` for the target error.
    pub log_inv_eps: f64,
    /// Output rate of the seeded extractor, as a fraction.
    pub beta: (u64, u64),
}

impl Default for TheoryConstants {
    fn default() -> Self {
        TheoryConstants { c: 1.0, log_inv_eps: 1.0, beta: (1, 2) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CBParams {
    /// Source bits.
    pub n: usize,
    /// Seed bits.
    pub d: usize,
    /// Number of tampered copies the analysis tolerates.
    pub t: usize,
    /// Advice bits.
    pub a: usize,
    /// Entropy of the source assumed by the analysis.
    pub k: usize,
    /// Seed slice feeding the first extraction.
    pub m1: usize,
    /// `q`, the seed of the look-ahead stage.
    pub m2: usize,
    pub la: LaWidths,
    pub nipm: NipmWidths,
    pub profile: ExtractorProfile,
    pub constants: TheoryConstants,
    pub structural_mode: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintKind {
    /// Slicing arithmetic; a failure blocks execution.
    Width,
    /// Inequality from the analysis; may fail in structural mode.
    Theory,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub kind: ConstraintKind,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

fn width(name: &str, lhs: usize, rhs: usize, le: bool) -> Constraint {
    let holds = if le { lhs <= rhs } else { lhs >= rhs };
    Constraint { name: name.to_string(), kind: ConstraintKind::Width, lhs: lhs as f64, rhs: rhs as f64, holds }
}

fn theory(name: &str, lhs: f64, rhs: f64) -> Constraint {
    Constraint { name: name.to_string(), kind: ConstraintKind::Theory, lhs, rhs, holds: lhs >= rhs }
}

fn floor_frac(num: u128, den: u128) -> usize {
    (num / den.max(1)) as usize
}

impl CBParams {
    /// Desk-scale widths: every stage keeps half the seed length. Runs in
    /// structural mode.
    pub fn toy(n: usize, d: usize, a: usize) -> Result<Self> {
        let h = (d / 2).max(1);
        let p = CBParams {
            n,
            d,
            t: 1,
            a,
            k: n,
            m1: h,
            m2: h,
            la: LaWidths { s: (h / 2).max(1), m1: h, m2: h, m: h },
            nipm: NipmWidths::uniform(2 * a, h, h),
            profile: ExtractorProfile::Polynomial,
            constants: TheoryConstants::default(),
            structural_mode: true,
        };
        p.check_widths()?;
        Ok(p)
    }

    /// Widths from the algorithms' formulas with floor rounding. A stage that
    /// rounds to zero is an error naming the stage.
    pub fn from_theory(n: usize, d: usize, k: usize, t: usize, a: usize, constants: TheoryConstants) -> Result<Self> {
        let (bn, bd) = (constants.beta.0 as u128, constants.beta.1 as u128);
        let (n_, d_, k_, t_) = (n as u128, d as u128, k as u128, t as u128);
        let m1 = floor_frac(d_, 4 + 2 * t_);
        let m2 = floor_frac(bn * k_ * d_, bd * (8 + 4 * t_) * n_);
        // look-ahead stage: source y (d bits, entropy d/3), seed q (m2 bits)
        let (ln, ld, lk) = (d_, m2 as u128, d_ / 3);
        let la = LaWidths {
            s: floor_frac(ld, 2 + 2 * t_),
            m1: floor_frac(bn * lk * ld, bd * (2 * t_ + 2) * ln),
            m2: floor_frac(bn * bn * lk * ld, bd * bd * 4 * (t_ + 1) * ln),
            m: floor_frac(bn * bn * bn * lk * lk * ld, bd * bd * bd * (8 + 8 * t_) * ln * ln),
        };
        // merger over 2a rows of v bits, source entropy k/2
        let v = la.m as u128;
        let kn = k_ / 2;
        let mut seed = vec![floor_frac(v, 3 + 3 * t_)];
        let mut mid = Vec::new();
        for _ in 1..2 * a {
            let s = *seed.last().unwrap() as u128;
            // r_i = δ_w β s_i with δ_w = kn/(2n); s_{i+1} = δ_q δ_w β² s_i
            mid.push(floor_frac(bn * kn * s, bd * 2 * n_));
            seed.push(floor_frac(bn * bn * kn * s, bd * bd * 4 * n_));
        }
        let p = CBParams {
            n,
            d,
            t,
            a,
            k,
            m1,
            m2,
            la,
            nipm: NipmWidths { seed, mid },
            profile: ExtractorProfile::Polynomial,
            constants,
            structural_mode: false,
        };
        p.check_widths()?;
        Ok(p)
    }

    pub fn out_len(&self) -> usize {
        self.nipm.out_len()
    }

    /// Width of each assigned row.
    pub fn v(&self) -> usize {
        self.la.m
    }

    /// All constraints with their status: widths first, then the analysis.
    pub fn constraints(&self) -> Vec<Constraint> {
        let mut out = vec![
            width("m1 ≥ 1", self.m1, 1, false),
            width("m1 ≤ d", self.m1, self.d, true),
            width("m2 ≥ 1", self.m2, 1, false),
            width("la.s ≥ 1", self.la.s, 1, false),
            width("la.s ≤ m2", self.la.s, self.m2, true),
            width("la.m1 ≥ 1", self.la.m1, 1, false),
            width("la.m2 ≥ 1", self.la.m2, 1, false),
            width("la.m ≥ 1", self.la.m, 1, false),
            width("la.m ≤ la.m1", self.la.m, self.la.m1, true),
            width("nipm rows = 2a", self.nipm.seed.len(), 2 * self.a, false),
            width("nipm rows ≤ 2a", self.nipm.seed.len(), 2 * self.a, true),
            width("nipm mid rounds = 2a − 1", self.nipm.mid.len() + 1, self.nipm.seed.len().max(1), false),
            width("a ≥ 1", self.a, 1, false),
        ];
        if let Some(&s1) = self.nipm.seed.first() {
            out.push(width("nipm s1 ≤ v", s1, self.la.m, true));
        }
        for (i, &s) in self.nipm.seed.iter().enumerate() {
            out.push(width(&alloc::format!("nipm s{} ≥ 1", i + 1), s, 1, false));
        }
        for (i, &r) in self.nipm.mid.iter().enumerate() {
            out.push(width(&alloc::format!("nipm r{} ≥ 1", i + 1), r, 1, false));
        }
        // analysis side, with C and log(1/ε) from the configuration
        let (n, d, k, t, a) = (self.n as f64, self.d as f64, self.k as f64, self.t as f64, self.a as f64);
        let c = self.constants.c;
        let le = self.constants.log_inv_eps;
        let m = self.out_len().max(1) as f64;
        let e = 4.0 * a - 3.0;
        let sq = libm::sqrt(n);
        let k_floor = c * f64::max(
            libm::pow((t + 1.0) * (t + 1.0) * le * libm::pow(n, 4.0 * a - 1.0) / (m * m * m), 1.0 / e),
            (t + 1.0) * sq,
        );
        out.push(theory("k ≥ C·max{(…)^(1/(4a−3)), (t+1)√n}", k, k_floor));
        let d_floor = c
            * (t + 1.0)
            * (t + 1.0)
            * f64::max(
                (t + 1.0) * n * sq / k,
                libm::cbrt((t + 1.0) * le * libm::pow(n, 4.0 * a - 1.0) / libm::pow(k, e)),
            );
        out.push(theory("d ≥ C(t+1)²·max{(t+1)n√n/k, (…)^(1/3)}", d, d_floor));
        out.push(theory("d < n", n, d + 1.0));
        out
    }

    pub fn check_widths(&self) -> Result<()> {
        for c in self.constraints() {
            if c.kind == ConstraintKind::Width && !c.holds {
                return Err(Error::WidthSchedule {
                    stage: c.name,
                    detail: alloc::format!("lhs {} rhs {}", c.lhs, c.rhs),
                });
            }
        }
        Ok(())
    }

    /// Whether every analysis inequality holds.
    pub fn theory_holds(&self) -> bool {
        self.constraints().iter().filter(|c| c.kind == ConstraintKind::Theory).all(|c| c.holds)
    }
}

/// Look-ahead extraction of `x` seeded by `y`: returns `(r_0, r_1)`.
pub fn la_ext(x: &BitVec, y: &BitVec, w: &LaWidths, profile: &ExtractorProfile) -> Result<(BitVec, BitVec)> {
    if w.s > y.len() || w.m > w.m1 || w.s == 0 {
        return Err(Error::WidthSchedule {
            stage: "look-ahead".into(),
            detail: alloc::format!("slice {} of {} bits, output {} of {}", w.s, y.len(), w.m, w.m1),
        });
    }
    let s0 = y.prefix(w.s);
    let r0_full = profile.extract(x, &s0, w.m1)?;
    let s1 = profile.extract(y, &r0_full, w.m2)?;
    let r1 = profile.extract(x, &s1, w.m)?;
    Ok((r0_full.prefix(r1.len()), r1))
}

/// Merges `rows` with `x`; returns `s_ℓ`.
pub fn nipm(x: &BitVec, rows: &[BitVec], w: &NipmWidths, profile: &ExtractorProfile) -> Result<BitVec> {
    let l = rows.len();
    if l == 0 || w.seed.len() != l || w.mid.len() + 1 != l {
        return Err(Error::WidthSchedule {
            stage: "merger".into(),
            detail: alloc::format!("{l} rows against {} seed widths and {} mid widths", w.seed.len(), w.mid.len()),
        });
    }
    if w.seed[0] == 0 || w.seed[0] > rows[0].len() {
        return Err(Error::WidthSchedule {
            stage: "merger s1".into(),
            detail: alloc::format!("slice {} of a {}-bit row", w.seed[0], rows[0].len()),
        });
    }
    let mut s = rows[0].prefix(w.seed[0]);
    for i in 1..l {
        if w.mid[i - 1] == 0 || w.seed[i] == 0 {
            return Err(Error::WidthSchedule {
                stage: alloc::format!("merger round {i}"),
                detail: "zero width".into(),
            });
        }
        let r = profile.extract(x, &s, w.mid[i - 1])?;
        s = profile.extract(&rows[i], &r, w.seed[i])?;
    }
    Ok(s)
}

/// `(r_{α_1}, r_{1−α_1}, …, r_{α_a}, r_{1−α_a})`.
pub fn ff_assign(r0: &BitVec, r1: &BitVec, alpha: &BitVec) -> Vec<BitVec> {
    let mut out = Vec::with_capacity(2 * alpha.len());
    for bit in alpha.iter() {
        let (first, second) = if bit { (r1, r0) } else { (r0, r1) };
        out.push(first.clone());
        out.push(second.clone());
    }
    out
}

/// Intermediates of one correlation-breaker evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcbTrace {
    pub s: BitVec,
    pub q: BitVec,
    pub r0: BitVec,
    pub r1: BitVec,
    pub rows: Vec<BitVec>,
    pub out: BitVec,
}

pub fn ldacb_traced(x: &BitVec, y: &BitVec, id: &BitVec, p: &CBParams) -> Result<AcbTrace> {
    ensure_dim("correlation breaker source", p.n, x.len())?;
    ensure_dim("correlation breaker seed", p.d, y.len())?;
    ensure_dim("correlation breaker advice", p.a, id.len())?;
    p.check_widths()?;
    let s = y.prefix(p.m1);
    let q = p.profile.extract(x, &s, p.m2)?;
    let (r0, r1) = la_ext(y, &q, &p.la, &p.profile)?;
    let rows = ff_assign(&r0, &r1, id);
    let out = nipm(x, &rows, &p.nipm, &p.profile)?;
    Ok(AcbTrace { s, q, r0, r1, rows, out })
}

pub fn ldacb(x: &BitVec, y: &BitVec, id: &BitVec, p: &CBParams) -> Result<BitVec> {
    Ok(ldacb_traced(x, y, id, p)?.out)
}

/// Degree bounds for every stage, given the degrees of the source and seed
/// bits as polynomials of some underlying input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeLedger {
    pub q: usize,
    pub r0_full: usize,
    pub s1: usize,
    pub r0: usize,
    pub r1: usize,
    /// Degrees of `s_1, …, s_ℓ` inside the merger.
    pub merger: Vec<usize>,
    pub out: usize,
}

/// Degree bounds for `ldacb` with advice `id`; with `id = None` the bound
/// holds for every advice string.
pub fn degree_ledger(p: &CBParams, x_deg: usize, y_deg: usize, id: Option<&BitVec>) -> DegreeLedger {
    let j = |n: usize, d: usize, m: usize| p.profile.joint_degree_at(n, d, m);
    let la = &p.la;
    let q = compose_degree(j(p.n, p.m1, p.m2), x_deg, y_deg);
    // look-ahead: source y, seed q
    let r0_full = compose_degree(j(p.d, la.s, la.m1), y_deg, q);
    let s1 = compose_degree(j(p.m2, la.m1, la.m2), q, r0_full);
    let r1 = compose_degree(j(p.d, la.m2, la.m), y_deg, s1);
    let r0 = r0_full;
    let row_len = la.m.min(la.m1);
    let rows: Vec<usize> = match id {
        Some(id) => id.iter().flat_map(|b| if b { [r1, r0] } else { [r0, r1] }).collect(),
        None => vec![r0.max(r1); 2 * p.a],
    };
    let mut merger = Vec::with_capacity(rows.len());
    let mut s = rows.first().copied().unwrap_or(0);
    merger.push(s);
    for (i, &row) in rows.iter().enumerate().skip(1) {
        let (seed_prev, mid, seed) = (p.nipm.seed[i - 1], p.nipm.mid[i - 1], p.nipm.seed[i]);
        let r = compose_degree(j(p.n, seed_prev, mid), x_deg, s);
        s = compose_degree(j(row_len, mid, seed), row, r);
        merger.push(s);
    }
    DegreeLedger { q, r0_full, s1, r0, r1, merger, out: s }
}
