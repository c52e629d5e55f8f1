//! The directional affine extractor pipeline.
//!
//! `x` is cut into `t` blocks. Each block is condensed and paired by inner
//! products against rows condensed from all of `x`; the resulting
//! somewhere-random matrix seeds an extraction from `x`, which is tagged with
//! advice bits read from `Enc(x)`. The tagged seed drives a non-malleable
//! extractor against every global condenser row, the outputs pass through
//! the advice correlation breaker, and a last extraction feeds `c_i`-wise
//! products. Blocks are XORed into `z`, and `z` is compressed by the rows of
//! a code generator.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_rational::BigRational;

use crate::bits::BitVec;
use crate::cbreak::{degree_ledger, ldacb, CBParams};
use crate::condense::{scond, SomewhereCondenser};
use crate::dimexp::{search_dimension_expander, Certification, DimExpander, SearchConfig};
use crate::dist::ratio;
use crate::error::{ensure_dim, Error, Result};
use crate::snmext::{default_indices, SnmExtractor};
use crate::xprims::codes::LinearCode;
use crate::xprims::ip::InnerProduct;
use crate::xprims::lsext::{compose_degree, ExtractorProfile};
use crate::xprims::srext::{affine_srext_with, fold_degree, SrStrategy};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Runs the data flow at any widths; analysis inequalities are reported.
    Structural,
    /// Small product sizes so that the output bias is measurable.
    Statistical,
}

/// Where the condenser expanders come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpanderSpec {
    pub degree: usize,
    pub seed: u64,
    /// Sampled certification trials per subspace dimension.
    pub trials: u64,
    pub target_alpha: (u64, u64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineParams {
    pub n: usize,
    /// Entropy rate the instance is sized for.
    pub delta: (u64, u64),
    /// Number of blocks.
    pub t: usize,
    pub expanders: ExpanderSpec,
    /// Affine steps before and after the global condenser split.
    pub h1: usize,
    pub r: usize,
    /// Per-block condenser depth.
    pub h2: usize,
    /// Depth of the second global condenser before its `log t` extra steps.
    pub h3: usize,
    /// Field degree of the inner products, which is also their output width.
    pub ip_m: usize,
    pub sr: SrStrategy,
    /// Output of the first seeded extraction.
    pub m_prime: usize,
    /// Number of advice blocks.
    pub k_blocks: usize,
    pub enc: LinearCode,
    /// Non-malleable extractor output bits.
    pub n1: usize,
    pub cb: CBParams,
    /// Number of product bits, the length of `z`.
    pub m1: usize,
    /// Product sizes per block.
    pub c: Vec<usize>,
    /// Degree constant used to derive `c`.
    pub c_delta: usize,
    pub g: LinearCode,
    pub beta_prime: (u64, u64),
    pub profile: ExtractorProfile,
    pub mode: Mode,
}

/// One inequality with its status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    /// Width checks block execution; the rest are reported only.
    pub hard: bool,
    pub holds: bool,
    pub detail: String,
}

fn check(name: &str, hard: bool, holds: bool, detail: String) -> Check {
    Check { name: name.to_string(), hard, holds, detail }
}

fn log2_exact(v: usize) -> Option<usize> {
    v.is_power_of_two().then(|| v.trailing_zeros() as usize)
}

fn ceil_log2(v: usize) -> usize {
    if v <= 1 {
        0
    } else {
        (usize::BITS - (v - 1).leading_zeros()) as usize
    }
}

/// Block count the analysis asks for: `2^⌈log(10/δ)⌉`.
pub fn theory_blocks(delta: (u64, u64)) -> usize {
    let (p, q) = delta;
    let mut t = 1usize;
    // smallest power of two with t·p ≥ 10·q
    while (t as u128) * (p as u128) < 10 * q as u128 {
        t *= 2;
    }
    t
}

impl PipelineParams {
    /// The desk-scale instance for `n` (a power of two, at least 64). Two
    /// blocks, degree-3 expanders, one condenser step per stage.
    pub fn desk(n: usize, delta: (u64, u64), mode: Mode) -> Result<Self> {
        if n < 64 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(alloc::format!("desk pipeline needs n a power of two ≥ 64, got {n}")));
        }
        if delta.0 == 0 || delta.0 > delta.1 {
            return Err(Error::InvalidParameter("entropy rate must lie in (0, 1]".into()));
        }
        let t = 2;
        let degree: usize = 3;
        // global rows stay within the widest non-malleable extractor
        let steps = (n.trailing_zeros() as usize).saturating_sub(6).max(1);
        let sc_width = n >> steps;
        let seed_len = sc_width / 2 - 1;
        let enc = LinearCode::extended_hamming().tiled(n / 4)?;
        let enc_len = enc.n_code();
        // most advice blocks whose indices still fit in the first extraction
        let mut k_blocks = 1;
        let mut kb = 1;
        while kb <= seed_len {
            if enc_len % kb == 0 && kb * ceil_log2(enc_len / kb) + kb <= seed_len {
                k_blocks = kb;
            }
            kb *= 2;
        }
        let m_prime = seed_len - k_blocks;
        let n1 = (3 * n / 16).min(sc_width / 2);
        let rows: usize = (2 * degree + 2).pow(steps as u32);
        let a = log2_exact(rows).expect("power of two rows");
        let cb = CBParams::toy(n, n1, a)?;
        let m1 = 8;
        let mut p = PipelineParams {
            n,
            delta,
            t,
            expanders: ExpanderSpec { degree, seed: 0, trials: 48, target_alpha: (1, 4) },
            h1: 0,
            r: steps,
            h2: 1,
            h3: 1,
            ip_m: 8,
            sr: SrStrategy::default_for(8),
            m_prime,
            k_blocks,
            enc,
            n1,
            cb,
            m1,
            c: Vec::new(),
            c_delta: 0,
            g: LinearCode::extended_hamming(),
            beta_prime: (1, 2),
            profile: ExtractorProfile::Polynomial,
            mode,
        };
        p.c_delta = match mode {
            Mode::Structural => p.degrees().w,
            Mode::Statistical => 1,
        };
        p.c = product_sizes(t, p.c_delta);
        p.validate()?;
        Ok(p)
    }

    pub fn sc_rows(&self) -> usize {
        (2 * self.expanders.degree + 2).pow((self.h1 + self.r) as u32)
    }

    pub fn sc_width(&self) -> usize {
        self.n >> (self.h1 + self.r)
    }

    pub fn block_len(&self) -> usize {
        self.n / self.t
    }

    pub fn y_rows(&self) -> usize {
        (2 * self.expanders.degree + 2).pow(self.h2 as u32)
    }

    pub fn y_width(&self) -> usize {
        self.block_len() >> self.h2
    }

    pub fn log_t(&self) -> usize {
        log2_exact(self.t).unwrap_or(0)
    }

    pub fn x_prime_rows(&self) -> usize {
        (2 * self.expanders.degree + 2).pow((self.h3 + self.log_t()) as u32)
    }

    pub fn x_prime_width(&self) -> usize {
        self.n >> (self.h3 + self.log_t())
    }

    pub fn sr_rows(&self) -> usize {
        self.x_prime_rows() * self.y_rows()
    }

    /// Width of one index block of `u_i1`.
    pub fn index_width(&self) -> usize {
        ceil_log2(self.enc.n_code() / self.k_blocks.max(1))
    }

    pub fn u1_len(&self) -> usize {
        self.k_blocks * self.index_width()
    }

    pub fn n2(&self) -> usize {
        self.cb.out_len()
    }

    pub fn out_len(&self) -> usize {
        (self.beta_prime.0 as usize * self.m1) / self.beta_prime.1 as usize
    }

    /// Every width constraint (hard) and analysis inequality (reported).
    pub fn checks(&self) -> Vec<Check> {
        let n = self.n;
        let mut out = Vec::new();
        out.push(check(
            "t divides n",
            true,
            self.t > 0 && n.is_multiple_of(self.t),
            alloc::format!("n = {n}, t = {}", self.t),
        ));
        out.push(check("t is a power of two", true, self.t.is_power_of_two(), alloc::format!("t = {}", self.t)));
        out.push(check(
            "global condenser halves evenly",
            true,
            n.is_multiple_of(1 << (self.h1 + self.r)) && self.sc_width() >= 4 && self.sc_width().is_multiple_of(2),
            alloc::format!("sc rows of {} bits", self.sc_width()),
        ));
        out.push(check(
            "block condenser halves evenly",
            true,
            self.block_len().is_multiple_of(1 << self.h2) && self.y_width() >= 1,
            alloc::format!("y rows of {} bits", self.y_width()),
        ));
        out.push(check(
            "x′ rows match y rows",
            true,
            self.x_prime_width() == self.y_width() && n.is_multiple_of(1 << (self.h3 + self.log_t())),
            alloc::format!("{} vs {}", self.x_prime_width(), self.y_width()),
        ));
        out.push(check(
            "inner product field fits a row",
            true,
            self.ip_m >= 1 && self.ip_m <= self.y_width() && self.ip_m <= 63,
            alloc::format!("ip_m = {}, row = {}", self.ip_m, self.y_width()),
        ));
        if let SrStrategy::Fold { seed_width } = self.sr {
            out.push(check(
                "fold seed fits",
                true,
                seed_width >= 1 && seed_width <= self.ip_m,
                alloc::format!("w = {seed_width}"),
            ));
        }
        let seed_len = self.sc_width() / 2 - 1;
        out.push(check(
            "m′ + k = non-malleable seed",
            true,
            self.m_prime + self.k_blocks == seed_len,
            alloc::format!("{} + {} vs {seed_len}", self.m_prime, self.k_blocks),
        ));
        out.push(check(
            "Enc splits into k blocks",
            true,
            self.k_blocks >= 1 && self.enc.n_code().is_multiple_of(self.k_blocks),
            alloc::format!("{} bits, k = {}", self.enc.n_code(), self.k_blocks),
        ));
        out.push(check("Enc takes x", true, self.enc.k() == n, alloc::format!("message {}", self.enc.k())));
        out.push(check(
            "u_i1 fits in u_i",
            true,
            self.u1_len() <= self.m_prime,
            alloc::format!("{} ≤ {}", self.u1_len(), self.m_prime),
        ));
        out.push(check(
            "n1 within the extractor",
            true,
            self.n1 >= 1 && self.n1 <= self.sc_width() / 2,
            alloc::format!("n1 = {}", self.n1),
        ));
        out.push(check(
            "advice bits address every row",
            true,
            self.sc_rows().is_power_of_two() && 1 << self.cb.a == self.sc_rows(),
            alloc::format!("a = {}, rows = {}", self.cb.a, self.sc_rows()),
        ));
        out.push(check(
            "correlation breaker shapes",
            true,
            self.cb.n == n && self.cb.d == self.n1 && self.cb.check_widths().is_ok(),
            alloc::format!("n = {}, d = {}", self.cb.n, self.cb.d),
        ));
        out.push(check("one product size per block", true, self.c.len() == self.t, alloc::format!("{:?}", self.c)));
        out.push(check("product sizes positive", true, self.c.iter().all(|&c| c >= 1), alloc::format!("{:?}", self.c)));
        out.push(check(
            "G codewords have m1 bits",
            true,
            self.g.n_code() == self.m1,
            alloc::format!("{} vs {}", self.g.n_code(), self.m1),
        ));
        out.push(check(
            "β′m1 ≤ rows of G",
            true,
            self.out_len() >= 1 && self.out_len() <= self.g.k(),
            alloc::format!("{} ≤ {}", self.out_len(), self.g.k()),
        ));
        // analysis side
        let tt = theory_blocks(self.delta);
        out.push(check(
            "t = 2^⌈log(10/δ)⌉",
            false,
            self.t == tt,
            alloc::format!("t = {}, analysis wants {tt}", self.t),
        ));
        out.push(check(
            "m′ ≥ 100·n1",
            false,
            self.m_prime >= 100 * self.n1,
            alloc::format!("{} vs {}", self.m_prime, self.n1),
        ));
        out.push(check(
            "m′ ≥ 10000·n2",
            false,
            self.m_prime >= 10000 * self.n2(),
            alloc::format!("n2 = {}", self.n2()),
        ));
        let n3_max = self.c.iter().max().copied().unwrap_or(0) * self.m1;
        out.push(check("m′ ≥ 10⁶·n3", false, self.m_prime >= 1_000_000 * n3_max, alloc::format!("n3 = {n3_max}")));
        out.push(check(
            "|u_i1| ≤ n1/10",
            false,
            10 * self.u1_len() <= self.n1,
            alloc::format!("{} vs {}", self.u1_len(), self.n1),
        ));
        let dom = self.c.windows(2).all(|w| w[0] > self.c_delta * w[1]);
        out.push(check("c_i > c(δ)·c_(i+1)", false, dom, alloc::format!("c = {:?}, c(δ) = {}", self.c, self.c_delta)));
        let dw = self.degrees().w;
        out.push(check(
            "c(δ) covers the degree of w",
            false,
            self.c_delta >= dw,
            alloc::format!("c(δ) = {}, deg w ≤ {dw}", self.c_delta),
        ));
        let rate =
            (self.g.k() as u128) * (self.beta_prime.1 as u128) >= (self.m1 as u128) * (self.beta_prime.0 as u128);
        out.push(check(
            "β′ ≤ rate of G",
            false,
            rate,
            alloc::format!("β′ = {}/{}", self.beta_prime.0, self.beta_prime.1),
        ));
        out.push(check(
            "correlation breaker analysis",
            false,
            self.cb.theory_holds(),
            "see its constraint list".into(),
        ));
        out
    }

    pub fn validate(&self) -> Result<()> {
        for c in self.checks() {
            if c.hard && !c.holds {
                return Err(Error::WidthSchedule { stage: c.name, detail: c.detail });
            }
        }
        Ok(())
    }

    /// Degree bounds per stage as polynomials in the bits of `x`, capped at `n`.
    pub fn degrees(&self) -> PipelineDegrees {
        let cap = |d: usize| d.min(self.n);
        let j = |d: usize, m: usize| self.profile.joint_degree_at(self.n, d, m);
        let sr = cap(2);
        let r = cap(match self.sr {
            SrStrategy::Fold { .. } => fold_degree(self.sr_rows(), sr),
            SrStrategy::Xor => sr,
        });
        let u = cap(compose_degree(j(self.ip_m, self.m_prime), 1, r));
        // index selection is a multiplexer on the index bits
        let h = cap(self.index_width() * u + 1);
        let u_tilde = u.max(h);
        // carry chain of the seed-to-element map, then a square
        let seed_len = self.m_prime + self.k_blocks;
        let sn = cap(1 + 2 * seed_len * u_tilde);
        let y_tilde = cap(degree_ledger(&self.cb, 1, sn, None).out);
        let c_max = self.c.iter().copied().max().unwrap_or(1);
        let w = cap(compose_degree(j(self.n2(), self.m1 * c_max), 1, y_tilde));
        let v: Vec<usize> = self.c.iter().map(|&c| cap(c * w)).collect();
        let z = v.iter().copied().max().unwrap_or(0);
        PipelineDegrees { sr, r, u, h, u_tilde, sn, y_tilde, w, v, z }
    }
}

/// `c_t = 1`, `c_i = c(δ)·c_(i+1) + 1`.
pub fn product_sizes(t: usize, c_delta: usize) -> Vec<usize> {
    let mut c = alloc::vec![1usize; t];
    for i in (0..t.saturating_sub(1)).rev() {
        c[i] = c_delta * c[i + 1] + 1;
    }
    c
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineDegrees {
    pub sr: usize,
    pub r: usize,
    pub u: usize,
    pub h: usize,
    pub u_tilde: usize,
    pub sn: usize,
    pub y_tilde: usize,
    pub w: usize,
    pub v: Vec<usize>,
    pub z: usize,
}

/// Intermediates of one block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockTrace {
    pub y_rows: Vec<BitVec>,
    pub sr: Vec<BitVec>,
    pub r: BitVec,
    pub u: BitVec,
    pub h: BitVec,
    pub u_tilde: BitVec,
    pub sn: Vec<BitVec>,
    pub y_tilde: BitVec,
    pub w: BitVec,
    pub v: BitVec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRecord {
    pub sc: Vec<BitVec>,
    pub x_prime: Vec<BitVec>,
    pub enc: BitVec,
    pub blocks: Vec<BlockTrace>,
    pub z: BitVec,
}

/// A validated parameter set with its condensers, fields and codes built.
#[derive(Clone, Debug)]
pub struct Pipeline {
    params: PipelineParams,
    expanders: Vec<DimExpander>,
    sc: SomewhereCondenser,
    block: SomewhereCondenser,
    x_prime: SomewhereCondenser,
    ip: InnerProduct,
    snm: SnmExtractor,
    indices: Vec<usize>,
}

impl Pipeline {
    pub fn build(params: PipelineParams) -> Result<Self> {
        params.validate()?;
        if params.g.certified_distance().is_none() {
            return Err(Error::Uncertified("code G has no certified distance".into()));
        }
        // one expander per halved width any condenser needs
        let mut dims: Vec<usize> = Vec::new();
        let mut need = |start: usize, steps: usize| {
            let mut w = start;
            for _ in 0..steps {
                w /= 2;
                if !dims.contains(&w) {
                    dims.push(w);
                }
            }
        };
        need(params.n, params.h1 + params.r);
        need(params.block_len(), params.h2);
        need(params.n, params.h3 + params.log_t());
        dims.sort_unstable();
        let spec = &params.expanders;
        let mut expanders = Vec::with_capacity(dims.len());
        for &dim in &dims {
            let mut cfg = SearchConfig::new(
                dim,
                spec.degree,
                ratio(spec.target_alpha.0 as u128, spec.target_alpha.1 as u128),
                spec.seed ^ (dim as u64) << 32,
            );
            cfg.certification = if dim <= 8 {
                Certification::Exhaustive { budget: 1 << 32 }
            } else {
                Certification::Sampled { trials: spec.trials }
            };
            expanders.push(search_dimension_expander(&cfg)?);
        }
        let sc = scond(&expanders, params.n, params.h1 + params.r)?;
        let block = scond(&expanders, params.block_len(), params.h2)?;
        let x_prime = scond(&expanders, params.n, params.h3 + params.log_t())?;
        let ip = InnerProduct::new(params.ip_m)?;
        let snm = SnmExtractor::new(params.sc_width())?;
        let indices = default_indices(params.n1);
        Ok(Pipeline { params, expanders, sc, block, x_prime, ip, snm, indices })
    }

    pub fn params(&self) -> &PipelineParams {
        &self.params
    }

    pub fn expanders(&self) -> &[DimExpander] {
        &self.expanders
    }

    pub fn global_condenser(&self) -> &SomewhereCondenser {
        &self.sc
    }

    pub fn block_condenser(&self) -> &SomewhereCondenser {
        &self.block
    }

    pub fn x_prime_condenser(&self) -> &SomewhereCondenser {
        &self.x_prime
    }

    pub fn run(&self, x: &BitVec) -> Result<(BitVec, TraceRecord)> {
        let p = &self.params;
        ensure_dim("pipeline input", p.n, x.len())?;
        let sc = self.sc.apply(x)?;
        let x_prime = self.x_prime.apply(x)?;
        let enc = p.enc.encode(x)?;
        let mut blocks = Vec::with_capacity(p.t);
        let mut z = BitVec::zeros(p.m1);
        for (i, &c) in p.c.iter().enumerate() {
            let xi = x.slice(i * p.block_len(), p.block_len());
            let y_rows = self.block.apply(&xi)?;
            let mut sr = Vec::with_capacity(p.sr_rows());
            for xp in &x_prime {
                for y in &y_rows {
                    sr.push(self.ip.eval(xp, y)?);
                }
            }
            let r = affine_srext_with(&sr, p.sr)?;
            let u = p.profile.extract(x, &r, p.m_prime)?;
            let h = advice(&u.prefix(p.u1_len()), &enc, p.k_blocks)?;
            let u_tilde = u.concat(&h);
            let mut sn = Vec::with_capacity(sc.len());
            let mut y_tilde = BitVec::zeros(p.n2());
            for (j, row) in sc.iter().enumerate() {
                let s = self.snm.eval(row, &u_tilde, &self.indices)?;
                let id = BitVec::from_u64(p.cb.a, j as u64);
                y_tilde ^= &ldacb(x, &s, &id, &p.cb)?;
                sn.push(s);
            }
            let w = p.profile.extract(x, &y_tilde, p.m1 * c)?;
            let mut v = BitVec::zeros(p.m1);
            for j in 0..p.m1 {
                v.set(j, (j * c..(j + 1) * c).all(|l| w.get(l)));
            }
            z ^= &v;
            blocks.push(BlockTrace { y_rows, sr, r, u, h, u_tilde, sn, y_tilde, w, v });
        }
        let trace = TraceRecord { sc, x_prime, enc, blocks, z: z.clone() };
        check_trace(p, &trace)?;
        Ok((z, trace))
    }

    pub fn daext_core(&self, x: &BitVec) -> Result<BitVec> {
        Ok(self.run(x)?.0)
    }

    pub fn daext(&self, x: &BitVec) -> Result<BitVec> {
        let z = self.daext_core(x)?;
        disperser_to_extractor(&z, &self.params.g, self.params.beta_prime)
    }
}

/// Checks every trace width against the parameters.
pub fn check_trace(p: &PipelineParams, t: &TraceRecord) -> Result<()> {
    let bad = |stage: &str, want: usize, got: usize| Error::WidthSchedule {
        stage: stage.to_string(),
        detail: alloc::format!("expected {want} bits, found {got}"),
    };
    let rows = |stage: &str, v: &[BitVec], count: usize, width: usize| -> Result<()> {
        if v.len() != count {
            return Err(bad(stage, count, v.len()));
        }
        match v.iter().find(|r| r.len() != width) {
            Some(r) => Err(bad(stage, width, r.len())),
            None => Ok(()),
        }
    };
    rows("sc", &t.sc, p.sc_rows(), p.sc_width())?;
    rows("x′", &t.x_prime, p.x_prime_rows(), p.x_prime_width())?;
    if t.blocks.len() != p.t {
        return Err(bad("blocks", p.t, t.blocks.len()));
    }
    for (b, &c) in t.blocks.iter().zip(&p.c) {
        rows("y", &b.y_rows, p.y_rows(), p.y_width())?;
        rows("sr", &b.sr, p.sr_rows(), p.ip_m)?;
        rows("sn", &b.sn, p.sc_rows(), p.n1)?;
        for (stage, v, want) in [
            ("r", &b.r, p.ip_m),
            ("u", &b.u, p.m_prime),
            ("h", &b.h, p.k_blocks),
            ("ũ", &b.u_tilde, p.m_prime + p.k_blocks),
            ("ỹ", &b.y_tilde, p.n2()),
            ("w", &b.w, p.m1 * c),
            ("v", &b.v, p.m1),
        ] {
            if v.len() != want {
                return Err(bad(stage, want, v.len()));
            }
        }
    }
    if t.z.len() != p.m1 {
        return Err(bad("z", p.m1, t.z.len()));
    }
    Ok(())
}

/// Bit `j` of the result is the bit of block `j` of `enc_x` addressed by
/// index block `j` of `u1`. Index values wrap modulo the block size.
pub fn advice(u1: &BitVec, enc_x: &BitVec, k_blocks: usize) -> Result<BitVec> {
    if k_blocks == 0 || !enc_x.len().is_multiple_of(k_blocks) || !u1.len().is_multiple_of(k_blocks) {
        return Err(Error::InvalidParameter(alloc::format!(
            "cannot split {} code bits and {} index bits into {k_blocks} blocks",
            enc_x.len(),
            u1.len()
        )));
    }
    let block = enc_x.len() / k_blocks;
    let w = u1.len() / k_blocks;
    if w < ceil_log2(block) {
        return Err(Error::InvalidParameter(alloc::format!(
            "index blocks of {w} bits cannot address {block} positions"
        )));
    }
    let mut h = BitVec::zeros(k_blocks);
    for j in 0..k_blocks {
        let idx = u1.slice(j * w, w).to_u64() as usize % block;
        h.set(j, enc_x.get(j * block + idx));
    }
    Ok(h)
}

/// `Pr_u[advice(u, a) = advice(u, b)]` by enumerating every index string.
pub fn advice_collision(a: &BitVec, b: &BitVec, k_blocks: usize) -> Result<BigRational> {
    ensure_dim("codeword", a.len(), b.len())?;
    let block = a.len() / k_blocks.max(1);
    let w = ceil_log2(block);
    let bits = k_blocks * w;
    if bits > 24 {
        return Err(Error::BudgetExceeded { what: "advice enumeration", needed: 1 << bits, budget: 1 << 24 });
    }
    let mut same = 0u128;
    for u in 0..1u64 << bits {
        let u1 = BitVec::from_u64(bits, u);
        if advice(&u1, a, k_blocks)? == advice(&u1, b, k_blocks)? {
            same += 1;
        }
    }
    Ok(ratio(same, 1u128 << bits))
}

/// `Π_j (1 − ℓ_j/B)` where `ℓ_j` counts disagreements in block `j`.
pub fn advice_collision_formula(a: &BitVec, b: &BitVec, k_blocks: usize) -> Result<BigRational> {
    ensure_dim("codeword", a.len(), b.len())?;
    let block = a.len() / k_blocks.max(1);
    let diff = a ^ b;
    let mut num = 1u128;
    let mut den = 1u128;
    for j in 0..k_blocks {
        let l = diff.slice(j * block, block).weight() as u128;
        num *= block as u128 - l;
        den *= block as u128;
    }
    Ok(ratio(num, den))
}

/// `o_i = ⊕_{j ∈ supp(G_i)} z_j` for the first `β′·m1` rows of `G`.
pub fn disperser_to_extractor(z: &BitVec, g: &LinearCode, beta_prime: (u64, u64)) -> Result<BitVec> {
    if g.certified_distance().is_none() {
        return Err(Error::Uncertified("code G has no certified distance".into()));
    }
    ensure_dim("z", g.n_code(), z.len())?;
    let out = (beta_prime.0 as usize * z.len()) / beta_prime.1.max(1) as usize;
    if out > g.k() {
        return Err(Error::InvalidParameter(alloc::format!("{out} output bits but G has {} rows", g.k())));
    }
    let mut o = BitVec::zeros(out);
    for i in 0..out {
        o.set(i, g.generator().row(i).dot(z));
    }
    Ok(o)
}
