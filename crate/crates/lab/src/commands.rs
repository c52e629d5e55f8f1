//! Verb implementations. Each returns a JSON report; files named by `--out`
//! flags are written as a side effect.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, ensure, Context, Result};
use dalab_core::affine::AffineSource;
use dalab_core::anf::anf_of;
use dalab_core::cbreak::{degree_ledger, ldacb, CBParams};
use dalab_core::condense::{
    ceil_times, verify_affine_condenser, verify_general_condenser, SomewhereCondenser, VerifyMode,
};
use dalab_core::daext::{check_trace, Mode as PipelineMode, Pipeline, PipelineParams};
use dalab_core::dimexp::{search_dimension_expander, Certification, DimExpander, SearchConfig};
use dalab_core::field::GF2k;
use dalab_core::injector::{check_distinctness, sample_injector, search_pool, verify_injector};
use dalab_core::lbp::{catalog, correlation, cut_probabilities, robp_cut, subspace_indicator, CorrelationMode};
use dalab_core::matrix::rank_u64;
use dalab_core::snmext::{default_indices, seeded_distance, verify_nonmalleability, SnmExtractor};
use dalab_core::verify::{
    affine_extractor_distance, directional_bias, disperser_check, eps_bias_check, sampled_directional_fn, Definition,
    Mode, TruthTable,
};
use dalab_core::xprims::ip;
use dalab_core::{BitVec, GF2Matrix};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cli::*;
use crate::format::{self, parse_input, write_bitvec};
use crate::par;
use crate::report::{self, q, CBConfig, ProgramFile};

/// Settings shared by every verb.
#[derive(Clone, Copy, Debug)]
pub struct Ctx {
    pub seed: u64,
    pub budget: u128,
}

impl Ctx {
    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn path_str(p: &Option<std::path::PathBuf>) -> Value {
    p.as_ref().map_or(Value::Null, |p| Value::String(p.display().to_string()))
}

/// Report envelope: the verb path, the seed, the result and a pass flag.
pub fn envelope(command: &str, ctx: &Ctx, result: Value) -> Value {
    let passed = result.get("passed").cloned().unwrap_or(Value::Null);
    json!({ "command": command, "seed": ctx.seed, "result": result, "passed": passed })
}

pub fn run(cmd: &Command, ctx: &Ctx) -> Result<Value> {
    let (name, result) = match cmd {
        Command::Condense(c) => condense(c, ctx)?,
        Command::Daext(c) => daext(c, ctx)?,
        Command::Snmext(c) => snmext(c, ctx)?,
        Command::Cbreak(c) => cbreak(c, ctx)?,
        Command::Lbp(c) => lbp(c, ctx)?,
        Command::Injector(c) => injector(c, ctx)?,
        Command::Verify(c) => verify(c, ctx)?,
        Command::Campaign(_) => bail!("campaigns cannot be nested"),
    };
    Ok(envelope(name, ctx, result))
}

// ---------------------------------------------------------------- condense

fn search_expander(n: usize, d: usize, ctx: &Ctx) -> Result<DimExpander> {
    // exhaustive certification is cheap up to n = 8
    let mut cfg = SearchConfig::new(n, d, BigRational::from_integer(0.into()), ctx.seed ^ n as u64);
    if n > 8 {
        cfg.certification = Certification::Sampled { trials: 256 };
    }
    Ok(search_dimension_expander(&cfg)?)
}

fn family(a: &FamilyArgs, ctx: &Ctx) -> Result<(usize, Vec<DimExpander>, usize)> {
    let n = a.n.ok_or_else(|| anyhow!("--n is required without --condenser"))?;
    let mut loaded: Vec<DimExpander> =
        a.expander.iter().map(|p| format::parse_expander(&read(p)?)).collect::<Result<_>>()?;
    let depth = match (a.depth, &a.delta) {
        (Some(h), _) => h,
        (None, Some(delta)) => {
            // the depth rule needs an alpha; take the weakest expander on hand
            let first = match loaded.iter().find(|e| e.n == n / 2) {
                Some(e) => e.clone(),
                None => search_expander(n / 2, a.d, ctx)?,
            };
            let alpha = loaded.iter().map(|e| e.alpha.clone()).chain([first.alpha.clone()]).min().unwrap();
            dalab_core::condense::choose_depth(&format::parse_ratio(delta)?, &alpha, first.maps.len())?
        }
        (None, None) => 1,
    };
    ensure!(depth >= 1 && n % (1 << depth) == 0, "n = {n} cannot be halved {depth} times");
    for s in 1..=depth {
        let dim = n >> s;
        if !loaded.iter().any(|e| e.n == dim) {
            loaded.push(search_expander(dim, a.d, ctx)?);
        }
    }
    Ok((n, loaded, depth))
}

fn build_condenser(a: &FamilyArgs, ctx: &Ctx) -> Result<SomewhereCondenser> {
    let (n, fam, depth) = family(a, ctx)?;
    Ok(match a.kind {
        Kind::Affine => dalab_core::condense::scond(&fam, n, depth)?,
        Kind::General => dalab_core::condense::sgcond(&fam, n, depth)?,
    })
}

/// Default target rate for the best row: `δ·Π(1 + α/(4d))`,
/// capped at 1.
pub fn default_gamma(c: &SomewhereCondenser, k: usize) -> BigRational {
    let mut g = BigRational::new(BigInt::from(k), BigInt::from(c.n_in));
    for s in &c.steps {
        g *= BigRational::one() + &s.alpha / BigRational::from_integer(BigInt::from(4 * s.degree));
    }
    g.min(BigRational::one())
}

fn condense(c: &CondenseCmd, ctx: &Ctx) -> Result<(&'static str, Value)> {
    match c {
        CondenseCmd::Expander(a) => {
            let mut cfg = SearchConfig::new(a.n, a.d, format::parse_ratio(&a.alpha)?, ctx.seed);
            cfg.max_tries = a.max_tries;
            cfg.certification = match a.trials {
                Some(trials) => Certification::Sampled { trials },
                None => Certification::Exhaustive { budget: ctx.budget },
            };
            let e = search_dimension_expander(&cfg)?;
            if let Some(out) = &a.out {
                write(out, &format::write_expander(&e))?;
            }
            let mut r = report::expander(&e);
            r["out"] = path_str(&a.out);
            Ok(("condense expander", r))
        }
        CondenseCmd::Build(a) => {
            let c = build_condenser(&a.family, ctx)?;
            if let Some(out) = &a.out {
                write(out, &format::write_condenser(&c))?;
            }
            let mut r = report::condenser(&c);
            r["out"] = path_str(&a.out);
            Ok(("condense build", r))
        }
        CondenseCmd::Verify(a) => {
            let c = match &a.condenser {
                Some(p) => format::parse_condenser(&read(p)?)?,
                None => build_condenser(&a.family, ctx)?,
            };
            let mut r = json!({ "condenser": report::condenser(&c) });
            if c.kind.is_general() {
                ensure!(a.k <= 20, "flat support of 2^{} points is too large", a.k);
                let mut rng = ctx.rng(1);
                let support: Vec<BitVec> = (0..1usize << a.k)
                    .map(|_| {
                        let words: Vec<u64> = (0..c.n_in.div_ceil(64)).map(|_| rand::Rng::gen(&mut rng)).collect();
                        BitVec::from_words(c.n_in, &words)
                    })
                    .collect();
                let g = verify_general_condenser(&c, &support, 1 << a.k, a.l, ctx.budget)?;
                r["general"] = report::general_condenser(&g);
                // a measurement unless a target rate is given
                if let Some(gamma) = &a.gamma {
                    let gamma = format::parse_ratio(gamma)?;
                    r["gamma"] = q(&gamma);
                    r["passed"] = json!(g.smooth_entropy >= ceil_times(&gamma, c.m_out));
                }
            } else {
                let gamma = match &a.gamma {
                    Some(s) => format::parse_ratio(s)?,
                    None => default_gamma(&c, a.k),
                };
                let threshold = ceil_times(&gamma, c.m_out);
                let rep = match a.samples {
                    Some(samples) if !a.exhaustive => {
                        verify_affine_condenser(&c, a.k, &gamma, &VerifyMode::Sampled { samples, seed: ctx.seed })?
                    }
                    _ if c.n_in <= 64 && c.m_out <= 64 => par::affine_condenser(&c, a.k, threshold, ctx.budget)?,
                    _ => verify_affine_condenser(&c, a.k, &gamma, &VerifyMode::Exhaustive { budget: ctx.budget })?,
                };
                r["gamma"] = q(&gamma);
                r["affine"] = report::affine_condenser(&rep);
                r["passed"] = json!(rep.passed());
            }
            Ok(("condense verify", r))
        }
    }
}

// ---------------------------------------------------------------- daext

/// Params file: the desk instance is a pure function of these three.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PipelineFile {
    pub n: usize,
    pub delta: String,
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<Value>,
}

impl PipelineFile {
    pub fn params(&self) -> Result<PipelineParams> {
        let mode = match self.mode.as_str() {
            "structural" => PipelineMode::Structural,
            "statistical" => PipelineMode::Statistical,
            m => bail!("unknown pipeline mode {m:?}"),
        };
        Ok(PipelineParams::desk(self.n, format::parse_pair(&self.delta)?, mode)?)
    }
}

fn pipeline_file(a: &PipelineArgs) -> Result<PipelineFile> {
    match &a.params {
        Some(p) => Ok(serde_json::from_str(&read(p)?).with_context(|| format!("parsing {}", p.display()))?),
        None => Ok(PipelineFile {
            n: a.n.ok_or_else(|| anyhow!("--n is required without --params"))?,
            delta: a.delta.clone(),
            mode: match a.mode {
                PipeMode::Structural => "structural",
                PipeMode::Statistical => "statistical",
            }
            .into(),
            checks: None,
        }),
    }
}

fn params_summary(p: &PipelineParams) -> Value {
    json!({
        "n": p.n,
        "t": p.t,
        "h1": p.h1, "r": p.r, "h2": p.h2, "h3": p.h3,
        "ip_m": p.ip_m,
        "m_prime": p.m_prime,
        "k_blocks": p.k_blocks,
        "n1": p.n1,
        "m1": p.m1,
        "c": p.c,
        "out_len": p.out_len(),
        "enc": { "k": p.enc.k(), "n": p.enc.n_code(), "distance": p.enc.certified_distance() },
        "profile": report::profile_name(&p.profile),
    })
}

fn daext(c: &DaextCmd, _ctx: &Ctx) -> Result<(&'static str, Value)> {
    match c {
        DaextCmd::Params { pipe, out } => {
            let mut f = pipeline_file(pipe)?;
            let p = f.params()?;
            let checks = p.checks();
            let hard_ok = checks.iter().all(|c| !c.hard || c.holds);
            f.checks = Some(report::checks(&checks));
            if let Some(out) = out {
                write(out, &(serde_json::to_string_pretty(&f)? + "\n"))?;
            }
            let r = json!({
                "params": params_summary(&p),
                "checks": report::checks(&checks),
                "out": path_str(out),
                "passed": hard_ok,
            });
            Ok(("daext params", r))
        }
        DaextCmd::Run { pipe, input, trace } => {
            let p = pipeline_file(pipe)?.params()?;
            let pl = Pipeline::build(p)?;
            let x = parse_input(input, pl.params().n)?;
            let (z, tr) = pl.run(&x)?;
            check_trace(pl.params(), &tr)?;
            let out = pl.daext(&x)?;
            if let Some(path) = trace {
                write(path, &(serde_json::to_string_pretty(&report::trace(&tr))? + "\n"))?;
            }
            let r = json!({
                "input": write_bitvec(&x),
                "z": write_bitvec(&z),
                "output": write_bitvec(&out),
                "trace": path_str(trace),
            });
            Ok(("daext run", r))
        }
    }
}

// ---------------------------------------------------------------- snmext

fn source(n: usize, k: usize, ctx: &Ctx) -> Result<AffineSource> {
    ensure!(k <= n, "source dimension {k} exceeds n = {n}");
    Ok(if k == n { AffineSource::full(n) } else { AffineSource::random(n, k, &mut ctx.rng(2)) })
}

fn snmext(c: &SnmextCmd, ctx: &Ctx) -> Result<(&'static str, Value)> {
    match c {
        SnmextCmd::Verify { n, ksrc, shift, m } => {
            let e = SnmExtractor::new(*n)?;
            let s = u64::from_str_radix(shift.trim_start_matches("0x"), 16).context("seed shift")?;
            let d = e.seed_len();
            ensure!(s != 0 && s < 1 << d, "shift must be a nonzero {d}-bit value");
            let x = source(*n, *ksrc, ctx)?;
            let r = verify_nonmalleability(&e, &x, |y| y ^ s, &default_indices(*m), ctx.budget)?;
            let mut v = report::nonmalleability(&r);
            v["shift"] = report::packed(d, s);
            v["modulus"] = json!(format!("{:x}", e.field().modulus()));
            Ok(("snmext verify", v))
        }
        SnmextCmd::Seeded { n, ksrc, m } => {
            let e = SnmExtractor::new(*n)?;
            let x = source(*n, *ksrc, ctx)?;
            let dist = seeded_distance(&e, &x, &default_indices(*m), ctx.budget)?;
            Ok(("snmext seeded", json!({ "n": n, "source_entropy": ksrc, "out_bits": m, "distance": q(&dist) })))
        }
        SnmextCmd::Linearity { n, m } => {
            let e = SnmExtractor::new(*n)?;
            ensure!(*n <= 24, "linearity sweep needs n ≤ 24");
            let idx = default_indices(*m);
            let seeds = 1u64 << e.seed_len();
            ensure!(((seeds as u128) << n) <= ctx.budget, "linearity sweep exceeds the budget");
            let mut failure = None;
            'outer: for y in 0..seeds {
                // f(x) must equal the xor of f on the set bits of x
                let basis: Vec<u64> = (0..*n).map(|i| e.eval_u64(1 << i, y, &idx)).collect();
                for x in 0..1u64 << n {
                    let want = (0..*n).filter(|&i| x >> i & 1 == 1).fold(0, |acc, i| acc ^ basis[i]);
                    if e.eval_u64(x, y, &idx) != want {
                        failure = Some(json!({ "seed": y, "x": report::packed(*n, x) }));
                        break 'outer;
                    }
                }
            }
            let passed = failure.is_none();
            Ok(("snmext linearity", json!({ "n": n, "seeds": seeds, "failure": failure, "passed": passed })))
        }
        SnmextCmd::Moduli { from, to, out } => {
            ensure!(from <= to && *from >= 2, "degree range {from}..={to}");
            let fields: Vec<GF2k> = (*from..=*to).map(GF2k::new).collect::<dalab_core::Result<_>>()?;
            let text = format::write_moduli(&fields);
            if let Some(out) = out {
                write(out, &text)?;
            }
            let table: Vec<String> = text.lines().map(str::to_string).collect();
            Ok(("snmext moduli", json!({ "moduli": table, "out": path_str(out) })))
        }
    }
}

// ---------------------------------------------------------------- cbreak

fn cb_params(s: &CbSource) -> Result<CBParams> {
    match &s.config {
        Some(p) => {
            let c: CBConfig = serde_json::from_str(&read(p)?).with_context(|| format!("parsing {}", p.display()))?;
            c.to_params()
        }
        None => {
            let n = s.n.ok_or_else(|| anyhow!("--n is required without --config"))?;
            let d = s.d.ok_or_else(|| anyhow!("--d is required without --config"))?;
            Ok(CBParams::toy(n, d, s.a)?)
        }
    }
}

fn cbreak(c: &CbreakCmd, _ctx: &Ctx) -> Result<(&'static str, Value)> {
    match c {
        CbreakCmd::Params { src, out } => {
            let p = cb_params(src)?;
            let cfg = CBConfig::from_params(&p);
            if let Some(out) = out {
                write(out, &(serde_json::to_string_pretty(&cfg)? + "\n"))?;
            }
            Ok(("cbreak params", json!({ "config": serde_json::to_value(&cfg)?, "out": path_str(out) })))
        }
        CbreakCmd::Validate { src } => {
            let p = cb_params(src)?;
            let cs = p.constraints();
            let widths_ok = p.check_widths().is_ok();
            Ok((
                "cbreak validate",
                json!({
                    "constraints": report::constraints(&cs),
                    "theory_holds": p.theory_holds(),
                    "structural_mode": p.structural_mode,
                    "passed": widths_ok,
                }),
            ))
        }
        CbreakCmd::Eval { src, x, y, id } => {
            let p = cb_params(src)?;
            let (x, y, id) = (parse_input(x, p.n)?, parse_input(y, p.d)?, parse_input(id, p.a)?);
            let out = ldacb(&x, &y, &id, &p)?;
            Ok(("cbreak eval", json!({ "output": write_bitvec(&out) })))
        }
        CbreakCmd::Degree { src, id, measure } => {
            let p = cb_params(src)?;
            let id = id.as_ref().map(|s| parse_input(s, p.a)).transpose()?;
            let l = degree_ledger(&p, 1, 1, id.as_ref());
            let mut r = json!({ "ledger": report::ledger(&l) });
            if *measure {
                let id = id.ok_or_else(|| anyhow!("--measure needs --id"))?;
                let vars = p.n + p.d;
                ensure!(vars <= 20, "measuring needs n + d ≤ 20, got {vars}");
                let outs: Vec<BitVec> = (0..1u64 << vars)
                    .map(|v| {
                        let x = BitVec::from_u64(p.n, v & ((1 << p.n) - 1));
                        let y = BitVec::from_u64(p.d, v >> p.n);
                        ldacb(&x, &y, &id, &p)
                    })
                    .collect::<dalab_core::Result<_>>()?;
                let mut degrees = Vec::new();
                for bit in 0..p.out_len() {
                    let mut tt = BitVec::zeros(1 << vars);
                    for (v, o) in outs.iter().enumerate() {
                        tt.set(v, o.get(bit));
                    }
                    degrees.push(anf_of(&tt)?.degree());
                }
                let passed = degrees.iter().all(|&d| d <= l.out);
                r["measured"] = json!(degrees);
                r["passed"] = json!(passed);
            }
            Ok(("cbreak degree", r))
        }
    }
}

// ---------------------------------------------------------------- lbp

type BoolFn = Box<dyn Fn(u64) -> bool + Sync + Send>;

fn parity_of(x: u64) -> bool {
    x.count_ones() % 2 == 1
}

/// Named functions of `n ≤ 64` packed input bits.
pub fn builtin(name: &str, n: usize) -> Result<BoolFn> {
    ensure!((1..=64).contains(&n), "builtins take 1 ≤ n ≤ 64");
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let half = n / 2;
    Ok(match name {
        "parity" => Box::new(move |x| parity_of(x & mask)),
        "and" => Box::new(move |x| x & mask == mask),
        "const0" => Box::new(|_| false),
        "const1" => Box::new(|_| true),
        "first" => Box::new(|x| x & 1 == 1),
        "majority" => Box::new(move |x| 2 * (x & mask).count_ones() as usize > n),
        "ip" => {
            ensure!(n.is_multiple_of(2), "ip needs even n");
            Box::new(move |x| {
                let v = BitVec::from_u64(n, x & mask);
                ip(&v.slice(0, half), &v.slice(half, half), 1).expect("widths agree").get(0)
            })
        }
        "bent" => {
            ensure!(n.is_multiple_of(2), "bent needs even n");
            Box::new(move |x| parity_of(x & x >> 1 & 0x5555_5555_5555_5555 & mask))
        }
        "and3xor" => {
            ensure!(n.is_multiple_of(3), "and3xor needs n divisible by 3");
            Box::new(move |x| (0..n / 3).filter(|&i| x >> (3 * i) & 7 == 7).count() % 2 == 1)
        }
        _ => bail!("unknown builtin {name:?}"),
    })
}

fn program(path: &Path) -> Result<dalab_core::lbp::LinearBP> {
    let f: ProgramFile = serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    f.to_program()
}

fn lbp(c: &LbpCmd, ctx: &Ctx) -> Result<(&'static str, Value)> {
    match c {
        LbpCmd::Eval { program: path, input } => {
            let p = program(path)?;
            let x = parse_input(input, p.n())?;
            Ok(("lbp eval", json!({ "input": write_bitvec(&x), "output": p.eval(&x)? })))
        }
        LbpCmd::Validate { program: path } => {
            let p = program(path)?;
            let strong = p.is_strongly_read_once();
            Ok((
                "lbp validate",
                json!({
                    "n": p.n(),
                    "size": p.size(),
                    "coordinate": p.is_coordinate(),
                    "weakly_read_once": report::read_once(&p.is_weakly_read_once()),
                    "strongly_read_once": report::read_once(&strong),
                }),
            ))
        }
        LbpCmd::Correlate { program: path, f, samples } => {
            let p = program(path)?;
            let name = f.strip_prefix("builtin:").ok_or_else(|| anyhow!("correlate takes builtin:NAME"))?;
            let g = builtin(name, p.n())?;
            let corr = match samples {
                Some(s) => correlation(&p, &g, CorrelationMode::Sample { samples: *s, seed: ctx.seed })?,
                None => {
                    ensure!(p.n() <= dalab_core::lbp::EXHAUSTIVE_MAX_N, "exhaustive correlation needs n ≤ 28");
                    ensure!(1u128 << p.n() <= ctx.budget, "exhaustive correlation exceeds the budget");
                    let agree = par::agreements(&p, &g);
                    dalab_core::lbp::Correlation::Exact(dalab_core::dist::ratio(agree as u128, 1u128 << p.n()))
                }
            };
            Ok(("lbp correlate", json!({ "f": f, "agreement": report::correlation(&corr) })))
        }
        LbpCmd::Cut { program: path, d } => {
            let p = program(path)?;
            let events = robp_cut(&p, *d)?;
            let probs = cut_probabilities(&p, *d)?;
            let total: BigRational = probs.values().cloned().sum();
            let len = p.nodes().len();
            let list: Vec<Value> = probs
                .iter()
                .map(|(e, pr)| {
                    json!({
                        "node": report::target(e.node, len),
                        "read_vars": e.read_vars,
                        "free_vars": e.free_vars,
                        "probability": q(pr),
                    })
                })
                .collect();
            Ok((
                "lbp cut",
                json!({ "d": d, "events": list, "support": events.len(), "total": q(&total), "passed": total.is_one() }),
            ))
        }
        LbpCmd::SeparationDemo { n, dim } => {
            ensure!(*n <= 28 && dim <= n, "separation demo needs dim ≤ n ≤ 28");
            let mut rng = ctx.rng(3);
            let basis = GF2Matrix::random_full_rank(*dim, *n, &mut rng);
            let p = subspace_indicator(&basis, &BitVec::zeros(*n))?;
            let rows = basis.to_u64_rows();
            let member = |x: u64| {
                let mut with = rows.clone();
                with.push(x);
                rank_u64(&with) == *dim
            };
            let agree = par::agreements(&p, &member);
            let strong = p.is_strongly_read_once();
            let size_ok = p.size() == n - dim;
            let passed = size_ok && strong.holds && agree == 1u64 << n;
            Ok((
                "lbp separation-demo",
                json!({
                    "n": n,
                    "dim": dim,
                    "basis": report::matrix(&basis),
                    "size": p.size(),
                    "strongly_read_once": report::read_once(&strong),
                    "agreements": agree,
                    "inputs": 1u64 << n,
                    "passed": passed,
                }),
            ))
        }
        LbpCmd::Catalog { name, n, width, out } => {
            let vars: Vec<usize> = (0..*n).collect();
            let p = match name {
                CatalogName::Parity => catalog::parity(*n, &vars)?,
                CatalogName::And => catalog::conjunction(*n, &vars)?,
                CatalogName::Tribes => catalog::tribes(*n, *width, n / width)?,
            };
            let f = ProgramFile::from_program(&p);
            if let Some(out) = out {
                write(out, &(serde_json::to_string_pretty(&f)? + "\n"))?;
            }
            Ok(("lbp catalog", json!({ "program": serde_json::to_value(&f)?, "out": path_str(out) })))
        }
    }
}

// ---------------------------------------------------------------- injector

fn injector(c: &InjectorCmd, ctx: &Ctx) -> Result<(&'static str, Value)> {
    match c {
        InjectorCmd::Sample { shape: s, out } => {
            let mut j = sample_injector(s.n, s.k1, s.k2, s.d, s.m, ctx.seed)?;
            let chk = verify_injector(&mut j, ctx.budget)?;
            if let Some(out) = out {
                write(out, &format::write_injector(&j))?;
            }
            let r = json!({
                "n": s.n, "k1": s.k1, "k2": s.k2, "d": s.d, "m": s.m,
                "check": report::injector_check(&chk, s.n),
                "out": path_str(out),
                "passed": chk.certified,
            });
            Ok(("injector sample", r))
        }
        InjectorCmd::Verify { injector: path, distinctness } => {
            let mut j = format::parse_injector(&read(path)?)?;
            let chk = verify_injector(&mut j, ctx.budget)?;
            let mut r = json!({
                "n": j.n(), "k1": j.k1(), "k2": j.k2(), "d": j.d(), "m": j.m(),
                "check": report::injector_check(&chk, j.n()),
            });
            let mut passed = chk.certified;
            if *distinctness && chk.certified {
                let d = check_distinctness(&j, ctx.budget)?;
                passed &= d.failure.is_none();
                r["distinctness"] = report::distinctness(&d, j.n());
            }
            r["passed"] = json!(passed);
            Ok(("injector verify", r))
        }
        InjectorCmd::Search { n, k, eps, candidates, out } => {
            let eps = format::parse_ratio(eps)?;
            let o = search_pool(*n, *k, &eps, ctx.seed, *candidates, ctx.budget)?;
            if let Some(out) = out {
                write(out, &format::write_structured(&o.function))?;
            }
            let j = o.function.injector();
            let r = json!({
                "n": n, "k": k,
                "eps": q(&eps),
                "shape": { "k1": j.k1(), "k2": j.k2(), "d": j.d(), "m": j.m() },
                "certified": j.certified(),
                "bias": q(&o.bias),
                "witness": o.witness.as_ref().map(|w| report::witness(*n, w)),
                "candidates": o.candidates,
                "met": o.met,
                "exhausted": o.exhausted,
                "out": path_str(out),
            });
            Ok(("injector search", r))
        }
    }
}

// ---------------------------------------------------------------- verify

enum Subject {
    Table(TruthTable),
    Pipeline(Box<Pipeline>),
}

fn subject(a: &VerifyArgs) -> Result<Subject> {
    let (kind, rest) = a.f.split_once(':').ok_or_else(|| anyhow!("--f must be builtin:, file: or pipeline:"))?;
    let s = match kind {
        "builtin" => {
            let n = a.n.ok_or_else(|| anyhow!("builtins need --n"))?;
            ensure!(
                n <= dalab_core::verify::MAX_TABLE_N,
                "builtin tables need n ≤ {}",
                dalab_core::verify::MAX_TABLE_N
            );
            let f = builtin(rest, n)?;
            Subject::Table(TruthTable::from_bits(n, f)?)
        }
        "file" => match format::parse_function_file(&read(Path::new(rest))?)? {
            format::Loaded::Table(t) => Subject::Table(t),
            format::Loaded::Structured(f) => Subject::Table(f.truth_table()?),
            format::Loaded::Injector(_) => bail!("an injector file is not a function"),
        },
        "pipeline" => {
            let f: PipelineFile = serde_json::from_str(&read(Path::new(rest))?)?;
            Subject::Pipeline(Box::new(Pipeline::build(f.params()?)?))
        }
        _ => bail!("unknown function kind {kind:?}"),
    };
    let n = match &s {
        Subject::Table(t) => t.n(),
        Subject::Pipeline(p) => p.params().n,
    };
    if let Some(want) = a.n {
        ensure!(want == n, "--n {want} disagrees with the function's {n} inputs");
    }
    Ok(s)
}

fn definitions(d: Def, m: usize) -> Vec<Definition> {
    match d {
        Def::Joint => vec![Definition::Joint],
        Def::Xor => vec![Definition::XorBias],
        Def::Both if m == 1 => vec![Definition::Joint, Definition::XorBias],
        Def::Both => vec![Definition::Joint],
    }
}

fn verify(c: &VerifyCmd, ctx: &Ctx) -> Result<(&'static str, Value)> {
    let (name, a) = match c {
        VerifyCmd::Directional(a) => ("verify directional", a),
        VerifyCmd::Affine(a) => ("verify affine", a),
        VerifyCmd::Disperser(a) => ("verify disperser", a),
        VerifyCmd::Epsbias(a) => ("verify epsbias", a),
    };
    let s = subject(a)?;
    let sampled = Mode::Sampled { triples: a.triples, points: a.points, seed: ctx.seed };
    let mode = match a.mode {
        Measure::Exhaustive => Mode::Exhaustive { budget: ctx.budget },
        Measure::Sampled => sampled,
    };
    let r = match (c, &s) {
        (VerifyCmd::Directional(_), Subject::Table(t)) => {
            let mut out = serde_json::Map::new();
            for def in definitions(a.definition, t.m()) {
                let rep = match mode {
                    Mode::Exhaustive { budget } if t.m() == 1 => par::directional_bias(t, a.k, def, budget)?,
                    _ => directional_bias(t, a.k, def, mode)?,
                };
                out.insert(report::definition(def).into(), report::verify(&rep));
            }
            Value::Object(out)
        }
        (VerifyCmd::Directional(_), Subject::Pipeline(p)) => {
            ensure!(a.mode == Measure::Sampled, "pipelines are measured in sampled mode");
            let n = p.params().n;
            ensure!(n <= 64 && a.bit < p.params().out_len(), "pipeline bit {} out of range", a.bit);
            let f = |x: u64| p.daext(&BitVec::from_u64(n, x)).expect("pipeline width").get(a.bit);
            let mut out = serde_json::Map::new();
            for def in definitions(a.definition, 1) {
                let rep = sampled_directional_fn(n, a.k, def, f, a.triples, a.points, ctx.seed)?;
                out.insert(report::definition(def).into(), report::verify(&rep));
            }
            Value::Object(out)
        }
        (VerifyCmd::Affine(_), Subject::Table(t)) => report::verify(&affine_extractor_distance(t, a.k, mode)?),
        (VerifyCmd::Disperser(_), Subject::Table(t)) => {
            let rep = disperser_check(t, a.k, ctx.budget)?;
            let mut v = report::verify(&rep);
            v["passed"] = json!(rep.passed);
            v
        }
        (VerifyCmd::Epsbias(_), _) => {
            ensure!(a.k < 40 && (1u128 << a.k) <= ctx.budget, "support of 2^{} points exceeds the budget", a.k);
            let (n, m) = match &s {
                Subject::Table(t) => (t.n(), t.m()),
                Subject::Pipeline(p) => (p.params().n, p.params().out_len()),
            };
            let src = source(n, a.k, ctx)?;
            let outs: Vec<u64> = match &s {
                Subject::Table(t) => src.support().map(|x| t.get(x.to_u64())).collect(),
                Subject::Pipeline(p) => {
                    src.support().map(|x| p.daext(&x).map(|o| o.to_u64())).collect::<dalab_core::Result<_>>()?
                }
            };
            let rep = eps_bias_check(m, &outs)?;
            let mut v = report::eps_bias(&rep);
            v["source"] = json!({ "basis": report::matrix(src.basis()), "shift": report::bv(src.shift()) });
            v["passed"] = json!(rep.within_bound);
            v
        }
        (_, Subject::Pipeline(_)) => bail!("{name} needs a truth table; pipelines support directional and epsbias"),
    };
    Ok((name, r))
}
