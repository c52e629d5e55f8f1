//! JSON renderings of core results. Rationals are `"p/q"` strings, vectors
//! use the `len:hex` text form, and object keys are sorted, so a report is
//! a pure function of its inputs.

use anyhow::{bail, ensure, Result};
use dalab_core::cbreak::{CBParams, Constraint, ConstraintKind, DegreeLedger};
use dalab_core::condense::{AffineCondenserReport, GeneralCondenserReport, SomewhereCondenser};
use dalab_core::daext::{Check, TraceRecord};
use dalab_core::dimexp::DimExpander;
use dalab_core::injector::{DistinctnessReport, InjectorCheck};
use dalab_core::lbp::{Correlation, LinearBP, Node, ReadOnceCheck, Target};
use dalab_core::snmext::NonMalleabilityReport;
use dalab_core::verify::{Definition, EpsBiasReport, Measured, VerifyReport, Witness};
use dalab_core::xprims::ExtractorProfile;
use dalab_core::{BitVec, GF2Matrix};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::format::{hex_digits, parse_bitvec, write_bitvec, write_certificate, write_ratio};

pub fn q(r: &BigRational) -> Value {
    Value::String(write_ratio(r))
}

pub fn bv(v: &BitVec) -> Value {
    Value::String(write_bitvec(v))
}

pub fn bvs(vs: &[BitVec]) -> Value {
    Value::Array(vs.iter().map(bv).collect())
}

pub fn packed(n: usize, x: u64) -> Value {
    bv(&BitVec::from_u64(n, x))
}

pub fn matrix(m: &GF2Matrix) -> Value {
    json!({ "rows": m.n_rows(), "cols": m.n_cols(), "data": m.rows().iter().map(hex_digits).collect::<Vec<_>>() })
}

pub fn packed_rows(n: usize, rows: &[u64]) -> Value {
    matrix(&GF2Matrix::from_u64_rows(n, rows))
}

pub fn definition(d: Definition) -> &'static str {
    match d {
        Definition::Joint => "joint",
        Definition::XorBias => "xor_bias",
    }
}

pub fn measured(m: &Measured) -> Value {
    match m {
        Measured::Exact(r) => json!({ "exact": write_ratio(r) }),
        Measured::Estimate { value, radius, confidence } => {
            json!({ "estimate": value, "radius": radius, "confidence": confidence })
        }
    }
}

pub fn witness(n: usize, w: &Witness) -> Value {
    json!({
        "subspace": packed_rows(n, &w.subspace),
        "shift": packed(n, w.shift),
        "a": w.a.map(|a| packed(n, a)),
    })
}

pub fn verify(r: &VerifyReport) -> Value {
    json!({
        "property": r.property,
        "n": r.n,
        "k": r.k,
        "m": r.m,
        "definition": r.definition.map(definition),
        "mode": if r.sampled { "sampled" } else { "exhaustive" },
        "value": measured(&r.value),
        "witness": r.witness.as_ref().map(|w| witness(r.n, w)),
        "passed": r.passed,
        "instances": r.instances.to_string(),
    })
}

pub fn eps_bias(r: &EpsBiasReport) -> Value {
    json!({
        "m": r.m,
        "eps": q(&r.eps),
        "worst_subset": packed(r.m, r.worst_subset),
        "distance": q(&r.distance),
        "implied_bound": r.implied_bound,
        "within_bound": r.within_bound,
    })
}

pub fn expander(e: &DimExpander) -> Value {
    json!({
        "n": e.n,
        "degree": e.maps.len(),
        "alpha": q(&e.alpha),
        "certificate": write_certificate(&e.certificate),
        "seed": e.seed.map(|(s, attempt)| json!({ "seed": s, "attempt": attempt })),
    })
}

pub fn condenser(c: &SomewhereCondenser) -> Value {
    json!({
        "n_in": c.n_in,
        "m_out": c.m_out,
        "rows": c.rows(),
        "kind": format!("{:?}", c.kind),
        "steps": c.steps.iter().map(|s| json!({
            "dim": s.dim,
            "degree": s.degree,
            "alpha": q(&s.alpha),
            "certificate": write_certificate(&s.certificate),
        })).collect::<Vec<_>>(),
    })
}

pub fn affine_condenser(r: &AffineCondenserReport) -> Value {
    json!({
        "k": r.k,
        "m_out": r.m_out,
        "rows": r.rows,
        "threshold": r.threshold,
        "min_best_rank": r.min_best_rank,
        "failures": r.failures.to_string(),
        "subspaces_checked": r.subspaces_checked.to_string(),
        "witness": matrix(&r.witness),
        "witness_best_row": r.witness_best_row,
        "mode": if r.exhaustive { "exhaustive" } else { "sampled" },
        "passed": r.passed(),
    })
}

pub fn general_condenser(r: &GeneralCondenserReport) -> Value {
    json!({
        "rows": r.rows.iter().map(|m| json!({
            "smooth_entropy": m.smooth_entropy,
            "distance": q(&m.distance),
            "collision_probability": q(&m.collision_probability),
        })).collect::<Vec<_>>(),
        "best_row": r.best_row,
        "smooth_entropy": r.smooth_entropy,
        "distance": q(&r.distance),
        "collision_premise": r.collision_premise,
        "notes": r.notes,
    })
}

pub fn nonmalleability(r: &NonMalleabilityReport) -> Value {
    json!({
        "n": r.n,
        "source_entropy": r.source_entropy,
        "out_bits": r.out_bits,
        "distance": q(&r.distance),
        "seeds_checked": r.seeds_checked,
    })
}

pub fn checks(cs: &[Check]) -> Value {
    Value::Array(
        cs.iter().map(|c| json!({ "name": c.name, "hard": c.hard, "holds": c.holds, "detail": c.detail })).collect(),
    )
}

pub fn constraints(cs: &[Constraint]) -> Value {
    Value::Array(
        cs.iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "kind": match c.kind { ConstraintKind::Width => "width", ConstraintKind::Theory => "theory" },
                    "lhs": c.lhs,
                    "rhs": c.rhs,
                    "holds": c.holds,
                })
            })
            .collect(),
    )
}

pub fn ledger(l: &DegreeLedger) -> Value {
    json!({
        "q": l.q, "r0_full": l.r0_full, "s1": l.s1, "r0": l.r0, "r1": l.r1, "merger": l.merger, "out": l.out,
    })
}

pub fn trace(t: &TraceRecord) -> Value {
    json!({
        "sc": bvs(&t.sc),
        "x_prime": bvs(&t.x_prime),
        "enc": bv(&t.enc),
        "blocks": t.blocks.iter().map(|b| json!({
            "y_rows": bvs(&b.y_rows),
            "sr": bvs(&b.sr),
            "r": bv(&b.r),
            "u": bv(&b.u),
            "h": bv(&b.h),
            "u_tilde": bv(&b.u_tilde),
            "sn": bvs(&b.sn),
            "y_tilde": bv(&b.y_tilde),
            "w": bv(&b.w),
            "v": bv(&b.v),
        })).collect::<Vec<_>>(),
        "z": bv(&t.z),
    })
}

pub fn injector_check(c: &InjectorCheck, n: usize) -> Value {
    json!({
        "certified": c.certified,
        "subspaces": c.subspaces.to_string(),
        "witness": c.witness.as_ref().map(|w| json!({ "u": packed_rows(n, &w.u), "v": packed_rows(n, &w.v) })),
    })
}

pub fn distinctness(r: &DistinctnessReport, n: usize) -> Value {
    json!({
        "pairs": r.pairs.to_string(),
        "directions": r.directions.to_string(),
        "failure": r.failure.as_ref().map(|(u, v, a)| json!({
            "u": packed_rows(n, u), "v": packed_rows(n, v), "a": packed(n, *a),
        })),
    })
}

pub fn read_once(c: &ReadOnceCheck) -> Value {
    json!({
        "holds": c.holds,
        "witness": c.witness.as_ref().map(|v| json!({ "node": v.node, "vector": bv(&v.vector) })),
    })
}

pub fn correlation(c: &Correlation) -> Value {
    match c {
        Correlation::Exact(r) => json!({ "exact": q(r) }),
        Correlation::Estimate { value, radius, confidence, samples } => {
            json!({ "estimate": value, "radius": radius, "confidence": confidence, "samples": samples })
        }
    }
}

pub fn target(t: Target, nodes: usize) -> usize {
    match t {
        Target::Node(i) => i,
        Target::Sink(false) => nodes,
        Target::Sink(true) => nodes + 1,
    }
}

/// Program file: nodes are numbered by position; `sink0` and `sink1` name
/// the two sinks and default to the first two unused ids.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProgramFile {
    pub n: usize,
    pub nodes: Vec<NodeFile>,
    pub source: usize,
    pub sink0: usize,
    pub sink1: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NodeFile {
    pub query: String,
    pub e0: usize,
    pub e1: usize,
}

impl ProgramFile {
    pub fn from_program(p: &LinearBP) -> Self {
        let len = p.nodes().len();
        ProgramFile {
            n: p.n(),
            nodes: p
                .nodes()
                .iter()
                .map(|v| NodeFile { query: write_bitvec(&v.query), e0: target(v.e0, len), e1: target(v.e1, len) })
                .collect(),
            source: target(p.source(), len),
            sink0: len,
            sink1: len + 1,
        }
    }

    pub fn to_program(&self) -> Result<LinearBP> {
        let len = self.nodes.len();
        ensure!(self.sink0 != self.sink1, "sink0 and sink1 must differ");
        let resolve = |id: usize| -> Result<Target> {
            if id == self.sink0 {
                Ok(Target::Sink(false))
            } else if id == self.sink1 {
                Ok(Target::Sink(true))
            } else if id < len {
                Ok(Target::Node(id))
            } else {
                bail!("edge target {id} is neither a node nor a sink")
            }
        };
        ensure!(self.sink0 >= len && self.sink1 >= len, "sink ids must not collide with node ids");
        let mut nodes = Vec::with_capacity(len);
        for (i, v) in self.nodes.iter().enumerate() {
            let query = parse_bitvec(&v.query)?;
            ensure!(query.len() == self.n, "node {i} query has {} bits, expected {}", query.len(), self.n);
            nodes.push(Node { query, e0: resolve(v.e0)?, e1: resolve(v.e1)? });
        }
        Ok(LinearBP::new(self.n, nodes, resolve(self.source)?)?)
    }
}

pub fn profile_name(p: &ExtractorProfile) -> &'static str {
    match p {
        ExtractorProfile::Toeplitz => "toeplitz",
        ExtractorProfile::Cyclic => "cyclic",
        ExtractorProfile::Polynomial => "polynomial",
        ExtractorProfile::Adaptive => "adaptive",
        ExtractorProfile::Tables(_) => "tables",
    }
}

pub fn parse_profile(s: &str) -> Result<ExtractorProfile> {
    Ok(match s {
        "toeplitz" => ExtractorProfile::Toeplitz,
        "cyclic" => ExtractorProfile::Cyclic,
        "polynomial" => ExtractorProfile::Polynomial,
        "adaptive" => ExtractorProfile::Adaptive,
        _ => bail!("unknown extractor profile {s:?} (tables cannot be named in a config)"),
    })
}

/// Config record for a correlation breaker.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CBConfig {
    pub n: usize,
    pub d: usize,
    pub t: usize,
    pub a: usize,
    pub k: usize,
    pub m1: usize,
    pub m2: usize,
    pub la: [usize; 4],
    pub nipm_seed: Vec<usize>,
    pub nipm_mid: Vec<usize>,
    pub profile: String,
    pub c: f64,
    pub log_inv_eps: f64,
    pub beta: (u64, u64),
    pub structural_mode: bool,
}

impl CBConfig {
    pub fn from_params(p: &CBParams) -> Self {
        CBConfig {
            n: p.n,
            d: p.d,
            t: p.t,
            a: p.a,
            k: p.k,
            m1: p.m1,
            m2: p.m2,
            la: [p.la.s, p.la.m1, p.la.m2, p.la.m],
            nipm_seed: p.nipm.seed.clone(),
            nipm_mid: p.nipm.mid.clone(),
            profile: profile_name(&p.profile).to_string(),
            c: p.constants.c,
            log_inv_eps: p.constants.log_inv_eps,
            beta: p.constants.beta,
            structural_mode: p.structural_mode,
        }
    }

    pub fn to_params(&self) -> Result<CBParams> {
        use dalab_core::cbreak::{LaWidths, NipmWidths, TheoryConstants};
        let [s, m1, m2, m] = self.la;
        let p = CBParams {
            n: self.n,
            d: self.d,
            t: self.t,
            a: self.a,
            k: self.k,
            m1: self.m1,
            m2: self.m2,
            la: LaWidths { s, m1, m2, m },
            nipm: NipmWidths { seed: self.nipm_seed.clone(), mid: self.nipm_mid.clone() },
            profile: parse_profile(&self.profile)?,
            constants: TheoryConstants { c: self.c, log_inv_eps: self.log_inv_eps, beta: self.beta },
            structural_mode: self.structural_mode,
        };
        p.check_widths()?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dalab_core::lbp::catalog;

    #[test]
    fn program_round_trip() {
        for p in [catalog::tribes(6, 2, 3).unwrap(), catalog::parity(5, &[0, 4]).unwrap()] {
            let f = ProgramFile::from_program(&p);
            let text = serde_json::to_string(&f).unwrap();
            let back: ProgramFile = serde_json::from_str(&text).unwrap();
            let q = back.to_program().unwrap();
            assert!((0..1u64 << p.n()).all(|x| p.eval_u64(x) == q.eval_u64(x)));
        }
    }

    #[test]
    fn bad_program_rejected() {
        let f = ProgramFile {
            n: 2,
            nodes: vec![NodeFile { query: "2:1".into(), e0: 0, e1: 2 }],
            source: 0,
            sink0: 1,
            sink1: 2,
        };
        assert!(f.to_program().is_err());
    }

    #[test]
    fn cbconfig_round_trip() {
        let p = CBParams::toy(12, 8, 2).unwrap();
        let c = CBConfig::from_params(&p);
        let back: CBConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back.to_params().unwrap(), p);
    }
}
