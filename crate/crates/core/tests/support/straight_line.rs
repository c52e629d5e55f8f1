//! Straight-line re-derivation of the directional pipeline, compared stage by
//! stage against `Pipeline::run`. Shared by the core and lab test suites.

use dalab_core::cbreak::ldacb;
use dalab_core::condense::eval_recursive;
use dalab_core::daext::{Mode, Pipeline, PipelineParams, TraceRecord};
use dalab_core::dimexp::DimExpander;
use dalab_core::field::GF2k;
use dalab_core::snmext::{default_indices, SnmExtractor};
use dalab_core::xprims::SrStrategy;
use dalab_core::BitVec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bits(v: &BitVec) -> Vec<bool> {
    v.iter().collect()
}

fn to_bv(b: &[bool]) -> BitVec {
    BitVec::from_bools(b)
}

fn le(b: &[bool]) -> u64 {
    b.iter().enumerate().fold(0, |acc, (i, &x)| acc | (x as u64) << i)
}

fn from_le(v: u64, len: usize) -> Vec<bool> {
    (0..len).map(|i| v >> i & 1 == 1).collect()
}

fn xor(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

/// Shift-and-add multiplication modulo a full modulus polynomial of degree k.
fn gf_mul(k: usize, modulus: u64, mut a: u64, mut b: u64) -> u64 {
    let mut r = 0u64;
    while b != 0 {
        if b & 1 == 1 {
            r ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> k & 1 == 1 {
            a ^= modulus;
        }
    }
    r
}

fn expander_for(family: &[DimExpander], dim: usize) -> &DimExpander {
    family.iter().find(|e| e.n == dim).expect("expander for width")
}

fn condense(family: &[DimExpander], x: &[bool], h: usize) -> Vec<Vec<bool>> {
    let steps: Vec<&DimExpander> = (1..=h).map(|s| expander_for(family, x.len() >> s)).collect();
    eval_recursive(&to_bv(x), &steps, false).unwrap().iter().map(bits).collect()
}

/// Folded merge of somewhere-random rows using cyclic mixing.
fn fold(rows: &[Vec<bool>], w: usize) -> Vec<bool> {
    let mut level = rows.to_vec();
    while level.len() > 1 {
        let mut next = Vec::new();
        let mut i = 0;
        while i < level.len() {
            if i + 1 == level.len() {
                next.push(level[i].clone());
            } else {
                let (a, b) = (&level[i], &level[i + 1]);
                let diff = xor(a, b);
                let r = a.len();
                let out: Vec<bool> = (0..r)
                    .map(|row| a[row] ^ (0..r).filter(|&j| diff[j]).fold(false, |acc, j| acc ^ b[(row + j) % w]))
                    .collect();
                next.push(out);
            }
            i += 2;
        }
        level = next;
    }
    level.pop().unwrap()
}

/// Horner evaluation of the `q`-bit coefficients of `x` (no constant term)
/// at `σ ⊕ c` for `c = 0, 1, …`, concatenated to `m` bits.
fn poly_extract(x: &[bool], seed: &[bool], m: usize) -> Vec<bool> {
    let q = seed.len().min(63);
    let field = GF2k::new(q).unwrap();
    let modulus = field.modulus();
    let sigma = le(&seed[..q]);
    let coeffs: Vec<u64> = x.chunks(q).map(le).collect();
    let mut out = Vec::new();
    let mut c = 0u64;
    while out.len() < m {
        let point = sigma ^ (c & ((1u64 << q) - 1));
        let mut acc = 0u64;
        for &a in coeffs.iter().rev() {
            acc = gf_mul(q, modulus, acc ^ a, point);
        }
        let take = q.min(m - out.len());
        out.extend(from_le(acc, q).into_iter().take(take));
        c += 1;
    }
    out
}

fn straight_line(pipe: &Pipeline, x: &[bool]) -> TraceRecord {
    let p = pipe.params();
    let fam = pipe.expanders();
    let n = p.n;
    let sc = condense(fam, x, p.h1 + p.r);
    let xp = condense(fam, x, p.h3 + p.log_t());
    let mut enc = vec![false; p.enc.n_code()];
    for (i, &b) in x.iter().enumerate() {
        if b {
            enc = xor(&enc, &bits(p.enc.generator().row(i)));
        }
    }
    let ipf = GF2k::new(p.ip_m).unwrap();
    let ip = |a: &[bool], b: &[bool]| -> Vec<bool> {
        let mut acc = 0;
        for (ca, cb) in a.chunks(p.ip_m).zip(b.chunks(p.ip_m)) {
            acc ^= gf_mul(p.ip_m, ipf.modulus(), le(ca), le(cb));
        }
        from_le(acc, p.ip_m)
    };
    let SrStrategy::Fold { seed_width } = p.sr else { panic!("desk pipeline folds") };
    let snm = SnmExtractor::new(p.sc_width()).unwrap();
    let indices = default_indices(p.n1);
    let bl = p.block_len();
    let mut z = vec![false; p.m1];
    let mut blocks = Vec::new();
    for (i, &c) in p.c.iter().enumerate() {
        let y = condense(fam, &x[i * bl..(i + 1) * bl], p.h2);
        let mut sr = Vec::new();
        for a in &xp {
            for b in &y {
                sr.push(ip(a, b));
            }
        }
        let r = fold(&sr, seed_width);
        let u = poly_extract(x, &r, p.m_prime);
        let block = enc.len() / p.k_blocks;
        let w = p.index_width();
        let h: Vec<bool> =
            (0..p.k_blocks).map(|j| enc[j * block + le(&u[j * w..(j + 1) * w]) as usize % block]).collect();
        let mut ut = u.clone();
        ut.extend(&h);
        let mut sn = Vec::new();
        let mut yt = vec![false; p.n2()];
        for (j, row) in sc.iter().enumerate() {
            let s = snm.eval(&to_bv(row), &to_bv(&ut), &indices).unwrap();
            let id = to_bv(&from_le(j as u64, p.cb.a));
            yt = xor(&yt, &bits(&ldacb(&to_bv(x), &s, &id, &p.cb).unwrap()));
            sn.push(s);
        }
        let wv = poly_extract(x, &yt, p.m1 * c);
        let v: Vec<bool> = (0..p.m1).map(|j| wv[j * c..(j + 1) * c].iter().all(|&b| b)).collect();
        z = xor(&z, &v);
        blocks.push(dalab_core::daext::BlockTrace {
            y_rows: y.iter().map(|v| to_bv(v)).collect(),
            sr: sr.iter().map(|v| to_bv(v)).collect(),
            r: to_bv(&r),
            u: to_bv(&u),
            h: to_bv(&h),
            u_tilde: to_bv(&ut),
            sn,
            y_tilde: to_bv(&yt),
            w: to_bv(&wv),
            v: to_bv(&v),
        });
    }
    assert_eq!(x.len(), n);
    TraceRecord {
        sc: sc.iter().map(|v| to_bv(v)).collect(),
        x_prime: xp.iter().map(|v| to_bv(v)).collect(),
        enc: to_bv(&enc),
        blocks,
        z: to_bv(&z),
    }
}

/// Runs `inputs` inputs (the first is zero) through both and panics on the
/// first stage that differs.
pub fn compare(n: usize, mode: Mode, inputs: usize) {
    let pipe = Pipeline::build(PipelineParams::desk(n, (1, 2), mode).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    for trial in 0..inputs {
        let x: Vec<bool> = if trial == 0 { vec![false; n] } else { (0..n).map(|_| rng.gen()).collect() };
        let (z, got) = pipe.run(&to_bv(&x)).unwrap();
        let want = straight_line(&pipe, &x);
        assert_eq!(got.sc, want.sc, "sc at n={n}");
        assert_eq!(got.x_prime, want.x_prime, "x′ at n={n}");
        assert_eq!(got.enc, want.enc, "enc at n={n}");
        for (b, (g, w)) in got.blocks.iter().zip(&want.blocks).enumerate() {
            assert_eq!(g.y_rows, w.y_rows, "block {b} y");
            assert_eq!(g.sr, w.sr, "block {b} sr");
            assert_eq!(g.r, w.r, "block {b} r");
            assert_eq!(g.u, w.u, "block {b} u");
            assert_eq!(g.h, w.h, "block {b} h");
            assert_eq!(g.u_tilde, w.u_tilde, "block {b} ũ");
            assert_eq!(g.sn, w.sn, "block {b} sn");
            assert_eq!(g.y_tilde, w.y_tilde, "block {b} ỹ");
            assert_eq!(g.w, w.w, "block {b} w");
            assert_eq!(g.v, w.v, "block {b} v");
        }
        assert_eq!(got, want);
        if trial == 0 {
            assert!(z.is_zero());
        }
        let out = pipe.daext(&to_bv(&x)).unwrap();
        assert_eq!(out.len(), pipe.params().out_len());
        assert_eq!(out.len(), pipe.params().m1 / 2);
    }
}
