use dalab_core::affine::AffineSource;
use dalab_core::anf::anf_of;
use dalab_core::cbreak::{degree_ledger, la_ext, ldacb, nipm, CBParams, LaWidths, NipmWidths};
use dalab_core::condense::{basic_cond, scond, verify_general_condenser};
use dalab_core::daext::{advice_collision, advice_collision_formula};
use dalab_core::dimexp::{search_dimension_expander, DimExpander, SearchConfig};
use dalab_core::dist::{min_entropy_closeness, ratio, stat_distance, ExactDist};
use dalab_core::snmext::{verify_nonmalleability, SnmExtractor};
use dalab_core::subspace::for_each_subspace;
use dalab_core::xprims::lsext::LinearSeededExtractor;
use dalab_core::xprims::{affine_srext, lsext, ExtractorProfile, LinearCode};
use dalab_core::{BitVec, GF2Matrix};
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gf_mul(k: usize, modulus: u64, mut a: u64, mut b: u64) -> u64 {
    let mut r = 0;
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

fn parity(v: u64) -> bool {
    v.count_ones() % 2 == 1
}

#[test]
fn lsext_strongness_at_six_bits() {
    // (E(X, S), S) against (U, S), worst over every 3-dim affine source
    let (n, k) = (6, 3);
    let d = n;
    let mut worst = BigRational::zero();
    for_each_subspace(n, k, u128::MAX, |rows| {
        let basis = GF2Matrix::from_u64_rows(n, rows);
        for shift in 0..1u64 << n {
            let src = AffineSource::new(basis.clone(), BitVec::from_u64(n, shift)).unwrap();
            let mut num = 0u128;
            for s in 0..1u64 << d {
                let seed = BitVec::from_u64(d, s);
                let ones = src.support().filter(|x| lsext(x, &seed, 1).unwrap().get(0)).count() as u128;
                num += (2 * ones).abs_diff(1 << k);
            }
            let dist = ratio(num, 2u128 << (k + d));
            if dist > worst {
                worst = dist;
            }
        }
    })
    .unwrap();
    // a seed row orthogonal to the source fixes the bit: 2^{n−k}/2^d of seeds
    assert_eq!(worst, ratio(1, 16));
}

#[test]
fn lsext_degree_two_at_four_bits() {
    let (n, m) = (4, 2);
    let d = n + m - 1;
    for bit in 0..m {
        let mut tt = BitVec::zeros(1 << (n + d));
        for v in 0..1u64 << (n + d) {
            let x = BitVec::from_u64(n, v & 0xf);
            let s = BitVec::from_u64(d, v >> n);
            tt.set(v as usize, lsext(&x, &s, m).unwrap().get(bit));
        }
        assert_eq!(anf_of(&tt).unwrap().degree(), 2);
    }
}

#[test]
fn srext_uniform_and_constant_rows_lock() {
    let c = BitVec::from_u64(8, 0xa5);
    let outs = (0..256u64).map(|x| affine_srext(&[BitVec::from_u64(8, x), c.clone()]).unwrap().to_u64());
    let d = ExactDist::from_outcomes(8, outs);
    let dist = stat_distance(&d, &ExactDist::uniform(8)).unwrap();
    assert_eq!(dist, SRCONST_LOCK.into_ratio());
}

#[derive(Clone, Copy)]
struct Lock(u128, u128);

impl Lock {
    fn into_ratio(self) -> BigRational {
        ratio(self.0, self.1)
    }
}

/// Distance from uniform of the merged pair (uniform row, constant `a5`):
/// a uniform row survives the merge.
const SRCONST_LOCK: Lock = Lock(0, 1);

#[test]
fn field_squaring_in_gf16() {
    let f = dalab_core::field::GF2k::with_modulus(0b10011).unwrap();
    assert_eq!(f.square(0b0010), 0b0100);
    for a in 0..16 {
        for b in 0..16 {
            assert_eq!(f.mul(a, b), gf_mul(4, 0b10011, a, b));
        }
    }
}

#[test]
fn snm_single_index_by_field_oracle() {
    let e = SnmExtractor::new(8).unwrap();
    let modulus = e.field().modulus();
    assert_eq!(modulus, 0b10011);
    // seed value 1 names Y = g
    let g = e.seed_element(1);
    assert_eq!(g, 0b0010);
    let g3 = gf_mul(4, modulus, gf_mul(4, modulus, g, g), g);
    for x in 0..256u64 {
        let want = parity((x & 0xf) & g) ^ parity((x >> 4) & g3);
        let z = e.eval(&BitVec::from_u64(8, x), &BitVec::from_u64(3, 1), &[0]).unwrap();
        assert_eq!(z.get(0), want);
    }
}

#[test]
fn snm_linear_in_source() {
    let e = SnmExtractor::new(8).unwrap();
    let idx = [0, 1, 2, 3];
    for y in 0..8u64 {
        for a in 0..256u64 {
            for b in (0..256u64).step_by(7) {
                assert_eq!(e.eval_u64(a ^ b, y, &idx), e.eval_u64(a, y, &idx) ^ e.eval_u64(b, y, &idx));
            }
        }
    }
}

#[test]
fn snm_tamper_report_is_deterministic() {
    let e = SnmExtractor::new(10).unwrap();
    let x = AffineSource::full(10);
    let a = verify_nonmalleability(&e, &x, |y| y ^ 3, &[0], u128::MAX).unwrap();
    let b = verify_nonmalleability(&e, &x, |y| y ^ 3, &[0], u128::MAX).unwrap();
    assert_eq!(a, b);
    assert!(a.distance <= ratio(1, 2));
}

fn poly_apply(n: usize, d: usize, m: usize, x: &BitVec, seed: &BitVec) -> BitVec {
    LinearSeededExtractor::polynomial(n, d, m).unwrap().matrix(seed).unwrap().mul_vec(x).unwrap()
}

#[test]
fn la_ext_matches_matrix_recomputation() {
    let w = LaWidths { s: 3, m1: 6, m2: 5, m: 4 };
    let mut rng = ChaCha8Rng::seed_from_u64(60);
    for _ in 0..20 {
        let x = BitVec::from_u64(20, rng.gen());
        let y = BitVec::from_u64(12, rng.gen());
        let (r0, r1) = la_ext(&x, &y, &w, &ExtractorProfile::Polynomial).unwrap();
        let r0_full = poly_apply(20, 3, 6, &x, &y.prefix(3));
        let s1 = poly_apply(12, 6, 5, &y, &r0_full);
        let want_r1 = poly_apply(20, 5, 4, &x, &s1);
        assert_eq!(r1, want_r1);
        assert_eq!(r0, r0_full.prefix(4));
    }
}

#[test]
fn nipm_two_rows_by_hand() {
    let w = NipmWidths { seed: vec![4, 3], mid: vec![5] };
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for _ in 0..20 {
        let x = BitVec::from_u64(16, rng.gen());
        let rows = vec![BitVec::from_u64(8, rng.gen()), BitVec::from_u64(8, rng.gen())];
        let got = nipm(&x, &rows, &w, &ExtractorProfile::Polynomial).unwrap();
        let s1 = rows[0].prefix(4);
        let r = poly_apply(16, 4, 5, &x, &s1);
        let s2 = poly_apply(8, 5, 3, &rows[1], &r);
        assert_eq!(got, s2);
    }
}

#[test]
fn ldacb_distinct_ids_joint_distribution_lock() {
    let p = CBParams::toy(12, 8, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(62);
    let src = AffineSource::random(12, 8, &mut rng);
    let y = BitVec::from_u64(8, 0b1011_0110);
    let (id0, id1) = (BitVec::from_u64(1, 0), BitVec::from_u64(1, 1));
    let o = p.out_len();
    let pairs = src.support().map(|x| {
        let a = ldacb(&x, &y, &id0, &p).unwrap().to_u64();
        let b = ldacb(&x, &y, &id1, &p).unwrap().to_u64();
        a | b << o
    });
    let d = ExactDist::from_outcomes(2 * o, pairs);
    let dist = stat_distance(&d, &ExactDist::uniform(2 * o)).unwrap();
    assert_eq!((o, dist), (4, LDACB_PAIR_LOCK.into_ratio()));
}

/// Distance from uniform of the two advice outputs on the locked source.
const LDACB_PAIR_LOCK: Lock = Lock(117, 256);

#[test]
fn ldacb_degree_within_ledger() {
    let p = CBParams::toy(6, 8, 1).unwrap();
    for id in 0..2u64 {
        let idv = BitVec::from_u64(1, id);
        let bound = degree_ledger(&p, 1, 1, Some(&idv)).out;
        for bit in 0..p.out_len() {
            let mut tt = BitVec::zeros(1 << 14);
            for v in 0..1u64 << 14 {
                let x = BitVec::from_u64(6, v & 0x3f);
                let y = BitVec::from_u64(8, v >> 6);
                tt.set(v as usize, ldacb(&x, &y, &idv, &p).unwrap().get(bit));
            }
            let deg = anf_of(&tt).unwrap().degree();
            assert!(deg <= bound, "bit {bit}: degree {deg} > {bound}");
        }
    }
}

fn expander(n: usize, seed: u64) -> DimExpander {
    search_dimension_expander(&SearchConfig::new(n, 3, ratio(0, 1), seed)).unwrap()
}

#[test]
fn scond_is_step_composition() {
    let fam = vec![expander(4, 1), expander(2, 2)];
    let two = scond(&fam, 8, 2).unwrap();
    let first = basic_cond(&fam[0], 8).unwrap();
    let second = basic_cond(&fam[1], 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(63);
    for _ in 0..32 {
        let x = BitVec::from_u64(8, rng.gen());
        let mut want = Vec::new();
        for r in first.apply(&x).unwrap() {
            want.extend(second.apply(&r).unwrap());
        }
        assert_eq!(two.apply(&x).unwrap(), want);
        assert_eq!(want.len(), 64);
    }
}

/// Moves the excess of every heavy outcome onto the lightest ones and
/// measures the move directly.
fn greedy_clip(d: &ExactDist, k: u64) -> BigRational {
    let bits = d.bits();
    let t = d.total();
    let cap = t;
    let mut w: Vec<u64> = (0..1u64 << bits).map(|z| d.weight(z) * k).collect();
    let mut excess = 0;
    for v in w.iter_mut() {
        if *v > cap {
            excess += *v - cap;
            *v = cap;
        }
    }
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by_key(|&i| w[i]);
    for i in order {
        let add = (cap - w[i]).min(excess);
        w[i] += add;
        excess -= add;
    }
    assert_eq!(excess, 0);
    let scaled = ExactDist::from_weights(bits, (0..1u64 << bits).map(|z| (z, d.weight(z) * k))).unwrap();
    let clipped = ExactDist::from_weights(bits, w.iter().enumerate().map(|(z, &v)| (z as u64, v))).unwrap();
    stat_distance(&scaled, &clipped).unwrap()
}

#[test]
fn clipping_matches_greedy_oracle() {
    let d = ExactDist::from_weights(11, std::iter::once((0, 1024)).chain((1..=1024).map(|z| (z, 1)))).unwrap();
    assert_eq!(d.collision_probability(), ratio(1, 4) + ratio(1024, 2048 * 2048));
    for j in 0..=11 {
        let k = 1u64 << j;
        assert_eq!(d.clip_distance(k).unwrap(), greedy_clip(&d, k), "k = 2^{j}");
    }
    let c = min_entropy_closeness(&d, 2, 2).unwrap();
    assert!(!c.premise);
}

#[test]
fn general_condenser_rows_match_oracle() {
    let e = expander(8, 3);
    let c = dalab_core::condense::basic_gcond(&e, 16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    let support: Vec<BitVec> = (0..64).map(|_| BitVec::from_u64(16, rng.gen())).collect();
    let l = 4;
    let r = verify_general_condenser(&c, &support, 32, l, u128::MAX).unwrap();
    for (i, row) in c.row_maps.iter().enumerate() {
        let d = ExactDist::from_outcomes(8, support.iter().map(|x| row.mul_vec(x).unwrap().to_u64()));
        let mut best = 0;
        for j in 1..=8 {
            let g = greedy_clip(&d, 1 << j);
            if &g * &g * BigRational::from_integer((l as i64).into()) <= ratio(1, 1) {
                best = j;
            } else {
                break;
            }
        }
        assert_eq!(r.rows[i].smooth_entropy, best, "row {i}");
    }
}

fn collision_check(code: &LinearCode, k_blocks: usize) {
    let beta = ratio(code.certified_distance().unwrap() as u128, code.n_code() as u128);
    let one = ratio(1, 1);
    let mut bound = ratio(1, 1);
    for _ in 0..k_blocks {
        bound *= &one - &beta;
    }
    let msgs = 1u64 << code.k();
    for a in 0..msgs {
        for b in 0..msgs {
            if a == b {
                continue;
            }
            let ca = code.encode(&BitVec::from_u64(code.k(), a)).unwrap();
            let cb = code.encode(&BitVec::from_u64(code.k(), b)).unwrap();
            let exact = advice_collision(&ca, &cb, k_blocks).unwrap();
            assert_eq!(exact, advice_collision_formula(&ca, &cb, k_blocks).unwrap());
            assert!(exact <= bound);
        }
    }
}

#[test]
fn advice_collision_extended_hamming() {
    collision_check(&LinearCode::extended_hamming(), 4);
}

#[test]
fn advice_collision_reed_muller() {
    let mut rm = LinearCode::reed_muller_first_order(4).unwrap();
    assert_eq!(rm.certify().unwrap(), 8);
    assert_eq!(rm.certified_distance(), Some(8));
    collision_check(&rm, 4);
}
