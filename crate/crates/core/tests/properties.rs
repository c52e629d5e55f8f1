use dalab_core::condense::basic_cond;
use dalab_core::dimexp::{search_dimension_expander, SearchConfig};
use dalab_core::dist::ratio;
use dalab_core::injector::{eval_structured, sample_injector, search_pool, StructuredFunction, SumsetInjector};
use dalab_core::matrix::rank_u64;
use dalab_core::verify::{directional_bias, directional_bias_dual, eps_bias_check, Definition, Mode, TruthTable};
use dalab_core::xprims::lsext;
use dalab_core::{BitVec, GF2Matrix};
use proptest::prelude::*;

fn matrix(rows: &[u64], cols: usize) -> GF2Matrix {
    let mask = (1u64 << cols) - 1;
    let r: Vec<u64> = rows.iter().map(|&x| x & mask).collect();
    GF2Matrix::from_u64_rows(cols, &r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_nullity(rows in prop::collection::vec(any::<u64>(), 1..10), cols in 1usize..20) {
        let a = matrix(&rows, cols);
        let k = a.kernel_basis();
        prop_assert_eq!(a.rank() + k.n_rows(), cols);
        prop_assert_eq!(k.rank(), k.n_rows());
        for v in k.rows() {
            prop_assert!(a.mul_vec(v).unwrap().is_zero());
        }
    }

    #[test]
    fn rank_is_row_order_free(mut rows in prop::collection::vec(any::<u32>().prop_map(u64::from), 1..12)) {
        let r = rank_u64(&rows);
        rows.reverse();
        prop_assert_eq!(rank_u64(&rows), r);
        let extra = rows[0] ^ rows[rows.len() - 1];
        rows.push(extra);
        prop_assert_eq!(rank_u64(&rows), r);
    }

    #[test]
    fn lsext_is_linear_in_source(a in any::<u64>(), b in any::<u64>(), s in any::<u64>(), m in 1usize..8) {
        let n = 24;
        let d = n + m - 1;
        let (x, y) = (BitVec::from_u64(n, a & 0xff_ffff), BitVec::from_u64(n, b & 0xff_ffff));
        let seed = BitVec::from_u64(d, s & ((1u64 << d) - 1));
        let sum = lsext(&(&x ^ &y), &seed, m).unwrap();
        let parts = &lsext(&x, &seed, m).unwrap() ^ &lsext(&y, &seed, m).unwrap();
        prop_assert_eq!(sum, parts);
    }

    #[test]
    fn condenser_rows_are_linear(seed in 0u64..16, a in any::<u16>(), b in any::<u16>()) {
        let e = search_dimension_expander(&SearchConfig::new(8, 3, ratio(0, 1), seed)).unwrap();
        let c = basic_cond(&e, 16).unwrap();
        let (x, y) = (BitVec::from_u64(16, a as u64), BitVec::from_u64(16, b as u64));
        let sum = c.apply(&(&x ^ &y)).unwrap();
        let (cx, cy) = (c.apply(&x).unwrap(), c.apply(&y).unwrap());
        for i in 0..sum.len() {
            prop_assert_eq!(&sum[i], &(&cx[i] ^ &cy[i]));
        }
    }

    #[test]
    fn verify_kernels_agree(values in prop::collection::vec(any::<bool>(), 32), k in 1usize..5, xor in any::<bool>()) {
        let t = TruthTable::from_values(5, 1, values.into_iter().map(u64::from).collect()).unwrap();
        let def = if xor { Definition::XorBias } else { Definition::Joint };
        let p = directional_bias(&t, k, def, Mode::Exhaustive { budget: u128::MAX }).unwrap();
        let d = directional_bias_dual(&t, k, def, u128::MAX).unwrap();
        prop_assert_eq!(p.value, d.value);
        prop_assert_eq!(p.witness, d.witness);
    }

    #[test]
    fn eps_bias_bound_holds(outs in prop::collection::vec(0u64..64, 1..400)) {
        let r = eps_bias_check(6, &outs).unwrap();
        prop_assert!(r.within_bound);
        prop_assert!(r.eps >= ratio(0, 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn search_is_monotone(seed in 0u64..1000) {
        let mut last = None;
        for k in 3..=5 {
            let b = search_pool(5, k, &ratio(0, 1), seed, 2, u128::MAX).unwrap().bias;
            if let Some(prev) = last {
                prop_assert!(b <= prev);
            }
            last = Some(b);
        }
    }

    #[test]
    fn structured_function_equivariant(seed in 0u64..1000, rot in 1usize..4) {
        let j = sample_injector(6, 2, 2, 5, 4, seed).unwrap();
        let f = StructuredFunction::random(j.clone(), seed ^ 0x55);
        let order: Vec<usize> = (0..4).map(|i| (i + rot) % 4).collect();
        let maps: Vec<GF2Matrix> = order.iter().map(|&i| j.map(i)).collect();
        let tables: Vec<Vec<u64>> = order.iter().map(|&i| f.tables()[i].clone()).collect();
        let g = StructuredFunction::new(SumsetInjector::new(6, 2, 2, maps).unwrap(), tables).unwrap();
        for x in 0..64 {
            prop_assert_eq!(eval_structured(&f, x), eval_structured(&g, x));
        }
    }
}
