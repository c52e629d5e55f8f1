use std::collections::BTreeMap;

use dalab_core::dist::ratio;
use dalab_core::lbp::{catalog, cut_probabilities, robp_cut, subspace_indicator, CutEvent, LinearBP, Target};
use dalab_core::matrix::rank_u64;
use dalab_core::{BitVec, GF2Matrix};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn indicator_of_dim8_subspace_in_16_bits() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let basis = GF2Matrix::random_full_rank(8, 16, &mut rng);
    let rows = basis.to_u64_rows();
    let p = subspace_indicator(&basis, &BitVec::zeros(16)).unwrap();
    assert_eq!(p.size(), 8);
    assert!(p.is_strongly_read_once().holds);
    for x in 0..1u64 << 16 {
        let mut with = rows.clone();
        with.push(x);
        let member = rank_u64(&with) == 8;
        assert_eq!(p.eval_u64(x), member, "x = {x:#x}");
    }
}

#[test]
fn shifted_indicator() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let basis = GF2Matrix::random_full_rank(3, 8, &mut rng);
    let shift = BitVec::from_u64(8, 0b1011_0010);
    let p = subspace_indicator(&basis, &shift).unwrap();
    let rows = basis.to_u64_rows();
    for x in 0..256u64 {
        let mut with = rows.clone();
        with.push(x ^ 0b1011_0010);
        assert_eq!(p.eval_u64(x), rank_u64(&with) == 3);
    }
}

#[test]
fn and_chain_truth_table() {
    let p = catalog::conjunction(4, &[0, 1, 2, 3]).unwrap();
    for x in 0..16u64 {
        assert_eq!(p.eval_u64(x), x == 15);
    }
}

/// x0 = 0 reads x1 then x3; x0 = 1 reads x2 then x4.
fn split_fixture() -> LinearBP {
    let edges = [
        (Target::Node(1), Target::Node(2)),
        (Target::Node(3), Target::Node(3)),
        (Target::Node(4), Target::Node(4)),
        (Target::Sink(false), Target::Sink(true)),
        (Target::Sink(true), Target::Node(5)),
        (Target::Sink(false), Target::Sink(true)),
    ];
    LinearBP::coordinate(6, &[0, 1, 2, 3, 4, 5], &edges, Target::Node(0)).unwrap()
}

/// Probability of every `(node, read set)` after `want` reads by walking
/// each path with weight 1/2 per read; early sinks pad with low variables.
fn path_oracle(p: &LinearBP, want: usize) -> BTreeMap<(Target, Vec<usize>), BigRational> {
    let n = p.n();
    let mut out = BTreeMap::new();
    let half = ratio(1, 2);
    let mut stack = vec![(p.source(), Vec::<usize>::new(), BigRational::one())];
    while let Some((at, read, pr)) = stack.pop() {
        let stop = read.len() == want || matches!(at, Target::Sink(_));
        if stop {
            let mut r = read.clone();
            let mut v = 0;
            while r.len() < want {
                if !r.contains(&v) {
                    r.push(v);
                }
                v += 1;
            }
            r.sort_unstable();
            *out.entry((at, r)).or_insert_with(BigRational::zero) += pr;
            continue;
        }
        let Target::Node(i) = at else { unreachable!() };
        let node = &p.nodes()[i];
        let var = node.query.first_one().unwrap();
        let mut r = read.clone();
        r.push(var);
        assert!(var < n);
        stack.push((node.e0, r.clone(), &pr * &half));
        stack.push((node.e1, r, &pr * &half));
    }
    out
}

fn check_cut(p: &LinearBP) {
    for d in 0..=p.n() {
        let probs = cut_probabilities(p, d).unwrap();
        let total: BigRational = probs.values().cloned().sum();
        assert!(total.is_one());
        let oracle = path_oracle(p, p.n() - d);
        let ours: BTreeMap<(Target, Vec<usize>), BigRational> =
            probs.into_iter().map(|(CutEvent { node, read_vars, .. }, pr)| ((node, read_vars), pr)).collect();
        assert_eq!(ours, oracle, "d = {d}");
        let events = robp_cut(p, d).unwrap();
        for e in &events {
            assert_eq!(e.read_vars.len() + e.free_vars.len(), p.n());
        }
        assert!(ours.keys().all(|(node, read)| events.iter().any(|e| e.node == *node && &e.read_vars == read)));
    }
}

#[test]
fn split_fixture_cut() {
    let p = split_fixture();
    assert!(p.is_strongly_read_once().holds);
    let events = robp_cut(&p, 4).unwrap();
    // after two reads: at node 3 having read {0,1}, at node 4 having read {0,2}
    let sets: Vec<Vec<usize>> = events.iter().map(|e| e.read_vars.clone()).collect();
    assert!(sets.contains(&vec![0, 1]) && sets.contains(&vec![0, 2]));
    check_cut(&p);
}

#[test]
fn catalog_cuts_sum_to_one() {
    for n in [4, 8, 12] {
        for (name, p) in catalog::baseline(n).unwrap() {
            if n == 12 && !name.starts_with("tribes") {
                continue;
            }
            let d = n / 2;
            let total: BigRational = cut_probabilities(&p, d).unwrap().values().cloned().sum();
            assert!(total.is_one(), "{name}");
        }
    }
    check_cut(&catalog::tribes(6, 2, 3).unwrap());
    check_cut(&catalog::parity(6, &[0, 2, 4]).unwrap());
}
