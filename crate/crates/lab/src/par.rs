//! Rayon drivers over the core kernels. Each splits the same enumeration the
//! serial kernel walks and merges partial results in stream order, so the
//! output is identical to the serial one for every worker count.

use anyhow::{ensure, Result};
use dalab_core::condense::{finish_report, tally_pattern, AffineCondenserReport, CondenserTally, SomewhereCondenser};
use dalab_core::lbp::{agreement_count, LinearBP};
use dalab_core::subspace::{gaussian_binomial, pivot_patterns};
use dalab_core::verify::{
    directional_cost, directional_patterns, merge, score_value, Definition, Directions, Measured, Partial, TruthTable,
    VerifyReport,
};
use rayon::prelude::*;

pub fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(workers).build()?)
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Exhaustive directional bias of a one-bit table, split by pivot pattern.
pub fn directional_bias(t: &TruthTable, k: usize, def: Definition, budget: u128) -> Result<VerifyReport> {
    ensure!(t.m() == 1, "the parallel kernel takes one output bit");
    ensure!(k >= 1 && k <= t.n(), "subspace dimension {k} outside 1..={}", t.n());
    let cost = directional_cost(t.n(), k);
    ensure!(cost <= budget, "directional enumeration needs {cost} evaluations, budget is {budget}");
    let dirs = Directions::new(t)?;
    let patterns = pivot_patterns(t.n(), k);
    let p = patterns
        .par_iter()
        .map(|p| directional_patterns(t, &dirs, k, def, std::slice::from_ref(p)))
        .reduce(|| Partial { score: 0, witness: None, instances: 0 }, merge);
    Ok(VerifyReport {
        property: "directional",
        n: t.n(),
        k,
        m: 1,
        definition: Some(def),
        sampled: false,
        value: Measured::Exact(score_value(def, p.score, k)),
        witness: p.witness,
        passed: None,
        instances: p.instances,
    })
}

/// Exhaustive affine condenser check, split by pivot pattern.
pub fn affine_condenser(
    c: &SomewhereCondenser,
    k: usize,
    threshold: usize,
    budget: u128,
) -> Result<AffineCondenserReport> {
    let n = c.n_in;
    let count = gaussian_binomial(n, k);
    ensure!(count <= budget, "condenser verification needs {count} subspaces, budget is {budget}");
    let rows = c.packed_rows()?;
    let tally = pivot_patterns(n, k)
        .par_iter()
        .map(|p| tally_pattern(&rows, n, p, threshold))
        .reduce(CondenserTally::new, CondenserTally::merge);
    Ok(finish_report(c, k, threshold, tally, true)?)
}

/// Agreements of `p` with `f` over the whole cube.
pub fn agreements<F: Fn(u64) -> bool + Sync>(p: &LinearBP, f: &F) -> u64 {
    let total = 1u64 << p.n();
    let chunk = (total / 256).max(1 << 10);
    (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|i| agreement_count(p, f, i * chunk, ((i + 1) * chunk).min(total)))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use dalab_core::condense::{basic_cond, ceil_times, verify_affine_condenser, VerifyMode};
    use dalab_core::dimexp::{search_dimension_expander, SearchConfig};
    use dalab_core::dist::ratio;
    use dalab_core::verify::Mode;

    #[test]
    fn directional_matches_serial_for_any_pool() {
        let t = TruthTable::from_fn(7, 1, |x| ((x * 0x5b) >> 3 ^ x >> 5) & 1).unwrap();
        for def in [Definition::Joint, Definition::XorBias] {
            let serial =
                dalab_core::verify::directional_bias(&t, 3, def, Mode::Exhaustive { budget: u128::MAX }).unwrap();
            for w in [1, 3, 8] {
                let r = pool(w).unwrap().install(|| directional_bias(&t, 3, def, u128::MAX)).unwrap();
                assert_eq!(r, serial);
            }
        }
    }

    #[test]
    fn condenser_matches_serial() {
        let e = search_dimension_expander(&SearchConfig::new(4, 2, ratio(0, 1), 9)).unwrap();
        let c = basic_cond(&e, 8).unwrap();
        let gamma = ratio(5, 8);
        let serial = verify_affine_condenser(&c, 3, &gamma, &VerifyMode::Exhaustive { budget: u128::MAX }).unwrap();
        let r = pool(4).unwrap().install(|| affine_condenser(&c, 3, ceil_times(&gamma, c.m_out), u128::MAX)).unwrap();
        assert_eq!(r, serial);
    }

    #[test]
    fn agreements_cover_cube() {
        let p = dalab_core::lbp::catalog::parity(12, &[0, 3, 7]).unwrap();
        assert_eq!(agreements(&p, &|x: u64| (x & 0b1000_1001).count_ones() % 2 == 1), 4096);
        assert_eq!(agreements(&p, &|_| false), 2048);
    }
}
