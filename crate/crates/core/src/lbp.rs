//! Linear branching programs: a DAG whose inner nodes query `⟨ℓ_v, x⟩` and
//! follow the edge labelled with the answer. Coordinate queries give ordinary
//! branching programs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use num_rational::BigRational;

use crate::bits::BitVec;
use crate::dist::ratio;
use crate::error::{ensure_dim, Error, Result};
use crate::matrix::GF2Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Node(usize),
    Sink(bool),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub query: BitVec,
    pub e0: Target,
    pub e1: Target,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearBP {
    n: usize,
    nodes: Vec<Node>,
    source: Target,
    order: Vec<usize>,
}

fn malformed(msg: alloc::string::String) -> Error {
    Error::MalformedProgram(msg)
}

impl LinearBP {
    /// Checks query widths, edge targets, acyclicity and that every node is
    /// reachable from the source.
    pub fn new(n: usize, nodes: Vec<Node>, source: Target) -> Result<Self> {
        let len = nodes.len();
        let in_range = |t: Target| match t {
            Target::Node(i) => i < len,
            Target::Sink(_) => true,
        };
        if !in_range(source) {
            return Err(malformed(alloc::format!("source {source:?} out of range")));
        }
        for (i, v) in nodes.iter().enumerate() {
            if v.query.len() != n {
                return Err(malformed(alloc::format!("node {i} query has {} bits, not {n}", v.query.len())));
            }
            if !in_range(v.e0) || !in_range(v.e1) {
                return Err(malformed(alloc::format!("node {i} has an edge out of range")));
            }
        }
        // Kahn's algorithm over the nodes reachable from the source
        let mut reach = alloc::vec![false; len];
        let mut stack: Vec<usize> = match source {
            Target::Node(s) => alloc::vec![s],
            Target::Sink(_) => Vec::new(),
        };
        while let Some(v) = stack.pop() {
            if core::mem::replace(&mut reach[v], true) {
                continue;
            }
            for t in [nodes[v].e0, nodes[v].e1] {
                if let Target::Node(u) = t {
                    stack.push(u);
                }
            }
        }
        if let Some(i) = reach.iter().position(|&r| !r) {
            return Err(malformed(alloc::format!("node {i} is unreachable from the source")));
        }
        let mut indeg = alloc::vec![0usize; len];
        for v in &nodes {
            for t in [v.e0, v.e1] {
                if let Target::Node(u) = t {
                    indeg[u] += 1;
                }
            }
        }
        if let Target::Node(s) = source {
            if indeg[s] != 0 {
                return Err(malformed("the source has an incoming edge".into()));
            }
        }
        let mut ready: Vec<usize> = (0..len).filter(|&i| indeg[i] == 0).collect();
        if ready.len() > 1 {
            return Err(malformed("more than one node without incoming edges".into()));
        }
        let mut order = Vec::with_capacity(len);
        while let Some(v) = ready.pop() {
            order.push(v);
            for t in [nodes[v].e0, nodes[v].e1] {
                if let Target::Node(u) = t {
                    indeg[u] -= 1;
                    if indeg[u] == 0 {
                        ready.push(u);
                    }
                }
            }
        }
        if order.len() != len {
            return Err(malformed("the program has a cycle".into()));
        }
        Ok(LinearBP { n, nodes, source, order })
    }

    /// A program reading coordinates: `vars[i]` is the variable of node `i`.
    pub fn coordinate(n: usize, vars: &[usize], edges: &[(Target, Target)], source: Target) -> Result<Self> {
        if vars.len() != edges.len() {
            return Err(malformed("one edge pair per node".into()));
        }
        let nodes = vars
            .iter()
            .zip(edges)
            .map(|(&v, &(e0, e1))| {
                if v >= n {
                    return Err(malformed(alloc::format!("variable {v} ≥ {n}")));
                }
                let mut q = BitVec::zeros(n);
                q.set(v, true);
                Ok(Node { query: q, e0, e1 })
            })
            .collect::<Result<Vec<_>>>()?;
        LinearBP::new(n, nodes, source)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn source(&self) -> Target {
        self.source
    }

    /// Number of inner nodes.
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    /// Inner nodes in topological order.
    pub fn topological_order(&self) -> &[usize] {
        &self.order
    }

    pub fn eval(&self, x: &BitVec) -> Result<bool> {
        ensure_dim("program input", self.n, x.len())?;
        let mut at = self.source;
        loop {
            match at {
                Target::Sink(b) => return Ok(b),
                Target::Node(v) => {
                    let node = &self.nodes[v];
                    at = if node.query.dot(x) { node.e1 } else { node.e0 };
                }
            }
        }
    }

    /// Packed evaluation for `n ≤ 64`.
    pub fn eval_u64(&self, x: u64) -> bool {
        let mut at = self.source;
        loop {
            match at {
                Target::Sink(b) => return b,
                Target::Node(v) => {
                    let node = &self.nodes[v];
                    let bit = (node.query.words()[0] & x).count_ones() & 1 == 1;
                    at = if bit { node.e1 } else { node.e0 };
                }
            }
        }
    }

    /// `Pre_v` and `Post_v` for every inner node.
    pub fn spans(&self) -> SpanAnnotation {
        let len = self.nodes.len();
        let mut pre: Vec<GF2Matrix> = alloc::vec![GF2Matrix::empty(self.n); len];
        for &v in &self.order {
            let with_own = pre[v].vstack(&single(&self.nodes[v].query)).expect("same width").row_space();
            for t in [self.nodes[v].e0, self.nodes[v].e1] {
                if let Target::Node(u) = t {
                    pre[u] = pre[u].vstack(&with_own).expect("same width").row_space();
                }
            }
        }
        let mut post: Vec<GF2Matrix> = alloc::vec![GF2Matrix::empty(self.n); len];
        for &v in self.order.iter().rev() {
            let mut acc = single(&self.nodes[v].query);
            for t in [self.nodes[v].e0, self.nodes[v].e1] {
                if let Target::Node(u) = t {
                    acc = acc.vstack(&post[u]).expect("same width");
                }
            }
            post[v] = acc.row_space();
        }
        SpanAnnotation { pre, post }
    }

    /// `ℓ_v ∉ Pre_v` at every node; the witness is the first violating node
    /// in topological order with its query.
    pub fn is_weakly_read_once(&self) -> ReadOnceCheck {
        let spans = self.spans();
        for &v in &self.order {
            let q = &self.nodes[v].query;
            if in_span(&spans.pre[v], q) {
                return ReadOnceCheck { holds: false, witness: Some(Violation { node: v, vector: q.clone() }) };
            }
        }
        ReadOnceCheck { holds: true, witness: None }
    }

    /// `Pre_v ∩ Post_v = {0}` at every node.
    pub fn is_strongly_read_once(&self) -> ReadOnceCheck {
        let spans = self.spans();
        for &v in &self.order {
            if let Some(w) = intersection_vector(&spans.pre[v], &spans.post[v]) {
                return ReadOnceCheck { holds: false, witness: Some(Violation { node: v, vector: w }) };
            }
        }
        ReadOnceCheck { holds: true, witness: None }
    }

    /// True when every query has weight one.
    pub fn is_coordinate(&self) -> bool {
        self.nodes.iter().all(|v| v.query.weight() == 1)
    }

    fn var_of(&self, v: usize) -> usize {
        self.nodes[v].query.first_one().expect("coordinate query")
    }
}

fn single(q: &BitVec) -> GF2Matrix {
    GF2Matrix::from_rows(q.len(), alloc::vec![q.clone()]).expect("width")
}

fn in_span(basis: &GF2Matrix, v: &BitVec) -> bool {
    let (r, pivots) = basis.rref();
    GF2Matrix::reduce(&r, &pivots, v).is_zero()
}

/// A nonzero vector of `span(a) ∩ span(b)`, read from the kernel of the
/// stacked bases.
pub fn intersection_vector(a: &GF2Matrix, b: &GF2Matrix) -> Option<BitVec> {
    let a = a.row_space();
    let b = b.row_space();
    if a.n_rows() == 0 || b.n_rows() == 0 {
        return None;
    }
    let stacked = a.vstack(&b).ok()?;
    let ker = stacked.transpose().kernel_basis();
    let k = ker.rows().first()?;
    let coeffs = k.prefix(a.n_rows());
    let v = a.combine_rows(&coeffs).ok()?;
    (!v.is_zero()).then_some(v)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanAnnotation {
    pub pre: Vec<GF2Matrix>,
    pub post: Vec<GF2Matrix>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub node: usize,
    pub vector: BitVec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReadOnceCheck {
    pub holds: bool,
    pub witness: Option<Violation>,
}

/// Largest `n` for exhaustive correlation.
pub const EXHAUSTIVE_MAX_N: usize = 28;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrelationMode {
    Exhaustive,
    Sample { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Correlation {
    Exact(BigRational),
    /// Estimate with a two-sided Hoeffding radius at `confidence`.
    Estimate {
        value: f64,
        radius: f64,
        confidence: f64,
        samples: u64,
    },
}

/// Two-sided Hoeffding radius for `samples` draws at confidence `1 − fail`.
pub fn hoeffding_radius(samples: u64, fail: f64) -> f64 {
    libm::sqrt(libm::log(2.0 / fail) / (2.0 * samples as f64))
}

/// Agreements of `P` with `f` over `x ∈ [lo, hi)` (packed, `n ≤ 64`).
pub fn agreement_count<F: Fn(u64) -> bool>(p: &LinearBP, f: &F, lo: u64, hi: u64) -> u64 {
    (lo..hi).filter(|&x| p.eval_u64(x) == f(x)).count() as u64
}

/// `Pr_x[P(x) = f(x)]` over uniform `x`.
pub fn correlation<F: Fn(u64) -> bool>(p: &LinearBP, f: F, mode: CorrelationMode) -> Result<Correlation> {
    match mode {
        CorrelationMode::Exhaustive => {
            if p.n() > EXHAUSTIVE_MAX_N {
                return Err(Error::BudgetExceeded {
                    what: "exhaustive correlation",
                    needed: 1 << p.n(),
                    budget: 1 << EXHAUSTIVE_MAX_N,
                });
            }
            let total = 1u64 << p.n();
            Ok(Correlation::Exact(ratio(agreement_count(p, &f, 0, total) as u128, total as u128)))
        }
        CorrelationMode::Sample { samples, seed } => {
            use rand::{Rng, SeedableRng};
            if samples == 0 || p.n() > 64 {
                return Err(Error::InvalidParameter("sampling needs samples ≥ 1 and n ≤ 64".into()));
            }
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mask = if p.n() == 64 { u64::MAX } else { (1u64 << p.n()) - 1 };
            let mut agree = 0u64;
            for _ in 0..samples {
                let x = rng.gen::<u64>() & mask;
                if p.eval_u64(x) == f(x) {
                    agree += 1;
                }
            }
            Ok(Correlation::Estimate {
                value: agree as f64 / samples as f64,
                radius: hoeffding_radius(samples, 0.01),
                confidence: 0.99,
                samples,
            })
        }
    }
}

/// Chain of `n − k` nodes testing `⟨w_j, x⟩ = ⟨w_j, shift⟩` for a basis
/// `w_1, …` of the orthogonal complement of `span(basis)`.
pub fn subspace_indicator(basis: &GF2Matrix, shift: &BitVec) -> Result<LinearBP> {
    let n = basis.n_cols();
    ensure_dim("indicator shift", n, shift.len())?;
    if basis.rank() != basis.n_rows() {
        return Err(Error::RankDeficient { expected: basis.n_rows(), found: basis.rank() });
    }
    let dual = basis.kernel_basis();
    let len = dual.n_rows();
    let nodes = dual
        .rows()
        .iter()
        .enumerate()
        .map(|(j, w)| {
            let next = if j + 1 == len { Target::Sink(true) } else { Target::Node(j + 1) };
            let (e0, e1) = if w.dot(shift) { (Target::Sink(false), next) } else { (next, Target::Sink(false)) };
            Node { query: w.clone(), e0, e1 }
        })
        .collect();
    let source = if len == 0 { Target::Sink(true) } else { Target::Node(0) };
    LinearBP::new(n, nodes, source)
}

/// One event of the cut: the computation sits at `node` having read
/// `read_vars`; the remaining `free_vars` are still uniform.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CutEvent {
    pub node: Target,
    pub read_vars: Vec<usize>,
    pub free_vars: Vec<usize>,
}

fn pad(read: &BTreeSet<usize>, n: usize, want: usize) -> BTreeSet<usize> {
    let mut r = read.clone();
    for v in 0..n {
        if r.len() >= want {
            break;
        }
        r.insert(v);
    }
    r
}

fn event(node: Target, read: BTreeSet<usize>, n: usize) -> CutEvent {
    let free = (0..n).filter(|v| !read.contains(v)).collect();
    CutEvent { node, read_vars: read.into_iter().collect(), free_vars: free }
}

fn check_robp(p: &LinearBP, d: usize) -> Result<()> {
    if d > p.n() {
        return Err(Error::InvalidParameter(alloc::format!("d = {d} exceeds n = {}", p.n())));
    }
    if !p.is_coordinate() {
        return Err(malformed("cut needs coordinate queries".into()));
    }
    if !p.is_weakly_read_once().holds {
        return Err(malformed("cut needs a read-once program".into()));
    }
    Ok(())
}

/// The events reached after exactly `n − d` reads, split by read set. Paths
/// that stop early are padded with their lowest unread variables.
pub fn robp_cut(p: &LinearBP, d: usize) -> Result<Vec<CutEvent>> {
    check_robp(p, d)?;
    let n = p.n();
    let want = n - d;
    let mut seen: BTreeSet<(Target, BTreeSet<usize>)> = BTreeSet::new();
    let mut out: BTreeSet<CutEvent> = BTreeSet::new();
    let mut stack = alloc::vec![(p.source(), BTreeSet::new())];
    while let Some((at, read)) = stack.pop() {
        if !seen.insert((at, read.clone())) {
            continue;
        }
        if read.len() == want {
            out.insert(event(at, read, n));
            continue;
        }
        match at {
            Target::Sink(_) => {
                out.insert(event(at, pad(&read, n, want), n));
            }
            Target::Node(v) => {
                let mut next = read.clone();
                next.insert(p.var_of(v));
                stack.push((p.nodes[v].e0, next.clone()));
                stack.push((p.nodes[v].e1, next));
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// The event input `x` falls into.
pub fn cut_event_of(p: &LinearBP, d: usize, x: &BitVec) -> Result<CutEvent> {
    check_robp(p, d)?;
    ensure_dim("program input", p.n(), x.len())?;
    let n = p.n();
    let want = n - d;
    let mut read = BTreeSet::new();
    let mut at = p.source();
    while read.len() < want {
        match at {
            Target::Sink(_) => return Ok(event(at, pad(&read, n, want), n)),
            Target::Node(v) => {
                let var = p.var_of(v);
                read.insert(var);
                at = if x.get(var) { p.nodes[v].e1 } else { p.nodes[v].e0 };
            }
        }
    }
    Ok(event(at, read, n))
}

/// Exact probability of every event hit by some input, by enumeration.
pub fn cut_probabilities(p: &LinearBP, d: usize) -> Result<BTreeMap<CutEvent, BigRational>> {
    if p.n() > 20 {
        return Err(Error::BudgetExceeded { what: "cut enumeration", needed: 1 << p.n(), budget: 1 << 20 });
    }
    let mut counts: BTreeMap<CutEvent, u128> = BTreeMap::new();
    for x in 0..1u64 << p.n() {
        *counts.entry(cut_event_of(p, d, &BitVec::from_u64(p.n(), x))?).or_insert(0) += 1;
    }
    let total = 1u128 << p.n();
    Ok(counts.into_iter().map(|(e, c)| (e, ratio(c, total))).collect())
}

/// Baseline read-once programs for the separation demo.
pub mod catalog {
    use super::*;

    /// Parity of `vars`, two nodes per level.
    pub fn parity(n: usize, vars: &[usize]) -> Result<LinearBP> {
        if vars.is_empty() {
            return LinearBP::new(n, Vec::new(), Target::Sink(false));
        }
        // node 2i tracks parity 0 before reading vars[i], node 2i+1 parity 1
        let k = vars.len();
        let mut nodes = Vec::with_capacity(2 * k);
        for i in 0..k {
            for par in [false, true] {
                let mut q = BitVec::zeros(n);
                q.set(vars[i], true);
                let next = |p: bool| if i + 1 == k { Target::Sink(p) } else { Target::Node(2 * (i + 1) + p as usize) };
                nodes.push(Node { query: q, e0: next(par), e1: next(!par) });
            }
        }
        // the parity-1 node of the first level is unreachable; drop it
        let remap = |t: Target| match t {
            Target::Node(j) => Target::Node(j - 1),
            s => s,
        };
        let nodes: Vec<Node> = nodes
            .into_iter()
            .enumerate()
            .filter(|&(j, _)| j != 1)
            .map(|(_, v)| Node { e0: remap(v.e0), e1: remap(v.e1), query: v.query })
            .collect();
        LinearBP::new(n, nodes, Target::Node(0))
    }

    /// AND of `vars`.
    pub fn conjunction(n: usize, vars: &[usize]) -> Result<LinearBP> {
        let k = vars.len();
        let edges: Vec<(Target, Target)> = (0..k)
            .map(|i| (Target::Sink(false), if i + 1 == k { Target::Sink(true) } else { Target::Node(i + 1) }))
            .collect();
        let source = if k == 0 { Target::Sink(true) } else { Target::Node(0) };
        LinearBP::coordinate(n, vars, &edges, source)
    }

    /// OR over `count` disjoint tribes of `width` consecutive variables, each
    /// an AND.
    pub fn tribes(n: usize, width: usize, count: usize) -> Result<LinearBP> {
        if width == 0 || width * count > n {
            return Err(Error::InvalidParameter("tribes do not fit".into()));
        }
        let total = width * count;
        let vars: Vec<usize> = (0..total).collect();
        let edges: Vec<(Target, Target)> = (0..total)
            .map(|i| {
                let (tribe, pos) = (i / width, i % width);
                let fail = if tribe + 1 == count { Target::Sink(false) } else { Target::Node((tribe + 1) * width) };
                let pass = if pos + 1 == width { Target::Sink(true) } else { Target::Node(i + 1) };
                (fail, pass)
            })
            .collect();
        LinearBP::coordinate(n, &vars, &edges, if total == 0 { Target::Sink(false) } else { Target::Node(0) })
    }

    /// Parities of every prefix, conjunctions of every prefix, and tribes of
    /// width 2 and 3.
    pub fn baseline(n: usize) -> Result<Vec<(alloc::string::String, LinearBP)>> {
        let mut out = Vec::new();
        for k in 1..=n {
            let vars: Vec<usize> = (0..k).collect();
            out.push((alloc::format!("parity[{k}]"), parity(n, &vars)?));
            out.push((alloc::format!("and[{k}]"), conjunction(n, &vars)?));
        }
        for w in [2, 3] {
            if n >= w {
                out.push((alloc::format!("tribes[{w}x{}]", n / w), tribes(n, w, n / w)?));
            }
        }
        Ok(out)
    }
}

/// Size and agreement parameters implied for `SROLBP_{√(ε/2)}(f)` by a
/// directional bias `ε` at entropy `k`: returns `(√(ε/2), ε·2^{n−k−1})`.
pub fn implied_srolbp_bound(eps: f64, n: usize, k: usize) -> (f64, f64) {
    (libm::sqrt(eps / 2.0), eps * libm::pow(2.0, n as f64 - k as f64 - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn q(s: &str) -> BitVec {
        BitVec::from_bitstr(s)
    }

    #[test]
    fn single_query_is_coordinate() {
        let p = LinearBP::coordinate(3, &[0], &[(Target::Sink(false), Target::Sink(true))], Target::Node(0)).unwrap();
        for x in 0..8u64 {
            assert_eq!(p.eval_u64(x), x & 1 == 1);
            assert_eq!(p.eval(&BitVec::from_u64(3, x)).unwrap(), x & 1 == 1);
        }
    }

    #[test]
    fn malformed_programs_rejected() {
        let loop_node = Node { query: q("10"), e0: Target::Node(0), e1: Target::Sink(true) };
        assert!(LinearBP::new(2, alloc::vec![loop_node], Target::Node(0)).is_err());
        let orphan = alloc::vec![
            Node { query: q("10"), e0: Target::Sink(false), e1: Target::Sink(true) },
            Node { query: q("01"), e0: Target::Sink(false), e1: Target::Sink(true) },
        ];
        assert!(LinearBP::new(2, orphan, Target::Node(0)).is_err());
        let wide = alloc::vec![Node { query: q("101"), e0: Target::Sink(false), e1: Target::Sink(true) }];
        assert!(LinearBP::new(2, wide, Target::Node(0)).is_err());
    }

    #[test]
    fn repeated_query_violates_weak() {
        let l = q("1100");
        let nodes = alloc::vec![
            Node { query: l.clone(), e0: Target::Node(1), e1: Target::Node(1) },
            Node { query: l.clone(), e0: Target::Sink(false), e1: Target::Sink(true) },
        ];
        let p = LinearBP::new(4, nodes, Target::Node(0)).unwrap();
        let w = p.is_weakly_read_once();
        assert!(!w.holds);
        assert_eq!(w.witness.unwrap(), Violation { node: 1, vector: l });
    }

    #[test]
    fn hidden_reread_violates_strong() {
        // x1, then a subprogram at node 1 whose branches read x1 ⊕ x2 and x2
        let nodes = alloc::vec![
            Node { query: q("100"), e0: Target::Node(1), e1: Target::Node(1) },
            Node { query: q("001"), e0: Target::Node(2), e1: Target::Node(3) },
            Node { query: q("110"), e0: Target::Sink(false), e1: Target::Sink(true) },
            Node { query: q("010"), e0: Target::Sink(false), e1: Target::Sink(true) },
        ];
        let p = LinearBP::new(3, nodes, Target::Node(0)).unwrap();
        assert!(p.is_weakly_read_once().holds);
        let s = p.is_strongly_read_once();
        assert!(!s.holds);
        assert_eq!(s.witness.unwrap(), Violation { node: 1, vector: q("100") });
        let spans = p.spans();
        assert_eq!(spans.pre[1].n_rows(), 1);
        assert_eq!(spans.post[1].n_rows(), 3);
        assert_eq!(spans.pre[2].n_rows(), 2);
    }

    #[test]
    fn indicator_edge_cases() {
        let full = subspace_indicator(&GF2Matrix::identity(4), &BitVec::zeros(4)).unwrap();
        assert_eq!(full.size(), 0);
        assert!((0..16).all(|x| full.eval_u64(x)));
        let shift = q("1010");
        let point = subspace_indicator(&GF2Matrix::empty(4), &shift).unwrap();
        assert_eq!(point.size(), 4);
        for x in 0..16u64 {
            assert_eq!(point.eval_u64(x), x == shift.to_u64());
        }
        assert!(point.is_strongly_read_once().holds);
    }

    #[test]
    fn correlation_examples() {
        let p = LinearBP::coordinate(2, &[0], &[(Target::Sink(false), Target::Sink(true))], Target::Node(0)).unwrap();
        let exact = |f: &dyn Fn(u64) -> bool| match correlation(&p, f, CorrelationMode::Exhaustive).unwrap() {
            Correlation::Exact(r) => r,
            _ => unreachable!(),
        };
        assert!(exact(&|x| x & 1 == 1).is_one());
        assert_eq!(exact(&|x| x & 1 == 0), ratio(0, 1));
        assert_eq!(exact(&|x| (x ^ x >> 1) & 1 == 1), ratio(1, 2));
        match correlation(&p, |x| x & 1 == 1, CorrelationMode::Sample { samples: 1000, seed: 1 }).unwrap() {
            Correlation::Estimate { value, radius, .. } => {
                assert_eq!(value, 1.0);
                assert!(radius > 0.05 && radius < 0.06);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn chain_cut() {
        let n = 5;
        let vars: Vec<usize> = (0..n).collect();
        let edges: Vec<(Target, Target)> = (0..n)
            .map(|i| {
                let t = if i + 1 == n { Target::Sink(true) } else { Target::Node(i + 1) };
                (t, t)
            })
            .collect();
        let p = LinearBP::coordinate(n, &vars, &edges, Target::Node(0)).unwrap();
        let ev = robp_cut(&p, 2).unwrap();
        assert_eq!(
            ev,
            alloc::vec![CutEvent {
                node: Target::Node(3),
                read_vars: alloc::vec![0, 1, 2],
                free_vars: alloc::vec![3, 4]
            }]
        );
        let all = robp_cut(&p, n).unwrap();
        assert_eq!(all, alloc::vec![CutEvent { node: Target::Node(0), read_vars: alloc::vec![], free_vars: vars }]);
        assert!(robp_cut(&p, n + 1).is_err());
    }

    #[test]
    fn catalog_programs_compute() {
        let n = 6;
        let par = catalog::parity(n, &[0, 2, 5]).unwrap();
        let and = catalog::conjunction(n, &[1, 3]).unwrap();
        let tr = catalog::tribes(n, 2, 3).unwrap();
        for x in 0..64u64 {
            assert_eq!(par.eval_u64(x), (x & 0b100101).count_ones() % 2 == 1);
            assert_eq!(and.eval_u64(x), x & 0b1010 == 0b1010);
            assert_eq!(tr.eval_u64(x), (0..3).any(|t| x >> (2 * t) & 3 == 3));
        }
        for (_, p) in catalog::baseline(n).unwrap() {
            assert!(p.is_strongly_read_once().holds);
        }
    }

    #[test]
    fn implied_bound_values() {
        let (c, s) = implied_srolbp_bound(0.125, 10, 4);
        assert_eq!(c, 0.25);
        assert_eq!(s, 4.0);
    }
}
