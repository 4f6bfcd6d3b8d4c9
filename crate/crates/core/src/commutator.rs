//! The term-condition commutator and the relations built around it.
//!
//! A quad `[x, y, u, z]` is the 2x2 matrix with top row `(x, y)` and
//! bottom row `(u, z)`.

use serde::Serialize;

use crate::algebra::FiniteAlgebra;
use crate::closure::closure_in_power;
use crate::conditions::{ChainKind, TermChain};
use crate::congruence::{cg, cg_over};
use crate::error::{Error, Result};
use crate::partition::{Partition, UnionFind};

pub type Quad = [usize; 4];

/// The subalgebra `M(α, β)` of `A^4`, quads packed as base-`n` integers.
#[derive(Debug, Clone)]
pub struct MMatrices {
    n: usize,
    packed: Vec<u64>,
    sorted: Vec<u64>,
}

impl MMatrices {
    fn pack(n: usize, q: Quad) -> u64 {
        let n = n as u64;
        ((q[0] as u64 * n + q[1] as u64) * n + q[2] as u64) * n + q[3] as u64
    }

    fn unpack(n: usize, mut p: u64) -> Quad {
        let n = n as u64;
        let mut q = [0; 4];
        for slot in q.iter_mut().rev() {
            *slot = (p % n) as usize;
            p /= n;
        }
        q
    }

    pub fn len(&self) -> usize {
        self.packed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.packed.is_empty()
    }

    /// Quads in generation order.
    pub fn iter(&self) -> impl Iterator<Item = Quad> + '_ {
        self.packed.iter().map(move |&p| Self::unpack(self.n, p))
    }

    pub fn contains(&self, q: Quad) -> bool {
        q.iter().all(|&v| v < self.n) && self.sorted.binary_search(&Self::pack(self.n, q)).is_ok()
    }
}

/// Generates `M(α, β)` from `[a a; a' a']` for `a α a'` and `[b b'; b b']`
/// for `b β b'`.
pub fn m_matrices(alg: &FiniteAlgebra, alpha: &Partition, beta: &Partition, cap: usize) -> Result<MMatrices> {
    check_partition(alg, alpha)?;
    check_partition(alg, beta)?;
    let mut gens: Vec<Vec<usize>> = alpha.pairs().into_iter().map(|(a, b)| vec![a, a, b, b]).collect();
    gens.extend(beta.pairs().into_iter().map(|(a, b)| vec![a, b, a, b]));
    let closure = closure_in_power(alg, 4, &gens, cap);
    if !closure.is_complete() {
        return Err(Error::CapExceeded { cap });
    }
    let n = alg.size;
    let packed: Vec<u64> = closure
        .iter()
        .map(|t| MMatrices::pack(n, [t[0] as usize, t[1] as usize, t[2] as usize, t[3] as usize]))
        .collect();
    let mut sorted = packed.clone();
    sorted.sort_unstable();
    Ok(MMatrices { n, packed, sorted })
}

fn check_partition(alg: &FiniteAlgebra, p: &Partition) -> Result<()> {
    if p.len() != alg.size {
        return Err(Error::PartitionSize {
            expected: alg.size,
            actual: p.len(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CentralityReport {
    pub holds: bool,
    /// A quad whose top row is δ-related and whose bottom row is not.
    pub counterexample: Option<Quad>,
}

/// Whether `C(α, β; δ)` holds on an already generated `M(α, β)`.
pub fn centralizes_in(m: &MMatrices, delta: &Partition) -> CentralityReport {
    let counterexample = m
        .iter()
        .find(|q| delta.related(q[0], q[1]) && !delta.related(q[2], q[3]));
    CentralityReport {
        holds: counterexample.is_none(),
        counterexample,
    }
}

/// `C(α, β; δ)`: α centralizes β modulo δ.
pub fn centralizes(
    alg: &FiniteAlgebra,
    alpha: &Partition,
    beta: &Partition,
    delta: &Partition,
    cap: usize,
) -> Result<CentralityReport> {
    check_partition(alg, delta)?;
    Ok(centralizes_in(&m_matrices(alg, alpha, beta, cap)?, delta))
}

/// The least congruence δ with every quad of `quads` satisfying the term
/// condition modulo δ, by iterating from `0_A`.
pub fn term_condition_fixpoint(alg: &FiniteAlgebra, quads: &[Quad]) -> Partition {
    let mut delta = Partition::discrete(alg.size);
    loop {
        let bottoms: Vec<(usize, usize)> = quads
            .iter()
            .filter(|q| delta.related(q[0], q[1]) && !delta.related(q[2], q[3]))
            .map(|q| (q[2], q[3]))
            .collect();
        if bottoms.is_empty() {
            return delta;
        }
        delta = cg_over(alg, &delta, &bottoms);
    }
}

/// `[α, β]`, the least δ with `C(α, β; δ)`.
pub fn commutator_tc(alg: &FiniteAlgebra, alpha: &Partition, beta: &Partition, cap: usize) -> Result<Partition> {
    let m = m_matrices(alg, alpha, beta, cap)?;
    let quads: Vec<Quad> = m.iter().collect();
    Ok(term_condition_fixpoint(alg, &quads))
}

/// The center: the largest α with `C(α, 1_A; 0_A)`, as the join of the
/// centralizing principal congruences.
pub fn center(alg: &FiniteAlgebra, cap: usize) -> Result<Partition> {
    let n = alg.size;
    let (zero, one) = (Partition::discrete(n), Partition::full(n));
    let mut zeta = zero.clone();
    for a in 0..n {
        for b in a + 1..n {
            if zeta.related(a, b) {
                continue;
            }
            let theta = cg(alg, &[(a, b)]);
            if centralizes(alg, &theta, &one, &zero, cap)?.holds {
                zeta = zeta.join(&theta);
            }
        }
    }
    Ok(zeta)
}

#[derive(Debug, Clone)]
pub struct AbelianAnalysis {
    pub abelian: bool,
    /// `[1_A, 1_A]`.
    pub commutator: Partition,
    /// `A / [1_A, 1_A]` and the quotient map.
    pub abelianization: FiniteAlgebra,
    pub projection: Vec<usize>,
    /// Whether the diagonal of `A×A` is a whole class of `Δ_1(1)`.
    pub diagonal_coset: bool,
}

pub fn abelian_analysis(alg: &FiniteAlgebra, cap: usize) -> Result<AbelianAnalysis> {
    let n = alg.size;
    let one = Partition::full(n);
    let commutator = commutator_tc(alg, &one, &one, cap)?;
    let (abelianization, projection) = alg.quotient(&commutator)?;
    let delta = delta_rel(alg, &one, &one)?;
    let diag = delta.index_of(0, 0);
    let diagonal_coset = (0..delta.pairs.len())
        .filter(|&i| delta.partition.related(i, diag))
        .all(|i| delta.pairs[i].0 == delta.pairs[i].1);
    Ok(AbelianAnalysis {
        abelian: commutator.is_discrete(),
        commutator,
        abelianization,
        projection,
        diagonal_coset,
    })
}

/// `A_α` and the congruence `Δ_α(β)` on it.
#[derive(Debug, Clone)]
pub struct DeltaRelation {
    /// The α-related pairs, lexicographically; pair `i` is element `i`
    /// of `algebra`.
    pub pairs: Vec<(usize, usize)>,
    pub algebra: FiniteAlgebra,
    pub partition: Partition,
    n: usize,
    lookup: Vec<usize>,
}

impl DeltaRelation {
    /// Element of `A_α` holding the column `[a; b]`. Panics unless `a α b`.
    pub fn index_of(&self, a: usize, b: usize) -> usize {
        let i = self.lookup[a * self.n + b];
        assert!(i != usize::MAX, "({a},{b}) is not an α-pair");
        i
    }

    pub fn related(&self, p: (usize, usize), q: (usize, usize)) -> bool {
        self.partition.related(self.index_of(p.0, p.1), self.index_of(q.0, q.1))
    }
}

/// `A_α`: the subalgebra of `A×A` on the α-related pairs.
pub fn pair_algebra(alg: &FiniteAlgebra, alpha: &Partition) -> Result<(FiniteAlgebra, Vec<(usize, usize)>)> {
    check_partition(alg, alpha)?;
    let n = alg.size;
    let square = alg.product(alg)?;
    // Rejects non-congruences with the offending operation named.
    alg.quotient(alpha)?;
    let codes: Vec<usize> = alpha.pairs().into_iter().map(|(a, b)| a * n + b).collect();
    let (sub, universe) = square.subalgebra(&codes)?;
    debug_assert_eq!(universe.len(), codes.len());
    let pairs = universe.iter().map(|&c| (c / n, c % n)).collect();
    Ok((sub, pairs))
}

/// `Δ_α(β)`: the congruence on `A_α` generated by `([b; b], [b'; b'])`
/// for `b β b'`.
pub fn delta_rel(alg: &FiniteAlgebra, alpha: &Partition, beta: &Partition) -> Result<DeltaRelation> {
    check_partition(alg, beta)?;
    let n = alg.size;
    let (algebra, pairs) = pair_algebra(alg, alpha)?;
    let mut lookup = vec![usize::MAX; n * n];
    for (i, &(a, b)) in pairs.iter().enumerate() {
        lookup[a * n + b] = i;
    }
    let gens: Vec<(usize, usize)> = beta
        .pairs()
        .into_iter()
        .filter(|&(b, c)| b < c)
        .map(|(b, c)| (lookup[b * n + b], lookup[c * n + c]))
        .collect();
    let partition = cg(&algebra, &gens);
    Ok(DeltaRelation {
        pairs,
        algebra,
        partition,
        n,
        lookup,
    })
}

/// Checks `Δ_α(β)` against the equivalence on `A_α` generated by the
/// column pairs `([x; u], [y; z])` of `M(α, β)`.
pub fn delta_matches_m(alg: &FiniteAlgebra, alpha: &Partition, beta: &Partition, cap: usize) -> Result<bool> {
    let delta = delta_rel(alg, alpha, beta)?;
    let m = m_matrices(alg, alpha, beta, cap)?;
    let mut uf = UnionFind::new(delta.pairs.len());
    for [x, y, u, z] in m.iter() {
        uf.union(delta.index_of(x, u), delta.index_of(y, z));
    }
    Ok(uf.into_partition() == delta.partition)
}

/// Licence for [`commutator_delta`], whose answer is only meaningful in
/// a congruence modular variety.
#[derive(Debug, Clone, Copy)]
pub enum CmGate<'a> {
    /// Day terms for the algebra; they are re-verified.
    Day(&'a TermChain),
    /// The caller vouches for congruence modularity.
    Assume,
}

/// `[α, β]` read off `Δ_α(β)`: `x [α,β] y` iff `[x; y] Δ [y; y]`.
pub fn commutator_delta(alg: &FiniteAlgebra, alpha: &Partition, beta: &Partition, gate: CmGate) -> Result<Partition> {
    if let CmGate::Day(chain) = gate {
        if chain.kind != ChainKind::Day {
            return Err(Error::ChainKind(format!("expected Day terms, got {}", chain.kind)));
        }
        if !chain.verify(alg)? {
            return Err(Error::NotModular("supplied Day terms fail their identities".into()));
        }
    }
    let n = alg.size;
    let delta = delta_rel(alg, alpha, beta)?;
    let mut rel = vec![false; n * n];
    for &(x, y) in &delta.pairs {
        rel[x * n + y] = delta.related((x, y), (y, y));
    }
    let p = Partition::generated_by(n, (0..n * n).filter(|&i| rel[i]).map(|i| (i / n, i % n)));
    if let Some(i) = (0..n * n).find(|&i| rel[i] != p.related(i / n, i % n)) {
        return Err(Error::NotModular(format!(
            "delta relation is not an equivalence near ({},{})",
            i / n,
            i % n
        )));
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivedSeries {
    /// `α, [α,α], [[α,α],[α,α]], ...` until it reaches `0_A` or stalls.
    pub series: Vec<Partition>,
    /// Least `k` with the `k`-th term `0_A`.
    pub solvable_degree: Option<usize>,
}

pub fn iterated_commutator(alg: &FiniteAlgebra, alpha: &Partition, max_n: usize, cap: usize) -> Result<DerivedSeries> {
    let mut series = vec![alpha.clone()];
    loop {
        let last = series.last().expect("nonempty");
        if last.is_discrete() {
            return Ok(DerivedSeries {
                solvable_degree: Some(series.len() - 1),
                series,
            });
        }
        if series.len() > max_n {
            break;
        }
        let next = commutator_tc(alg, last, last, cap)?;
        if &next == last {
            break;
        }
        series.push(next);
    }
    Ok(DerivedSeries {
        series,
        solvable_degree: None,
    })
}
