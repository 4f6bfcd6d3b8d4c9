//! Congruence generation with merge witnesses, Mal'tsev chains,
//! permutability, transport along surjective homomorphisms, and the
//! shifting check.

use std::collections::VecDeque;

use serde::Serialize;

use crate::algebra::{for_each_tuple, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::partition::{Partition, UnionFind};
use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Justification {
    /// The pair is generator `index`.
    Generator(usize),
    /// The pair is the image of the pair merged by record `source` under
    /// the translation `x ↦ f(c_1, .., x, .., c_k)` with `x` at `slot` and
    /// `constants` filling the other slots in order.
    Translation {
        op: usize,
        slot: usize,
        constants: Vec<usize>,
        source: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MergeRecord {
    pub pair: (usize, usize),
    pub justification: Justification,
}

/// Every class merge performed while generating a congruence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessLog {
    pub size: usize,
    pub generators: Vec<(usize, usize)>,
    pub records: Vec<MergeRecord>,
}

impl WitnessLog {
    /// Replays the merges from the discrete partition.
    pub fn replay(&self) -> Partition {
        Partition::generated_by(self.size, self.records.iter().map(|r| r.pair))
    }

    /// The generator a record ultimately descends from.
    fn root_generator(&self, mut r: usize) -> usize {
        loop {
            match &self.records[r].justification {
                Justification::Generator(g) => return *g,
                Justification::Translation { source, .. } => r = *source,
            }
        }
    }

    /// The unary polynomial `p` with `record.pair = (p(g.0), p(g.1))` for
    /// the root generator pair `g` of the record.
    pub fn polynomial(&self, alg: &FiniteAlgebra, r: usize) -> Term {
        match &self.records[r].justification {
            Justification::Generator(_) => Term::Var(0),
            Justification::Translation {
                op,
                slot,
                constants,
                source,
            } => {
                let inner = self.polynomial(alg, *source);
                let mut args: Vec<Term> = constants.iter().map(|&c| Term::Const(c)).collect();
                args.insert(*slot, inner);
                Term::App(alg.operations[*op].symbol.clone(), args)
            }
        }
    }
}

fn generate(alg: &FiniteAlgebra, pairs: &[(usize, usize)], mut log: Option<&mut Vec<MergeRecord>>) -> Partition {
    let n = alg.size;
    let mut uf = UnionFind::new(n);
    let mut queue = VecDeque::new();
    let mut record_count = 0usize;
    for (g, &(a, b)) in pairs.iter().enumerate() {
        if uf.union(a, b) {
            if let Some(log) = log.as_deref_mut() {
                log.push(MergeRecord {
                    pair: (a, b),
                    justification: Justification::Generator(g),
                });
            }
            queue.push_back((a, b, record_count));
            record_count += 1;
        }
    }
    let mut args = Vec::new();
    while let Some((a, b, source)) = queue.pop_front() {
        for (op_index, op) in alg.operations.iter().enumerate() {
            if op.arity == 0 {
                continue;
            }
            for slot in 0..op.arity {
                for_each_tuple(n, op.arity - 1, |rest| {
                    args.clear();
                    args.extend_from_slice(rest);
                    args.insert(slot, a);
                    let x = op.apply(n, &args);
                    args[slot] = b;
                    let y = op.apply(n, &args);
                    if uf.union(x, y) {
                        if let Some(log) = log.as_deref_mut() {
                            log.push(MergeRecord {
                                pair: (x, y),
                                justification: Justification::Translation {
                                    op: op_index,
                                    slot,
                                    constants: rest.to_vec(),
                                    source,
                                },
                            });
                        }
                        queue.push_back((x, y, record_count));
                        record_count += 1;
                    }
                });
            }
        }
    }
    uf.into_partition()
}

/// The congruence generated by `pairs`.
pub fn cg(alg: &FiniteAlgebra, pairs: &[(usize, usize)]) -> Partition {
    generate(alg, pairs, None)
}

/// The join of a congruence with the congruence generated by `pairs`.
pub fn cg_over(alg: &FiniteAlgebra, base: &Partition, pairs: &[(usize, usize)]) -> Partition {
    let mut all: Vec<(usize, usize)> = (0..base.len())
        .filter(|&i| base.block_id(i) != i)
        .map(|i| (base.block_id(i), i))
        .collect();
    all.extend_from_slice(pairs);
    cg(alg, &all)
}

/// The least congruence containing `pairs`, with a log of every merge.
pub fn cg_with_witnesses(alg: &FiniteAlgebra, pairs: &[(usize, usize)]) -> Result<(Partition, WitnessLog)> {
    for &(a, b) in pairs {
        alg.check_element(a)?;
        alg.check_element(b)?;
    }
    let mut records = Vec::new();
    let partition = generate(alg, pairs, Some(&mut records));
    Ok((
        partition,
        WitnessLog {
            size: alg.size,
            generators: pairs.to_vec(),
            records,
        },
    ))
}

/// One link `p_i` of a Mal'tsev chain applied to a generator pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainStep {
    pub polynomial: Term,
    pub generator: usize,
    /// When set, the step reads the generator pair as `(y, x)`.
    pub flipped: bool,
}

impl ChainStep {
    pub fn endpoints(&self, log: &WitnessLog) -> (usize, usize) {
        let (x, y) = log.generators[self.generator];
        if self.flipped {
            (y, x)
        } else {
            (x, y)
        }
    }
}

/// A Mal'tsev chain from `a` to `b` read off the merge forest of `log`:
/// `a = p_0(x_0)`, `p_i(y_i) = p_{i+1}(x_{i+1})`, `p_n(y_n) = b`.
pub fn maltsev_chain(alg: &FiniteAlgebra, log: &WitnessLog, a: usize, b: usize) -> Result<Vec<ChainStep>> {
    alg.check_element(a)?;
    alg.check_element(b)?;
    if a == b {
        return Ok(Vec::new());
    }
    let n = log.size;
    let mut adjacency: Vec<Vec<(usize, usize, bool)>> = vec![Vec::new(); n];
    for (r, rec) in log.records.iter().enumerate() {
        let (x, y) = rec.pair;
        adjacency[x].push((y, r, false));
        adjacency[y].push((x, r, true));
    }
    // The merge records form a forest; BFS finds the unique path.
    let mut previous: Vec<Option<(usize, usize, bool)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[a] = true;
    let mut queue = VecDeque::from([a]);
    while let Some(u) = queue.pop_front() {
        if u == b {
            break;
        }
        for &(v, r, flipped) in &adjacency[u] {
            if !seen[v] {
                seen[v] = true;
                previous[v] = Some((u, r, flipped));
                queue.push_back(v);
            }
        }
    }
    if !seen[b] {
        return Err(Error::NotRelated(a, b));
    }
    let mut steps = Vec::new();
    let mut at = b;
    while at != a {
        let (u, r, flipped) = previous[at].expect("on path");
        steps.push(ChainStep {
            polynomial: log.polynomial(alg, r),
            generator: log.root_generator(r),
            flipped,
        });
        at = u;
    }
    steps.reverse();
    Ok(steps)
}

/// Re-evaluates every equality of a Mal'tsev chain in `alg`.
pub fn chain_replays(alg: &FiniteAlgebra, log: &WitnessLog, a: usize, b: usize, chain: &[ChainStep]) -> Result<bool> {
    let mut current = a;
    for step in chain {
        let (x, y) = step.endpoints(log);
        if step.polynomial.eval(alg, &[x])? != current {
            return Ok(false);
        }
        current = step.polynomial.eval(alg, &[y])?;
    }
    Ok(current == b)
}

/// Meet and join in `Con(A)`.
pub fn meet_join(p: &Partition, q: &Partition) -> (Partition, Partition) {
    (p.meet(q), p.join(q))
}

/// Relational product `p ∘ q` as a row-major `n × n` membership table:
/// `a (p∘q) c` iff some `b` has `a p b` and `b q c`.
fn compose(p: &Partition, q: &Partition) -> Vec<bool> {
    let n = p.len();
    let mut rel = vec![false; n * n];
    let q_blocks = q.blocks();
    let mut q_block_of = vec![0usize; n];
    for (i, block) in q_blocks.iter().enumerate() {
        for &e in block {
            q_block_of[e] = i;
        }
    }
    for block in p.blocks() {
        let mut reach = vec![false; q_blocks.len()];
        for &b in &block {
            reach[q_block_of[b]] = true;
        }
        for &a in &block {
            for (i, qb) in q_blocks.iter().enumerate() {
                if reach[i] {
                    for &c in qb {
                        rel[a * n + c] = true;
                    }
                }
            }
        }
    }
    rel
}

/// A pair lying in exactly one of `p∘q` and `q∘p`, if any.
pub fn permutation_counterexample(p: &Partition, q: &Partition) -> Option<(usize, usize)> {
    let n = p.len();
    let pq = compose(p, q);
    let qp = compose(q, p);
    (0..n * n).find(|&i| pq[i] != qp[i]).map(|i| (i / n, i % n))
}

pub fn permutes(p: &Partition, q: &Partition) -> bool {
    permutation_counterexample(p, q).is_none()
}

pub fn kernel(map: &[usize]) -> Partition {
    Partition::from_keys(map.len(), |i| map[i])
}

/// The image `f(θ)`: the congruence of `B` generated by
/// `{(f(x), f(y)) : x θ y}`.
pub fn transport_forward(a: &FiniteAlgebra, b: &FiniteAlgebra, f: &[usize], theta: &Partition) -> Result<Partition> {
    a.check_surjective_homomorphism(b, f)?;
    check_size(theta, a.size)?;
    let pairs: Vec<(usize, usize)> = (0..a.size)
        .filter(|&x| theta.block_id(x) != x)
        .map(|x| (f[theta.block_id(x)], f[x]))
        .collect();
    Ok(cg(b, &pairs))
}

/// The preimage `f⁻¹(Θ) = {(x, y) : f(x) Θ f(y)}`.
pub fn transport_backward(
    a: &FiniteAlgebra,
    b: &FiniteAlgebra,
    f: &[usize],
    big_theta: &Partition,
) -> Result<Partition> {
    a.check_surjective_homomorphism(b, f)?;
    check_size(big_theta, b.size)?;
    Ok(Partition::from_keys(a.size, |x| big_theta.block_id(f[x])))
}

fn check_size(p: &Partition, n: usize) -> Result<()> {
    if p.len() != n {
        Err(Error::PartitionSize {
            expected: n,
            actual: p.len(),
        })
    } else {
        Ok(())
    }
}

/// Instance check of the shifting property: given the premise diagram
/// `b α d`, `b γ d`, `b β a`, `d β c`, `a α c` with `α∧β ≤ γ`, reports
/// whether `a γ c`.
#[allow(clippy::too_many_arguments)]
pub fn shifting_check(
    alpha: &Partition,
    beta: &Partition,
    gamma: &Partition,
    a: usize,
    b: usize,
    c: usize,
    d: usize,
) -> Result<bool> {
    if !alpha.meet(beta).leq(gamma) {
        return Err(Error::ShiftingPremise("α∧β is not below γ"));
    }
    let premises: [(bool, &'static str); 5] = [
        (alpha.related(b, d), "b α d fails"),
        (gamma.related(b, d), "b γ d fails"),
        (beta.related(b, a), "b β a fails"),
        (beta.related(d, c), "d β c fails"),
        (alpha.related(a, c), "a α c fails"),
    ];
    if let Some((_, msg)) = premises.iter().find(|(ok, _)| !ok) {
        return Err(Error::ShiftingPremise(msg));
    }
    Ok(gamma.related(a, c))
}
