//! The Day-term commutator, difference terms, ternary Abelian groups and
//! module reconstruction of Abelian algebras.

use serde::Serialize;

use crate::algebra::{flat_index, for_each_tuple, FiniteAlgebra};
use crate::closure::{polynomial_term, unary_polynomial_clone};
use crate::commutator::{commutator_tc, m_matrices};
use crate::conditions::{find_maltsev_polynomial, ChainKind, SearchOutcome, TermChain};
use crate::congruence::cg;
use crate::error::{Error, Result};
use crate::lattice::con_all;
use crate::partition::Partition;
use crate::term::Term;

fn require_day(alg: &FiniteAlgebra, chain: &TermChain) -> Result<()> {
    if chain.kind != ChainKind::Day {
        return Err(Error::ChainKind(format!("expected Day terms, got {}", chain.kind)));
    }
    if !chain.verify(alg)? {
        return Err(Error::ChainKind("Day terms fail their identities".into()));
    }
    Ok(())
}

/// `[α, β] = Cg(X(α, β))` where `X` holds `(m_i(x,x,u,u), m_i(x,y,z,u))`
/// for every `[x y; u z]` in `M(α, β)`.
pub fn commutator_day(
    alg: &FiniteAlgebra,
    day: &TermChain,
    alpha: &Partition,
    beta: &Partition,
    cap: usize,
) -> Result<Partition> {
    require_day(alg, day)?;
    let n = alg.size;
    let tables = day.terms.iter().map(|m| m.table(alg, 4)).collect::<Result<Vec<_>>>()?;
    let m = m_matrices(alg, alpha, beta, cap)?;
    let mut pairs = Vec::new();
    for [x, y, u, z] in m.iter() {
        for t in &tables {
            let a = t[flat_index(n, &[x, x, u, u])];
            let b = t[flat_index(n, &[x, y, z, u])];
            if a != b {
                pairs.push((a, b));
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    Ok(cg(alg, &pairs))
}

/// The difference term `p_n` built from Day terms:
/// `p_0 = z`, `p_{i+1} = m_{i+1}(p_i, x, y, p_i)` for even `i` and
/// `m_{i+1}(p_i, y, x, p_i)` for odd `i`.
pub fn difference_term(alg: &FiniteAlgebra, day: &TermChain) -> Result<Term> {
    require_day(alg, day)?;
    let (x, y) = (Term::Var(0), Term::Var(1));
    let mut p = Term::Var(2);
    for i in 0..day.length() {
        let args = if i % 2 == 0 {
            [p.clone(), x.clone(), y.clone(), p]
        } else {
            [p.clone(), y.clone(), x.clone(), p]
        };
        p = day.terms[i + 1].substitute(&args);
    }
    let d = p;
    let xxy = d.substitute(&[Term::Var(0), Term::Var(0), Term::Var(1)]);
    if !crate::term::verify_identity(alg, &xxy, &Term::Var(1), 2)? {
        return Err(Error::ChainKind("constructed term fails d(x,x,y) = y".into()));
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DifferenceTermReport {
    /// `d(x,x,y) = y` everywhere.
    pub identity: bool,
    /// Each congruence α with whether `x α y` implies `d(x,y,y) [α,α] x`.
    pub per_congruence: Vec<(Partition, bool)>,
}

impl DifferenceTermReport {
    pub fn holds(&self) -> bool {
        self.identity && self.per_congruence.iter().all(|(_, ok)| *ok)
    }
}

pub fn verify_difference_term(alg: &FiniteAlgebra, d: &Term, cap: usize) -> Result<DifferenceTermReport> {
    let n = alg.size;
    let t = d.table(alg, 3)?;
    let identity = (0..n).all(|x| (0..n).all(|y| t[flat_index(n, &[x, x, y])] == y));
    let lat = con_all(alg, cap)?;
    let mut per_congruence = Vec::new();
    for alpha in lat.elements() {
        let c = commutator_tc(alg, alpha, alpha, cap)?;
        let ok = alpha
            .pairs()
            .into_iter()
            .all(|(x, y)| c.related(t[flat_index(n, &[x, y, y])], x));
        per_congruence.push((alpha.clone(), ok));
    }
    Ok(DifferenceTermReport {
        identity,
        per_congruence,
    })
}

/// Checks, for `β ≤ α`: (i) `d` commutes with every basic operation and
/// with itself on matrices whose rows satisfy `x β y α z`, and (ii)
/// `y β z` implies `d(y,z,z) = y = d(z,z,y)`.
pub fn difference_term_commutes(alg: &FiniteAlgebra, d: &Term, alpha: &Partition, beta: &Partition) -> Result<bool> {
    if !beta.leq(alpha) {
        return Err(Error::Precondition("β must lie below α".into()));
    }
    let n = alg.size;
    let dt = d.table(alg, 3)?;
    let dd = |a: usize, b: usize, c: usize| dt[(a * n + b) * n + c];
    for (y, z) in beta.pairs() {
        if dd(y, z, z) != y || dd(z, z, y) != y {
            return Ok(false);
        }
    }
    let rows: Vec<[usize; 3]> = (0..n)
        .flat_map(|x| (0..n).flat_map(move |y| (0..n).map(move |z| [x, y, z])))
        .filter(|&[x, y, z]| beta.related(x, y) && alpha.related(y, z))
        .collect();
    let mut ops: Vec<(usize, &[usize])> = alg.operations.iter().map(|o| (o.arity, o.table.as_slice())).collect();
    ops.push((3, &dt));
    for (k, table) in ops {
        let mut ok = true;
        let mut cols = vec![0; k];
        let mut image = [vec![0; k], vec![0; k], vec![0; k]];
        for_each_tuple(rows.len(), k, |choice| {
            if !ok {
                return;
            }
            for (i, &r) in choice.iter().enumerate() {
                cols[i] = dd(rows[r][0], rows[r][1], rows[r][2]);
                for j in 0..3 {
                    image[j][i] = rows[r][j];
                }
            }
            let left = table[flat_index(n, &cols)];
            let right = dd(
                table[flat_index(n, &image[0])],
                table[flat_index(n, &image[1])],
                table[flat_index(n, &image[2])],
            );
            ok = left == right;
        });
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The Abelian group `(A, +, -, 0)` of a ternary Abelian group:
/// `x + y = t(x,0,y)`, `-x = t(0,x,0)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TernaryGroup {
    pub zero: usize,
    pub plus: Vec<usize>,
    pub neg: Vec<usize>,
}

impl TernaryGroup {
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.plus[a * self.neg.len() + b]
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg[b])
    }
}

pub fn ternary_group(t: &[usize], n: usize, zero: usize) -> Result<TernaryGroup> {
    if t.len() != n * n * n || zero >= n {
        return Err(Error::NotTernaryGroup("table or zero out of range".into()));
    }
    let f = |a: usize, b: usize, c: usize| t[(a * n + b) * n + c];
    for x in 0..n {
        for y in 0..n {
            if f(x, x, y) != y {
                return Err(Error::NotTernaryGroup(format!("t({x},{x},{y}) != {y}")));
            }
            if f(x, y, y) != x {
                return Err(Error::NotTernaryGroup(format!("t({x},{y},{y}) != {x}")));
            }
        }
    }
    let mut failure = None;
    for_each_tuple(n, 9, |m| {
        if failure.is_some() {
            return;
        }
        let rows = f(f(m[0], m[1], m[2]), f(m[3], m[4], m[5]), f(m[6], m[7], m[8]));
        let cols = f(f(m[0], m[3], m[6]), f(m[1], m[4], m[7]), f(m[2], m[5], m[8]));
        if rows != cols {
            failure = Some(m.to_vec());
        }
    });
    if let Some(m) = failure {
        return Err(Error::NotTernaryGroup(format!(
            "t does not commute with itself on {m:?}"
        )));
    }
    let plus: Vec<usize> = (0..n * n).map(|i| f(i / n, zero, i % n)).collect();
    let neg: Vec<usize> = (0..n).map(|x| f(zero, x, zero)).collect();
    let g = TernaryGroup { zero, plus, neg };
    check_abelian_group(&g, n).map_err(Error::NotTernaryGroup)?;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if f(x, y, z) != g.add(g.sub(x, y), z) {
                    return Err(Error::NotTernaryGroup(format!("t({x},{y},{z}) != x-y+z")));
                }
            }
        }
    }
    Ok(g)
}

fn check_abelian_group(g: &TernaryGroup, n: usize) -> std::result::Result<(), String> {
    for a in 0..n {
        if g.add(a, g.zero) != a {
            return Err(format!("{a}+0 != {a}"));
        }
        if g.add(a, g.neg[a]) != g.zero {
            return Err(format!("{a}+(-{a}) != 0"));
        }
        for b in 0..n {
            if g.add(a, b) != g.add(b, a) {
                return Err(format!("{a}+{b} != {b}+{a}"));
            }
            for c in 0..n {
                if g.add(g.add(a, b), c) != g.add(a, g.add(b, c)) {
                    return Err(format!("addition is not associative at ({a},{b},{c})"));
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RingElement {
    /// Values on `0..n`.
    pub function: Vec<usize>,
    pub term: Term,
}

/// `f(x_1..x_k) = r_1(x_1) + ... + r_k(x_k) + c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub symbol: String,
    /// Ring indices of `r_1, ..., r_k`.
    pub coefficients: Vec<usize>,
    pub constant: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AffineRepresentation {
    pub zero: usize,
    pub maltsev: Term,
    pub plus: Vec<usize>,
    pub neg: Vec<usize>,
    /// Unary polynomials fixing `zero`, in discovery order.
    pub ring: Vec<RingElement>,
    pub ring_zero: usize,
    pub ring_one: usize,
    /// `ring_add[r * |R| + s]`, pointwise sum.
    pub ring_add: Vec<usize>,
    /// `ring_mul[r * |R| + s]`, the composite `r ∘ s`.
    pub ring_mul: Vec<usize>,
    /// `action[r * n + a] = r(a)`.
    pub action: Vec<usize>,
    pub decompositions: Vec<Decomposition>,
}

impl AffineRepresentation {
    pub fn group(&self) -> TernaryGroup {
        TernaryGroup {
            zero: self.zero,
            plus: self.plus.clone(),
            neg: self.neg.clone(),
        }
    }
}

/// Exhibits an Abelian algebra with a Mal'tsev polynomial as a module
/// over its ring of zero-fixing unary polynomials.
pub fn module_reconstruct(alg: &FiniteAlgebra, zero: usize, cap: usize) -> Result<AffineRepresentation> {
    let n = alg.size;
    alg.check_element(zero)?;
    let one = Partition::full(n);
    if !commutator_tc(alg, &one, &one, cap)?.is_discrete() {
        return Err(Error::NotAffineEligible("the algebra is not abelian".into()));
    }
    let maltsev = match find_maltsev_polynomial(alg, cap)? {
        SearchOutcome::Found(p) => p,
        SearchOutcome::None => return Err(Error::NotAffineEligible("no Mal'tsev polynomial".into())),
        SearchOutcome::Undecided { .. } => return Err(Error::CapExceeded { cap }),
    };
    let g = ternary_group(&maltsev.table(alg, 3)?, n, zero)?;

    let clone = unary_polynomial_clone(alg);
    let ring: Vec<RingElement> = (0..clone.len())
        .filter(|&i| clone.get(i)[zero] as usize == zero)
        .map(|i| RingElement {
            function: clone.get(i).iter().map(|&v| v as usize).collect(),
            term: polynomial_term(alg, &clone, i),
        })
        .collect();
    let m = ring.len();
    let find = |f: &[usize]| ring.iter().position(|r| r.function == f);
    let lookup = |f: Vec<usize>, what: &str| {
        find(&f).ok_or_else(|| Error::Decomposition(format!("{what} {f:?} is not a zero-fixing polynomial")))
    };
    let ring_zero = lookup(vec![zero; n], "constant")?;
    let ring_one = lookup((0..n).collect(), "identity")?;
    let mut ring_add = Vec::with_capacity(m * m);
    let mut ring_mul = Vec::with_capacity(m * m);
    for r in &ring {
        for s in &ring {
            ring_add.push(lookup(
                (0..n).map(|a| g.add(r.function[a], s.function[a])).collect(),
                "sum",
            )?);
            ring_mul.push(lookup(
                (0..n).map(|a| r.function[s.function[a]]).collect(),
                "composite",
            )?);
        }
    }
    let action: Vec<usize> = ring.iter().flat_map(|r| r.function.iter().copied()).collect();
    let mut decompositions = Vec::new();
    for op in &alg.operations {
        let k = op.arity;
        let c = op.table[flat_index(n, &vec![zero; k])];
        let mut coefficients = Vec::with_capacity(k);
        for i in 0..k {
            let mut args = vec![zero; k];
            let f: Vec<usize> = (0..n)
                .map(|x| {
                    args[i] = x;
                    g.sub(op.table[flat_index(n, &args)], c)
                })
                .collect();
            coefficients.push(lookup(f, "coefficient")?);
        }
        let mut bad = None;
        for_each_tuple(n, k, |xs| {
            if bad.is_some() {
                return;
            }
            let sum = xs
                .iter()
                .zip(&coefficients)
                .fold(c, |acc, (&x, &r)| g.add(acc, ring[r].function[x]));
            if sum != op.table[flat_index(n, xs)] {
                bad = Some(xs.to_vec());
            }
        });
        if let Some(xs) = bad {
            return Err(Error::Decomposition(format!("`{}` is not affine at {xs:?}", op.symbol)));
        }
        decompositions.push(Decomposition {
            symbol: op.symbol.clone(),
            coefficients,
            constant: c,
        });
    }
    let rep = AffineRepresentation {
        zero,
        maltsev,
        plus: g.plus.clone(),
        neg: g.neg.clone(),
        ring_zero,
        ring_one,
        ring_add,
        ring_mul,
        action,
        decompositions,
        ring,
    };
    check_ring_and_module(&rep, n).map_err(Error::Decomposition)?;
    Ok(rep)
}

/// Exhaustive ring and module axioms for a representation.
pub fn check_ring_and_module(rep: &AffineRepresentation, n: usize) -> std::result::Result<(), String> {
    let g = rep.group();
    check_abelian_group(&g, n)?;
    let m = rep.ring.len();
    let add = |r: usize, s: usize| rep.ring_add[r * m + s];
    let mul = |r: usize, s: usize| rep.ring_mul[r * m + s];
    let act = |r: usize, a: usize| rep.action[r * n + a];
    for r in 0..m {
        if add(r, rep.ring_zero) != r || mul(r, rep.ring_one) != r || mul(rep.ring_one, r) != r {
            return Err(format!("ring identities fail at {r}"));
        }
        if !(0..m).any(|s| add(r, s) == rep.ring_zero) {
            return Err(format!("ring element {r} has no additive inverse"));
        }
        for s in 0..m {
            if add(r, s) != add(s, r) {
                return Err(format!("ring addition not commutative at ({r},{s})"));
            }
            for q in 0..m {
                if add(add(r, s), q) != add(r, add(s, q)) || mul(mul(r, s), q) != mul(r, mul(s, q)) {
                    return Err(format!("ring not associative at ({r},{s},{q})"));
                }
                if mul(r, add(s, q)) != add(mul(r, s), mul(r, q)) || mul(add(r, s), q) != add(mul(r, q), mul(s, q)) {
                    return Err(format!("ring not distributive at ({r},{s},{q})"));
                }
            }
        }
    }
    for a in 0..n {
        if act(rep.ring_one, a) != a {
            return Err(format!("1·{a} != {a}"));
        }
        for r in 0..m {
            for s in 0..m {
                if act(add(r, s), a) != g.add(act(r, a), act(s, a)) {
                    return Err(format!("(r+s)a != ra+sa at ({r},{s},{a})"));
                }
                if act(mul(r, s), a) != act(r, act(s, a)) {
                    return Err(format!("(rs)a != r(sa) at ({r},{s},{a})"));
                }
            }
            for b in 0..n {
                if act(r, g.add(a, b)) != g.add(act(r, a), act(r, b)) {
                    return Err(format!("r(a+b) != ra+rb at ({r},{a},{b})"));
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CosetGroup {
    pub block: Vec<usize>,
    pub closed: bool,
    pub maltsev: bool,
    pub self_commuting: bool,
}

impl CosetGroup {
    pub fn is_ternary_group(&self) -> bool {
        self.closed && self.maltsev && self.self_commuting
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CosetReport {
    pub cosets: Vec<CosetGroup>,
    /// Every basic operation commutes with `d` on matrices whose rows
    /// lie in single α-blocks.
    pub homomorphism: bool,
}

/// Each block of an Abelian congruence α as a ternary group under `d`,
/// and the basic operations as ternary-group homomorphisms between them.
pub fn coset_groups(alg: &FiniteAlgebra, alpha: &Partition, d: &Term, cap: usize) -> Result<CosetReport> {
    if !commutator_tc(alg, alpha, alpha, cap)?.is_discrete() {
        return Err(Error::NotAbelianCongruence);
    }
    let n = alg.size;
    let dt = d.table(alg, 3)?;
    let dd = |a: usize, b: usize, c: usize| dt[(a * n + b) * n + c];
    let mut cosets = Vec::new();
    for block in alpha.blocks() {
        let b = block.len();
        let mut closed = true;
        let mut maltsev = true;
        for_each_tuple(b, 3, |i| {
            let (x, y, z) = (block[i[0]], block[i[1]], block[i[2]]);
            closed &= alpha.related(dd(x, y, z), x);
            maltsev &= dd(x, x, z) == z && dd(x, z, z) == x;
        });
        let mut self_commuting = true;
        for_each_tuple(b, 9, |i| {
            if !self_commuting {
                return;
            }
            let m: Vec<usize> = i.iter().map(|&j| block[j]).collect();
            let rows = dd(dd(m[0], m[1], m[2]), dd(m[3], m[4], m[5]), dd(m[6], m[7], m[8]));
            let cols = dd(dd(m[0], m[3], m[6]), dd(m[1], m[4], m[7]), dd(m[2], m[5], m[8]));
            self_commuting = rows == cols;
        });
        cosets.push(CosetGroup {
            block,
            closed,
            maltsev,
            self_commuting,
        });
    }
    let rows: Vec<[usize; 3]> = alpha
        .pairs()
        .into_iter()
        .flat_map(|(x, y)| (0..n).filter(move |&z| alpha.related(y, z)).map(move |z| [x, y, z]))
        .collect();
    let mut homomorphism = true;
    for op in &alg.operations {
        let k = op.arity;
        let mut cols = vec![0; k];
        let mut image = [vec![0; k], vec![0; k], vec![0; k]];
        for_each_tuple(rows.len(), k, |choice| {
            if !homomorphism {
                return;
            }
            for (i, &r) in choice.iter().enumerate() {
                cols[i] = dd(rows[r][0], rows[r][1], rows[r][2]);
                for j in 0..3 {
                    image[j][i] = rows[r][j];
                }
            }
            let left = op.table[flat_index(n, &cols)];
            let right = dd(
                op.table[flat_index(n, &image[0])],
                op.table[flat_index(n, &image[1])],
                op.table[flat_index(n, &image[2])],
            );
            homomorphism = left == right;
        });
    }
    Ok(CosetReport { cosets, homomorphism })
}
