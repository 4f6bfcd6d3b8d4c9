//! Free algebras and searches for Mal'tsev, Jónsson, Day and Gumm terms.
//!
//! A k-ary term operation is a function `A^k → A`, i.e. a tuple indexed by
//! `A^k`. Every identity in the four families only looks at a few shapes of
//! argument tuples (`(x,x,z)`, `(x,z,z)`, ...), so the searches generate the
//! term operations restricted to those coordinates. The restriction of the
//! clone is generated by the restricted projections, so nothing is lost:
//! a term satisfies the identities iff its restriction does.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::algebra::{for_each_tuple, FiniteAlgebra};
use crate::closure::{closure_in_power, closure_until, Closure};
use crate::error::{Error, Result};
use crate::term::{verify_identity, Term};

pub const DEFAULT_CAP3: usize = 100_000;
pub const DEFAULT_CAP4: usize = 150_000;

/// The subalgebra of `A^(A^k)` generated by the k projections.
#[derive(Debug, Clone)]
pub struct FreeAlgebra {
    pub arity: usize,
    closure: Closure,
}

impl FreeAlgebra {
    pub fn len(&self) -> usize {
        self.closure.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closure.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.closure.is_complete()
    }

    /// Values of element `i` on `A^k`, row-major.
    pub fn function(&self, i: usize) -> &[u16] {
        self.closure.get(i)
    }

    /// Element holding the projection onto coordinate `j`.
    pub fn projection(&self, j: usize) -> usize {
        self.closure.generator_element(j)
    }

    pub fn term(&self, alg: &FiniteAlgebra, i: usize) -> Term {
        self.closure.term(alg, i)
    }
}

pub fn free_algebra(alg: &FiniteAlgebra, k: usize, cap: usize) -> Result<FreeAlgebra> {
    let width = alg
        .size
        .checked_pow(k as u32)
        .filter(|&w| w <= 1 << 24)
        .ok_or(Error::UniverseTooLarge(usize::MAX))?;
    let mut gens = vec![Vec::with_capacity(width); k];
    for_each_tuple(alg.size, k, |t| {
        for (g, &v) in gens.iter_mut().zip(t) {
            g.push(v);
        }
    });
    Ok(FreeAlgebra {
        arity: k,
        closure: closure_in_power(alg, width, &gens, cap),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainKind {
    Maltsev,
    Jonsson,
    Day,
    Gumm,
}

impl fmt::Display for ChainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChainKind::Maltsev => "maltsev",
            ChainKind::Jonsson => "jonsson",
            ChainKind::Day => "day",
            ChainKind::Gumm => "gumm",
        })
    }
}

impl std::str::FromStr for ChainKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "maltsev" => Ok(ChainKind::Maltsev),
            "jonsson" => Ok(ChainKind::Jonsson),
            "day" => Ok(ChainKind::Day),
            "gumm" => Ok(ChainKind::Gumm),
            _ => Err(Error::ChainKind(format!("unknown chain kind `{s}`"))),
        }
    }
}

/// Terms of one of the four families.
///
/// * `Maltsev`: `[p]`.
/// * `Jonsson`: `[d_0, ..., d_n]`, ternary.
/// * `Day`: `[m_0, ..., m_n]`, quaternary.
/// * `Gumm`: `[p, q_1, ..., q_n]`, ternary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermChain {
    pub kind: ChainKind,
    pub terms: Vec<Term>,
}

fn v(i: usize) -> Term {
    Term::Var(i)
}

fn at(t: &Term, args: [usize; 3]) -> Term {
    t.substitute(&args.map(v))
}

fn at4(t: &Term, args: [usize; 4]) -> Term {
    t.substitute(&args.map(v))
}

impl TermChain {
    pub fn arity(&self) -> usize {
        if self.kind == ChainKind::Day {
            4
        } else {
            3
        }
    }

    /// Length `n` of the chain: the number of links after the first term.
    pub fn length(&self) -> usize {
        self.terms.len().saturating_sub(1)
    }

    /// The defining identities `(s, t)`.
    pub fn identities(&self) -> Vec<(Term, Term)> {
        let (x, y, z, u) = (0, 1, 2, 3);
        let t = &self.terms;
        let mut out = Vec::new();
        match self.kind {
            ChainKind::Maltsev => {
                if let [p] = t.as_slice() {
                    out.push((at(p, [x, x, z]), v(z)));
                    out.push((at(p, [x, z, z]), v(x)));
                }
            }
            ChainKind::Jonsson => {
                if let (Some(first), Some(last)) = (t.first(), t.last()) {
                    out.push((first.clone(), v(x)));
                    for d in t {
                        out.push((at(d, [x, y, x]), v(x)));
                    }
                    for i in 0..t.len() - 1 {
                        let shape = if i % 2 == 0 { [x, x, z] } else { [x, z, z] };
                        out.push((at(&t[i], shape), at(&t[i + 1], shape)));
                    }
                    out.push((last.clone(), v(z)));
                }
            }
            ChainKind::Day => {
                if let (Some(first), Some(last)) = (t.first(), t.last()) {
                    out.push((first.clone(), v(x)));
                    for m in t {
                        out.push((at4(m, [x, y, y, x]), v(x)));
                    }
                    for i in 0..t.len() - 1 {
                        let shape = if i % 2 == 0 { [x, x, z, z] } else { [x, y, y, u] };
                        out.push((at4(&t[i], shape), at4(&t[i + 1], shape)));
                    }
                    out.push((last.clone(), v(u)));
                }
            }
            ChainKind::Gumm => {
                if t.len() >= 2 {
                    let (p, q) = (&t[0], &t[1..]);
                    out.push((at(p, [x, z, z]), v(x)));
                    out.push((at(p, [x, x, z]), at(&q[0], [x, x, z])));
                    for qi in q {
                        out.push((at(qi, [x, y, x]), v(x)));
                    }
                    // q is 1-indexed: q[j] is q_{j+1}.
                    for j in 0..q.len() - 1 {
                        let shape = if (j + 1) % 2 == 0 { [x, x, z] } else { [x, z, z] };
                        out.push((at(&q[j], shape), at(&q[j + 1], shape)));
                    }
                    out.push((q[q.len() - 1].clone(), v(z)));
                }
            }
        }
        out
    }

    /// Checks every defining identity pointwise on `alg`.
    pub fn verify(&self, alg: &FiniteAlgebra) -> Result<bool> {
        let min_terms = if self.kind == ChainKind::Gumm { 2 } else { 1 };
        if self.terms.len() < min_terms || self.terms.iter().any(|t| t.num_vars() > self.arity()) {
            return Ok(false);
        }
        for (s, t) in self.identities() {
            if !verify_identity(alg, &s, &t, self.arity())? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for TermChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.kind)?;
        for t in &self.terms {
            write!(f, " {t}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "value", rename_all = "lowercase")]
pub enum SearchOutcome<T> {
    Found(T),
    /// The search space was exhausted.
    None,
    /// The cap was hit first; `elements` were generated.
    Undecided {
        elements: usize,
    },
}

impl<T> SearchOutcome<T> {
    pub fn found(&self) -> Option<&T> {
        match self {
            SearchOutcome::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }

    pub fn is_none(&self) -> bool {
        matches!(self, SearchOutcome::None)
    }

    pub fn label(&self) -> &'static str {
        match self {
            SearchOutcome::Found(_) => "found",
            SearchOutcome::None => "none",
            SearchOutcome::Undecided { .. } => "undecided",
        }
    }
}

/// Argument tuples of `A^k` matching a set of shapes, and the closure
/// of the projections restricted to them.
struct SearchSpace {
    n: usize,
    coords: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl SearchSpace {
    fn new(n: usize, shapes: &[&[usize]]) -> Self {
        let mut space = SearchSpace {
            n,
            coords: Vec::new(),
            index: HashMap::new(),
        };
        for shape in shapes {
            for tuple in space.instances(shape) {
                if !space.index.contains_key(&tuple) {
                    space.index.insert(tuple.clone(), space.coords.len());
                    space.coords.push(tuple);
                }
            }
        }
        space
    }

    /// All tuples of a shape such as `[0, 0, 2]` for `(x, x, z)`, the
    /// distinct variables ranging over `A` in lexicographic order.
    fn instances(&self, shape: &[usize]) -> Vec<Vec<usize>> {
        let mut vars: Vec<usize> = shape.to_vec();
        vars.sort_unstable();
        vars.dedup();
        let mut out = Vec::new();
        for_each_tuple(self.n, vars.len(), |vals| {
            out.push(
                shape
                    .iter()
                    .map(|s| vals[vars.binary_search(s).expect("listed")])
                    .collect(),
            );
        });
        out
    }

    /// Coordinates of the instances of `shape`, in instance order.
    fn positions(&self, shape: &[usize]) -> Vec<usize> {
        self.instances(shape).iter().map(|t| self.index[t]).collect()
    }

    /// Checks `f(shape) = var` on a restricted function: pairs of a
    /// coordinate and the value it must take.
    fn equation(&self, shape: &[usize], var: usize) -> Vec<(usize, u16)> {
        let slot = shape.iter().position(|&s| s == var).expect("variable occurs");
        self.instances(shape)
            .iter()
            .map(|t| (self.index[t], t[slot] as u16))
            .collect()
    }

    fn projections(&self, k: usize) -> Vec<Vec<usize>> {
        (0..k).map(|j| self.coords.iter().map(|t| t[j]).collect()).collect()
    }

    fn constants(&self) -> Vec<Vec<usize>> {
        (0..self.n).map(|c| vec![c; self.coords.len()]).collect()
    }
}

fn satisfies(f: &[u16], eq: &[(usize, u16)]) -> bool {
    eq.iter().all(|&(pos, val)| f[pos] == val)
}

fn key(f: &[u16], positions: &[usize]) -> Vec<u16> {
    positions.iter().map(|&p| f[p]).collect()
}

/// Runs `search` on the growing closure at doubling checkpoints and once
/// more at the end. Closures below the first checkpoint are searched whole,
/// so chains from them are shortest overall; later ones are shortest among
/// the elements generated so far.
fn incremental<T>(
    alg: &FiniteAlgebra,
    space: &SearchSpace,
    gens: &[Vec<usize>],
    cap: usize,
    mut search: impl FnMut(&Closure) -> Option<T>,
) -> (Closure, Option<T>) {
    let mut found = None;
    let mut checkpoint = FIRST_CHECKPOINT;
    let closure = closure_until(alg, space.coords.len(), gens, cap, |c, i| {
        if i + 1 >= checkpoint {
            checkpoint *= 2;
            found = search(c);
        }
        found.is_some()
    });
    if found.is_none() {
        found = search(&closure);
    }
    (closure, found)
}

fn outcome(closure: &Closure, found: Option<TermChain>, alg: &FiniteAlgebra) -> Result<SearchOutcome<TermChain>> {
    match found {
        Some(chain) => {
            if !chain.verify(alg)? {
                return Err(Error::ChainKind(format!(
                    "extracted {} chain fails its identities",
                    chain.kind
                )));
            }
            Ok(SearchOutcome::Found(chain))
        }
        None if closure.is_complete() => Ok(SearchOutcome::None),
        None => Ok(SearchOutcome::Undecided {
            elements: closure.len(),
        }),
    }
}

const FIRST_CHECKPOINT: usize = 2048;

const X: usize = 0;
const Y: usize = 1;
const Z: usize = 2;
const U: usize = 3;

/// A Mal'tsev term `p(x,x,z) = z`, `p(x,z,z) = x`.
pub fn find_maltsev_term(alg: &FiniteAlgebra, cap: usize) -> Result<SearchOutcome<TermChain>> {
    let space = SearchSpace::new(alg.size, &[&[X, X, Z], &[X, Z, Z]]);
    let eqs = [space.equation(&[X, X, Z], Z), space.equation(&[X, Z, Z], X)];
    let gens = space.projections(3);
    let mut hit = None;
    let closure = closure_until(alg, space.coords.len(), &gens, cap, |c, i| {
        let ok = eqs.iter().all(|eq| satisfies(c.get(i), eq));
        if ok {
            hit = Some(i);
        }
        ok
    });
    let found = hit.map(|i| TermChain {
        kind: ChainKind::Maltsev,
        terms: vec![closure.term(alg, i)],
    });
    outcome(&closure, found, alg)
}

/// A Mal'tsev polynomial: like [`find_maltsev_term`] but constants may
/// appear, as `Term::Const` leaves.
pub fn find_maltsev_polynomial(alg: &FiniteAlgebra, cap: usize) -> Result<SearchOutcome<Term>> {
    let space = SearchSpace::new(alg.size, &[&[X, X, Z], &[X, Z, Z]]);
    let eqs = [space.equation(&[X, X, Z], Z), space.equation(&[X, Z, Z], X)];
    let mut gens = space.projections(3);
    gens.extend(space.constants());
    let mut hit = None;
    let closure = closure_until(alg, space.coords.len(), &gens, cap, |c, i| {
        let ok = eqs.iter().all(|eq| satisfies(c.get(i), eq));
        if ok {
            hit = Some(i);
        }
        ok
    });
    match hit {
        Some(i) => {
            let term = closure.term_with(alg, i, &|g| if g < 3 { Term::Var(g) } else { Term::Const(g - 3) });
            let chain = TermChain {
                kind: ChainKind::Maltsev,
                terms: vec![term],
            };
            if !chain.verify(alg)? {
                return Err(Error::ChainKind(
                    "extracted Mal'tsev polynomial fails its identities".into(),
                ));
            }
            Ok(SearchOutcome::Found(chain.terms.into_iter().next().expect("one term")))
        }
        None if closure.is_complete() => Ok(SearchOutcome::None),
        None => Ok(SearchOutcome::Undecided {
            elements: closure.len(),
        }),
    }
}

/// Shortest alternating chain: breadth-first over `(element, parity)`
/// among elements passing `node`, stepping from parity 0 along equal
/// `keys[0]` and from parity 1 along equal `keys[1]`, from `sources` to
/// `goal`. Returns the elements visited.
fn alternating_path(
    c: &Closure,
    node: &dyn Fn(&[u16]) -> bool,
    keys: [&[usize]; 2],
    sources: &[(usize, usize)],
    goal: usize,
) -> Option<Vec<usize>> {
    let nodes: Vec<usize> = (0..c.len()).filter(|&i| node(c.get(i))).collect();
    let mut groups: [HashMap<Vec<u16>, Vec<usize>>; 2] = [HashMap::new(), HashMap::new()];
    for &i in &nodes {
        for (parity, group) in groups.iter_mut().enumerate() {
            group.entry(key(c.get(i), keys[parity])).or_default().push(i);
        }
    }
    let state = |i: usize, parity: usize| 2 * i + parity;
    let mut parent: HashMap<usize, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    for &(i, parity) in sources {
        if node(c.get(i)) && !parent.contains_key(&state(i, parity)) {
            parent.insert(state(i, parity), usize::MAX);
            queue.push_back((i, parity));
        }
    }
    while let Some((i, parity)) = queue.pop_front() {
        if i == goal {
            let mut path = vec![i];
            let mut s = parent[&state(i, parity)];
            while s != usize::MAX {
                path.push(s / 2);
                s = parent[&s];
            }
            path.reverse();
            return Some(path);
        }
        let next = 1 - parity;
        for &j in &groups[parity][&key(c.get(i), keys[parity])] {
            if let Entry::Vacant(slot) = parent.entry(state(j, next)) {
                slot.insert(state(i, parity));
                queue.push_back((j, next));
            }
        }
    }
    None
}

/// Terms along a path, the ends written as the projections `first` and
/// `last` (they may coincide as elements when `|A| = 1`).
fn path_terms(alg: &FiniteAlgebra, c: &Closure, path: &[usize], first: usize, last: usize) -> Vec<Term> {
    let mut terms = vec![v(first)];
    if path.len() > 2 {
        terms.extend(path[1..path.len() - 1].iter().map(|&i| c.term(alg, i)));
    }
    terms.push(v(last));
    terms
}

/// Jónsson terms `d_0, ..., d_n`, shortest in the part of the free
/// algebra generated when the search succeeds.
pub fn find_jonsson_terms(alg: &FiniteAlgebra, cap: usize) -> Result<SearchOutcome<TermChain>> {
    let shapes: [&[usize]; 3] = [&[X, Y, X], &[X, X, Z], &[X, Z, Z]];
    let space = SearchSpace::new(alg.size, &shapes);
    let j2 = space.equation(&[X, Y, X], X);
    let keys = [space.positions(&[X, X, Z]), space.positions(&[X, Z, Z])];
    let gens = space.projections(3);
    let node = |f: &[u16]| satisfies(f, &j2);
    let (closure, path) = incremental(alg, &space, &gens, cap, |c| {
        let (x, z) = (c.generator_element(X), c.generator_element(Z));
        alternating_path(c, &node, [&keys[0], &keys[1]], &[(x, 0)], z)
    });
    let found = path.map(|p| TermChain {
        kind: ChainKind::Jonsson,
        terms: path_terms(alg, &closure, &p, X, Z),
    });
    outcome(&closure, found, alg)
}

/// Day terms `m_0, ..., m_n`.
pub fn find_day_terms(alg: &FiniteAlgebra, cap: usize) -> Result<SearchOutcome<TermChain>> {
    let shapes: [&[usize]; 2] = [&[X, Y, Y, U], &[X, X, Z, Z]];
    let space = SearchSpace::new(alg.size, &shapes);
    let d2 = space.equation(&[X, Y, Y, X], X);
    let keys = [space.positions(&[X, X, Z, Z]), space.positions(&[X, Y, Y, U])];
    let gens = space.projections(4);
    let node = |f: &[u16]| satisfies(f, &d2);
    let (closure, path) = incremental(alg, &space, &gens, cap, |c| {
        let (x, u) = (c.generator_element(X), c.generator_element(3));
        alternating_path(c, &node, [&keys[0], &keys[1]], &[(x, 0)], u)
    });
    let found = path.map(|p| TermChain {
        kind: ChainKind::Day,
        terms: path_terms(alg, &closure, &p, X, U),
    });
    outcome(&closure, found, alg)
}

/// Gumm terms `p, q_1, ..., q_n`.
pub fn find_gumm_terms(alg: &FiniteAlgebra, cap: usize) -> Result<SearchOutcome<TermChain>> {
    let shapes: [&[usize]; 3] = [&[X, Y, X], &[X, X, Z], &[X, Z, Z]];
    let space = SearchSpace::new(alg.size, &shapes);
    let g1 = space.equation(&[X, Z, Z], X);
    let g3 = space.equation(&[X, Y, X], X);
    let xxz = space.positions(&[X, X, Z]);
    let xzz = space.positions(&[X, Z, Z]);
    let gens = space.projections(3);
    let node = |f: &[u16]| satisfies(f, &g3);
    // q_1 has odd index, so its outgoing link compares (x,z,z).
    let search = |c: &Closure| -> Option<(usize, Vec<usize>)> {
        let mut ps: HashMap<Vec<u16>, usize> = HashMap::new();
        for i in (0..c.len()).filter(|&i| satisfies(c.get(i), &g1)) {
            ps.entry(key(c.get(i), &xxz)).or_insert(i);
        }
        let sources: Vec<(usize, usize)> = (0..c.len())
            .filter(|&i| node(c.get(i)) && ps.contains_key(&key(c.get(i), &xxz)))
            .map(|i| (i, 1))
            .collect();
        let path = alternating_path(c, &node, [&xxz, &xzz], &sources, c.generator_element(Z))?;
        Some((ps[&key(c.get(path[0]), &xxz)], path))
    };
    let (closure, found) = incremental(alg, &space, &gens, cap, search);
    let found = found.map(|(p, path)| {
        let mut terms = vec![closure.term(alg, p)];
        terms.extend(path[..path.len() - 1].iter().map(|&i| closure.term(alg, i)));
        terms.push(v(Z));
        TermChain {
            kind: ChainKind::Gumm,
            terms,
        }
    });
    outcome(&closure, found, alg)
}

pub fn find_chain(alg: &FiniteAlgebra, kind: ChainKind, cap: usize) -> Result<SearchOutcome<TermChain>> {
    match kind {
        ChainKind::Maltsev => find_maltsev_term(alg, cap),
        ChainKind::Jonsson => find_jonsson_terms(alg, cap),
        ChainKind::Day => find_day_terms(alg, cap),
        ChainKind::Gumm => find_gumm_terms(alg, cap),
    }
}

/// The default cap for a search of the given kind.
pub fn default_cap(kind: ChainKind) -> usize {
    if kind == ChainKind::Day {
        DEFAULT_CAP4
    } else {
        DEFAULT_CAP3
    }
}
