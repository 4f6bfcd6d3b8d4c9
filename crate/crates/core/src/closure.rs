//! Subalgebra generation inside finite powers `A^k`.
//!
//! Tuples are never enumerated from the full power; the closure only ever
//! touches tuples reachable from the generators. Every element keeps the
//! step that first produced it, so a term can be read back for it.

use std::hash::{Hash, Hasher};

use crate::algebra::FiniteAlgebra;
use crate::term::Term;

pub const DEFAULT_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    /// The element is (the first copy of) generator `i`.
    Generator(usize),
    /// The element is operation `op` applied to earlier elements.
    Operation { op: usize, args: Vec<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureStatus {
    Complete,
    /// Stopped because the cap was reached; the set is not closed.
    Capped,
    /// Stopped early at the caller's request.
    Stopped,
}

/// A generated subset of `A^width` in breadth-first discovery order.
#[derive(Debug, Clone)]
pub struct Closure {
    width: usize,
    data: Vec<u16>,
    provenance: Vec<Provenance>,
    generator_elements: Vec<usize>,
    status: ClosureStatus,
    index: SliceIndex,
}

impl Closure {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.provenance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.provenance.is_empty()
    }

    pub fn status(&self) -> ClosureStatus {
        self.status
    }

    pub fn is_complete(&self) -> bool {
        self.status == ClosureStatus::Complete
    }

    #[inline]
    pub fn get(&self, i: usize) -> &[u16] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u16]> {
        self.data.chunks_exact(self.width.max(1)).take(self.len())
    }

    pub fn provenance(&self, i: usize) -> &Provenance {
        &self.provenance[i]
    }

    /// Element index holding generator `g` (generators may coincide).
    pub fn generator_element(&self, g: usize) -> usize {
        self.generator_elements[g]
    }

    pub fn position(&self, tuple: &[u16]) -> Option<usize> {
        self.index.find(&self.data, self.width, tuple)
    }

    /// Reads back a term for element `i`; generator `g` becomes `leaf(g)`.
    pub fn term_with(&self, alg: &FiniteAlgebra, i: usize, leaf: &dyn Fn(usize) -> Term) -> Term {
        match &self.provenance[i] {
            Provenance::Generator(g) => leaf(*g),
            Provenance::Operation { op, args } => Term::App(
                alg.operations[*op].symbol.clone(),
                args.iter().map(|&a| self.term_with(alg, a, leaf)).collect(),
            ),
        }
    }

    /// Term for element `i` with generator `g` read as variable `x_g`.
    pub fn term(&self, alg: &FiniteAlgebra, i: usize) -> Term {
        self.term_with(alg, i, &Term::Var)
    }
}

/// Open-addressing set of element indices keyed by the tuples they own.
#[derive(Debug, Clone)]
struct SliceIndex {
    slots: Vec<u32>,
    len: usize,
}

const EMPTY: u32 = u32::MAX;

fn hash_slice(s: &[u16]) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    s.hash(&mut h);
    h.finish()
}

impl SliceIndex {
    fn new() -> Self {
        SliceIndex {
            slots: vec![EMPTY; 64],
            len: 0,
        }
    }

    fn find(&self, data: &[u16], width: usize, key: &[u16]) -> Option<usize> {
        let mask = self.slots.len() - 1;
        let mut pos = hash_slice(key) as usize & mask;
        loop {
            let slot = self.slots[pos];
            if slot == EMPTY {
                return None;
            }
            let i = slot as usize;
            if &data[i * width..(i + 1) * width] == key {
                return Some(i);
            }
            pos = (pos + 1) & mask;
        }
    }

    fn insert_new(&mut self, data: &[u16], width: usize, i: usize) {
        if (self.len + 1) * 2 > self.slots.len() {
            let grown = vec![EMPTY; self.slots.len() * 2];
            let old = std::mem::replace(&mut self.slots, grown);
            for slot in old.into_iter().filter(|&s| s != EMPTY) {
                self.place(data, width, slot as usize);
            }
        }
        self.place(data, width, i);
        self.len += 1;
    }

    fn place(&mut self, data: &[u16], width: usize, i: usize) {
        let mask = self.slots.len() - 1;
        let mut pos = hash_slice(&data[i * width..(i + 1) * width]) as usize & mask;
        while self.slots[pos] != EMPTY {
            pos = (pos + 1) & mask;
        }
        self.slots[pos] = i as u32;
    }
}

struct Builder<'a> {
    alg: &'a FiniteAlgebra,
    tables: Vec<Vec<u16>>,
    closure: Closure,
    cap: usize,
    buf: Vec<u16>,
}

enum Insert {
    Known,
    New,
    Full,
}

impl Builder<'_> {
    fn insert(&mut self, provenance: Provenance) -> Insert {
        let c = &mut self.closure;
        if c.index.find(&c.data, c.width, &self.buf).is_some() {
            return Insert::Known;
        }
        if c.len() >= self.cap {
            c.status = ClosureStatus::Capped;
            return Insert::Full;
        }
        let i = c.len();
        c.data.extend_from_slice(&self.buf);
        c.provenance.push(provenance);
        c.index.insert_new(&c.data, c.width, i);
        Insert::New
    }

    fn apply(&mut self, op: usize, args: &[usize]) {
        let n = self.alg.size;
        let width = self.closure.width;
        let table = &self.tables[op];
        let data = &self.closure.data;
        for c in 0..width {
            let mut idx = 0usize;
            for &a in args {
                idx = idx * n + data[a * width + c] as usize;
            }
            self.buf[c] = table[idx];
        }
    }
}

/// Generates the subuniverse of `A^width` spanned by `generators`.
///
/// The result is flagged [`ClosureStatus::Capped`] when more than `cap`
/// elements would be needed; such a set must not be treated as closed.
pub fn closure_in_power(alg: &FiniteAlgebra, width: usize, generators: &[Vec<usize>], cap: usize) -> Closure {
    closure_until(alg, width, generators, cap, |_, _| false)
}

/// Like [`closure_in_power`], but calls `stop(closure, i)` after each new
/// element `i` is inserted and halts as soon as it returns true.
pub fn closure_until(
    alg: &FiniteAlgebra,
    width: usize,
    generators: &[Vec<usize>],
    cap: usize,
    mut stop: impl FnMut(&Closure, usize) -> bool,
) -> Closure {
    let tables = alg
        .operations
        .iter()
        .map(|op| op.table.iter().map(|&v| v as u16).collect())
        .collect();
    let mut b = Builder {
        alg,
        tables,
        closure: Closure {
            width,
            data: Vec::new(),
            provenance: Vec::new(),
            generator_elements: Vec::with_capacity(generators.len()),
            status: ClosureStatus::Complete,
            index: SliceIndex::new(),
        },
        cap,
        buf: vec![0; width],
    };

    for (g, tuple) in generators.iter().enumerate() {
        assert_eq!(tuple.len(), width, "generator {g} has the wrong width");
        for (slot, &v) in b.buf.iter_mut().zip(tuple) {
            debug_assert!(v < alg.size);
            *slot = v as u16;
        }
        match b.insert(Provenance::Generator(g)) {
            Insert::Known => {
                let at = b.closure.position(&b.buf).expect("known");
                b.closure.generator_elements.push(at);
            }
            Insert::New => {
                let at = b.closure.len() - 1;
                b.closure.generator_elements.push(at);
                if stop(&b.closure, at) {
                    b.closure.status = ClosureStatus::Stopped;
                    return b.closure;
                }
            }
            Insert::Full => return b.closure,
        }
    }

    for (op, operation) in alg.operations.iter().enumerate() {
        if operation.arity == 0 {
            b.buf.fill(operation.table[0] as u16);
            match b.insert(Provenance::Operation { op, args: vec![] }) {
                Insert::Known => {}
                Insert::New => {
                    if stop(&b.closure, b.closure.len() - 1) {
                        b.closure.status = ClosureStatus::Stopped;
                        return b.closure;
                    }
                }
                Insert::Full => return b.closure,
            }
        }
    }

    let arities: Vec<usize> = alg.operations.iter().map(|op| op.arity).collect();
    let mut args = Vec::new();
    let mut i = 0;
    while i < b.closure.len() {
        for (op, &k) in arities.iter().enumerate() {
            if k == 0 {
                continue;
            }
            // Every k-tuple over [0, i] that mentions i, grouped by the
            // position of the first occurrence of i.
            for first in 0..k {
                let bound = |pos: usize| if pos < first { i } else { i + 1 };
                let free: Vec<usize> = (0..k).filter(|&p| p != first).collect();
                if free.iter().any(|&p| bound(p) == 0) {
                    continue;
                }
                args.clear();
                args.resize(k, 0);
                args[first] = i;
                loop {
                    b.apply(op, &args);
                    match b.insert(Provenance::Operation { op, args: args.clone() }) {
                        Insert::Known => {}
                        Insert::New => {
                            if stop(&b.closure, b.closure.len() - 1) {
                                b.closure.status = ClosureStatus::Stopped;
                                return b.closure;
                            }
                        }
                        Insert::Full => return b.closure,
                    }
                    let mut exhausted = true;
                    for &p in free.iter().rev() {
                        args[p] += 1;
                        if args[p] < bound(p) {
                            exhausted = false;
                            break;
                        }
                        args[p] = 0;
                    }
                    if exhausted {
                        break;
                    }
                }
            }
        }
        i += 1;
    }
    b.closure
}

/// All unary polynomial functions of `alg`: the closure of the identity
/// and the constants under the basic operations. Generator 0 is the
/// identity and generator `1 + c` is the constant `c`, so terms read back
/// with [`polynomial_term`] have one variable and constant leaves.
pub fn unary_polynomial_clone(alg: &FiniteAlgebra) -> Closure {
    let n = alg.size;
    let mut gens = vec![(0..n).collect::<Vec<_>>()];
    gens.extend((0..n).map(|c| vec![c; n]));
    // n^n bounds the number of unary functions; saturate for large n.
    let cap = n.checked_pow(n as u32).unwrap_or(usize::MAX).min(usize::MAX - 1);
    closure_in_power(alg, n, &gens, cap)
}

/// The one-variable polynomial term of element `i` of a unary polynomial
/// clone.
pub fn polynomial_term(alg: &FiniteAlgebra, clone: &Closure, i: usize) -> Term {
    clone.term_with(alg, i, &|g| if g == 0 { Term::Var(0) } else { Term::Const(g - 1) })
}
