//! Finite algebras given by flat operation tables.
//!
//! The universe of an algebra of size `n` is `{0, .., n-1}`. An operation of
//! arity `k` is stored row-major: the tuple `(a_1, .., a_k)` lives at index
//! `a_1·n^(k-1) + .. + a_k`.

use serde::{Deserialize, Serialize};

use crate::closure::closure_in_power;
use crate::error::{Error, Result};
use crate::partition::Partition;

pub const MAX_SIZE: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Operation {
    pub symbol: String,
    pub arity: usize,
    pub table: Vec<usize>,
}

impl Operation {
    pub fn new(symbol: impl Into<String>, arity: usize, table: Vec<usize>) -> Self {
        Operation {
            symbol: symbol.into(),
            arity,
            table,
        }
    }

    /// Builds the table of an operation from a closure over argument tuples.
    pub fn from_fn(symbol: impl Into<String>, size: usize, arity: usize, mut f: impl FnMut(&[usize]) -> usize) -> Self {
        let mut table = Vec::with_capacity(size.pow(arity as u32));
        for_each_tuple(size, arity, |args| table.push(f(args)));
        Operation::new(symbol, arity, table)
    }

    #[inline]
    pub fn apply(&self, size: usize, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.arity);
        self.table[flat_index(size, args)]
    }
}

/// Row-major index of `args` in a table over a universe of size `n`.
#[inline]
pub fn flat_index(n: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * n + a)
}

/// Calls `f` on every tuple of `{0..n-1}^k` in row-major order.
pub fn for_each_tuple(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut tuple = vec![0usize; k];
    if k == 0 {
        f(&tuple);
        return;
    }
    if n == 0 {
        return;
    }
    loop {
        f(&tuple);
        let mut pos = k;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < n {
                break;
            }
            tuple[pos] = 0;
        }
    }
}

pub(crate) fn valid_symbol(symbol: &str) -> bool {
    let reserved = |c: char| c.is_whitespace() || matches!(c, '(' | ')' | ',' | '#' | '"');
    if symbol.is_empty() || symbol.chars().any(reserved) {
        return false;
    }
    // `x<digits>` is the variable syntax of serialized terms.
    !(symbol.len() > 1 && symbol.starts_with('x') && symbol[1..].bytes().all(|b| b.is_ascii_digit()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawAlgebra")]
pub struct FiniteAlgebra {
    pub name: String,
    pub size: usize,
    pub operations: Vec<Operation>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgebra {
    name: String,
    size: usize,
    operations: Vec<Operation>,
}

impl TryFrom<RawAlgebra> for FiniteAlgebra {
    type Error = Error;

    fn try_from(raw: RawAlgebra) -> Result<Self> {
        FiniteAlgebra::new(raw.name, raw.size, raw.operations)
    }
}

impl FiniteAlgebra {
    /// Validates the raw parts of an algebra and assembles it.
    ///
    /// The first violated invariant is reported, naming the operation and
    /// the flat table index where relevant.
    pub fn new(name: impl Into<String>, size: usize, operations: Vec<Operation>) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyUniverse);
        }
        if size > MAX_SIZE {
            return Err(Error::UniverseTooLarge(size));
        }
        for (i, op) in operations.iter().enumerate() {
            if !valid_symbol(&op.symbol) {
                return Err(Error::InvalidSymbol(op.symbol.clone()));
            }
            if operations[..i].iter().any(|o| o.symbol == op.symbol) {
                return Err(Error::DuplicateSymbol(op.symbol.clone()));
            }
            let expected = size.checked_pow(op.arity as u32).ok_or_else(|| Error::TableLength {
                symbol: op.symbol.clone(),
                expected: usize::MAX,
                actual: op.table.len(),
            })?;
            if op.table.len() != expected {
                return Err(Error::TableLength {
                    symbol: op.symbol.clone(),
                    expected,
                    actual: op.table.len(),
                });
            }
            if let Some((index, &value)) = op.table.iter().enumerate().find(|(_, &v)| v >= size) {
                return Err(Error::EntryOutOfRange {
                    symbol: op.symbol.clone(),
                    index,
                    value,
                });
            }
        }
        Ok(FiniteAlgebra {
            name: name.into(),
            size,
            operations,
        })
    }

    pub fn op_index(&self, symbol: &str) -> Option<usize> {
        self.operations.iter().position(|op| op.symbol == symbol)
    }

    pub fn op(&self, symbol: &str) -> Option<&Operation> {
        self.operations.iter().find(|op| op.symbol == symbol)
    }

    /// True when both algebras list the same symbols with the same arities
    /// in the same order.
    pub fn same_signature(&self, other: &FiniteAlgebra) -> bool {
        self.operations.len() == other.operations.len()
            && self
                .operations
                .iter()
                .zip(&other.operations)
                .all(|(a, b)| a.symbol == b.symbol && a.arity == b.arity)
    }

    pub(crate) fn check_element(&self, element: usize) -> Result<()> {
        if element >= self.size {
            Err(Error::ElementOutOfRange {
                element,
                size: self.size,
            })
        } else {
            Ok(())
        }
    }

    /// Checks that `relation` is compatible with every operation.
    pub fn is_congruence(&self, relation: &Partition) -> bool {
        self.incompatible_operation(relation).is_none()
    }

    fn incompatible_operation(&self, relation: &Partition) -> Option<&Operation> {
        if relation.len() != self.size {
            return self.operations.first();
        }
        let n = self.size;
        // Compatibility with all operations is equivalent to compatibility
        // with every single-slot translation.
        for op in &self.operations {
            for slot in 0..op.arity {
                let mut args = vec![0usize; op.arity];
                let mut ok = true;
                for_each_tuple(n, op.arity - 1, |rest| {
                    if !ok {
                        return;
                    }
                    args[..slot].copy_from_slice(&rest[..slot]);
                    args[slot + 1..].copy_from_slice(&rest[slot..]);
                    for a in 0..n {
                        let b = relation.block_id(a);
                        if b == a {
                            continue;
                        }
                        args[slot] = a;
                        let fa = op.apply(n, &args);
                        args[slot] = b;
                        let fb = op.apply(n, &args);
                        if !relation.related(fa, fb) {
                            ok = false;
                            return;
                        }
                    }
                });
                if !ok {
                    return Some(op);
                }
            }
        }
        None
    }

    /// The quotient by a congruence.
    ///
    /// Blocks are numbered by increasing minimum element. Returns the
    /// quotient together with the projection onto it.
    pub fn quotient(&self, theta: &Partition) -> Result<(FiniteAlgebra, Vec<usize>)> {
        if theta.len() != self.size {
            return Err(Error::PartitionSize {
                expected: self.size,
                actual: theta.len(),
            });
        }
        let reps = theta.representatives();
        let mut projection = vec![0usize; self.size];
        for (i, slot) in projection.iter_mut().enumerate() {
            *slot = reps.binary_search(&theta.block_id(i)).expect("canonical ids");
        }
        let m = reps.len();
        let mut ops = Vec::with_capacity(self.operations.len());
        for op in &self.operations {
            let mut table = vec![usize::MAX; m.pow(op.arity as u32)];
            let mut compatible = true;
            for_each_tuple(self.size, op.arity, |args| {
                let value = projection[op.apply(self.size, args)];
                let index = args.iter().fold(0, |acc, &a| acc * m + projection[a]);
                if table[index] == usize::MAX {
                    table[index] = value;
                } else if table[index] != value {
                    compatible = false;
                }
            });
            if !compatible {
                return Err(Error::NotCompatible {
                    symbol: op.symbol.clone(),
                });
            }
            ops.push(Operation::new(op.symbol.clone(), op.arity, table));
        }
        let name = format!("{}/{}", self.name, theta);
        Ok((FiniteAlgebra::new(name, m, ops)?, projection))
    }

    /// The direct product `self × other`; the pair `(a, b)` is encoded as
    /// `a·|other| + b`.
    pub fn product(&self, other: &FiniteAlgebra) -> Result<FiniteAlgebra> {
        if !self.same_signature(other) {
            return Err(Error::SignatureMismatch);
        }
        let m = other.size;
        let size = self.size * m;
        let ops = self
            .operations
            .iter()
            .zip(&other.operations)
            .map(|(f, g)| {
                let mut left = vec![0usize; f.arity];
                let mut right = vec![0usize; f.arity];
                Operation::from_fn(f.symbol.clone(), size, f.arity, |args| {
                    for (j, &a) in args.iter().enumerate() {
                        left[j] = a / m;
                        right[j] = a % m;
                    }
                    f.apply(self.size, &left) * m + g.apply(m, &right)
                })
            })
            .collect();
        FiniteAlgebra::new(format!("{}x{}", self.name, other.name), size, ops)
    }

    /// The subuniverse generated by `generators`, in ascending order.
    pub fn subuniverse(&self, generators: &[usize]) -> Result<Vec<usize>> {
        for &g in generators {
            self.check_element(g)?;
        }
        let gens: Vec<Vec<usize>> = generators.iter().map(|&g| vec![g]).collect();
        let closure = closure_in_power(self, 1, &gens, self.size + 1);
        let mut elements: Vec<usize> = (0..closure.len()).map(|i| closure.get(i)[0] as usize).collect();
        elements.sort_unstable();
        Ok(elements)
    }

    /// The subalgebra on a subuniverse, renumbered in ascending order,
    /// together with its embedding into `self`.
    pub fn subalgebra(&self, generators: &[usize]) -> Result<(FiniteAlgebra, Vec<usize>)> {
        let universe = self.subuniverse(generators)?;
        if universe.is_empty() {
            return Err(Error::EmptyUniverse);
        }
        let mut local = vec![usize::MAX; self.size];
        for (i, &a) in universe.iter().enumerate() {
            local[a] = i;
        }
        let m = universe.len();
        let ops = self
            .operations
            .iter()
            .map(|op| {
                let mut args = vec![0usize; op.arity];
                Operation::from_fn(op.symbol.clone(), m, op.arity, |sub| {
                    for (j, &a) in sub.iter().enumerate() {
                        args[j] = universe[a];
                    }
                    local[op.apply(self.size, &args)]
                })
            })
            .collect();
        let name = format!("Sg{:?}<={}", generators, self.name);
        Ok((FiniteAlgebra::new(name, m, ops)?, universe))
    }

    /// Verifies that `map` is a surjective homomorphism onto `target`.
    pub fn check_surjective_homomorphism(&self, target: &FiniteAlgebra, map: &[usize]) -> Result<()> {
        if !self.same_signature(target) {
            return Err(Error::SignatureMismatch);
        }
        if map.len() != self.size {
            return Err(Error::PartitionSize {
                expected: self.size,
                actual: map.len(),
            });
        }
        for &b in map {
            target.check_element(b)?;
        }
        for (f, g) in self.operations.iter().zip(&target.operations) {
            let mut image = vec![0usize; f.arity];
            let mut ok = true;
            for_each_tuple(self.size, f.arity, |args| {
                if !ok {
                    return;
                }
                for (j, &a) in args.iter().enumerate() {
                    image[j] = map[a];
                }
                ok = map[f.apply(self.size, args)] == g.apply(target.size, &image);
            });
            if !ok {
                return Err(Error::NotHomomorphism {
                    symbol: f.symbol.clone(),
                });
            }
        }
        let mut hit = vec![false; target.size];
        for &b in map {
            hit[b] = true;
        }
        match hit.iter().position(|&h| !h) {
            Some(b) => Err(Error::NotSurjective(b)),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z4() -> FiniteAlgebra {
        FiniteAlgebra::new(
            "Z4",
            4,
            vec![
                Operation::from_fn("+", 4, 2, |a| (a[0] + a[1]) % 4),
                Operation::from_fn("-", 4, 1, |a| (4 - a[0]) % 4),
                Operation::new("0", 0, vec![0]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn empty_signature_is_valid() {
        let a = FiniteAlgebra::new("set2", 2, vec![]).unwrap();
        assert_eq!(a.size, 2);
        assert!(a.operations.is_empty());
    }

    #[test]
    fn semilattice_table_is_valid() {
        let a = FiniteAlgebra::new("sl", 2, vec![Operation::new("∧", 2, vec![0, 0, 0, 1])]);
        assert!(a.is_ok());
    }

    #[test]
    fn out_of_range_entry_is_reported_with_index() {
        let err = FiniteAlgebra::new("bad", 2, vec![Operation::new("f", 2, vec![0, 0, 0, 2])]).unwrap_err();
        assert_eq!(
            err,
            Error::EntryOutOfRange {
                symbol: "f".into(),
                index: 3,
                value: 2
            }
        );
        assert!(err.to_string().contains("entry 2 out of range"));
    }

    #[test]
    fn table_length_and_universe_checks() {
        assert_eq!(FiniteAlgebra::new("e", 0, vec![]).unwrap_err(), Error::EmptyUniverse);
        assert!(matches!(
            FiniteAlgebra::new("c", 3, vec![Operation::new("c", 0, vec![0, 1])]),
            Err(Error::TableLength {
                expected: 1,
                actual: 2,
                ..
            })
        ));
        assert!(matches!(
            FiniteAlgebra::new("c", 3, vec![Operation::new("x1", 0, vec![0])]),
            Err(Error::InvalidSymbol(_))
        ));
    }

    #[test]
    fn tuples_are_row_major() {
        let mut seen = Vec::new();
        for_each_tuple(3, 2, |t| seen.push(flat_index(3, t)));
        assert_eq!(seen, (0..9).collect::<Vec<_>>());
        let mut count = 0;
        for_each_tuple(5, 0, |t| {
            assert!(t.is_empty());
            count += 1
        });
        assert_eq!(count, 1);
    }

    #[test]
    fn quotient_by_identity_is_isomorphic_copy() {
        let a = z4();
        let (q, proj) = a.quotient(&Partition::discrete(4)).unwrap();
        assert_eq!(q.size, 4);
        assert_eq!(proj, vec![0, 1, 2, 3]);
        assert_eq!(q.operations, a.operations);
    }

    #[test]
    fn quotient_of_z4_by_evens_is_z2() {
        let a = z4();
        let theta: Partition = "0,2|1,3".parse().unwrap();
        let (q, proj) = a.quotient(&theta).unwrap();
        assert_eq!(q.size, 2);
        assert_eq!(proj, vec![0, 1, 0, 1]);
        assert_eq!(q.op("+").unwrap().table, vec![0, 1, 1, 0]);
        assert_eq!(q.op("-").unwrap().table, vec![0, 1]);
        // Brute-force well-definedness: the projection is a homomorphism.
        a.check_surjective_homomorphism(&q, &proj).unwrap();
    }

    #[test]
    fn quotient_by_full_relation_is_trivial() {
        let lat = FiniteAlgebra::new(
            "lattice2",
            2,
            vec![
                Operation::new("meet", 2, vec![0, 0, 0, 1]),
                Operation::new("join", 2, vec![0, 1, 1, 1]),
            ],
        )
        .unwrap();
        let (q, proj) = lat.quotient(&Partition::full(2)).unwrap();
        assert_eq!(q.size, 1);
        assert_eq!(proj, vec![0, 0]);
    }

    #[test]
    fn quotient_rejects_non_congruence() {
        let theta = Partition::parse_blocks("0,1", 4).unwrap();
        assert!(matches!(z4().quotient(&theta), Err(Error::NotCompatible { .. })));
        assert!(!z4().is_congruence(&theta));
    }

    #[test]
    fn product_and_subalgebra() {
        let a = z4();
        let p = a.product(&a).unwrap();
        assert_eq!(p.size, 16);
        // (1,3) + (2,2) = (3,1)
        assert_eq!(p.op("+").unwrap().apply(16, &[4 + 3, 8 + 2]), 12 + 1);
        let (sub, emb) = a.subalgebra(&[2]).unwrap();
        assert_eq!(emb, vec![0, 2]);
        assert_eq!(sub.size, 2);
        a.subuniverse(&[9]).unwrap_err();
    }
}
