//! Builtin algebras.

use crate::algebra::{FiniteAlgebra, Operation};
use crate::error::{Error, Result};

pub const BUILTIN_NAMES: &[&str] = &[
    "set2",
    "semilattice2",
    "lattice2",
    "chain3",
    "Z2",
    "Z4",
    "V4",
    "S3",
    "D4",
    "zeroring2",
    "zeroring4",
    "M3lat",
    "N5lat",
];

pub fn builtin(name: &str) -> Result<FiniteAlgebra> {
    let alg = match name {
        "set2" => FiniteAlgebra::new("set2", 2, vec![])?,
        "semilattice2" => FiniteAlgebra::new(
            "semilattice2",
            2,
            vec![Operation::from_fn("meet", 2, 2, |a| a[0].min(a[1]))],
        )?,
        "lattice2" => chain("lattice2", 2)?,
        "chain3" => chain("chain3", 3)?,
        "Z2" => cyclic_group("Z2", 2)?,
        "Z4" => cyclic_group("Z4", 4)?,
        "V4" => klein_four()?,
        "S3" => permutation_group("S3", 3, &[vec![1, 0, 2], vec![1, 2, 0]])?,
        "D4" => permutation_group("D4", 4, &[vec![1, 2, 3, 0], vec![0, 3, 2, 1]])?,
        "zeroring2" => zero_ring("zeroring2", 2)?,
        "zeroring4" => zero_ring("zeroring4", 4)?,
        // 0 < 1, 2, 3 < 4
        "M3lat" => lattice_from_order("M3lat", 5, |a, b| a == b || a == 0 || b == 4)?,
        // 0 < 1 < 2 < 4 and 0 < 3 < 4
        "N5lat" => lattice_from_order("N5lat", 5, |a, b| a == b || a == 0 || b == 4 || (a == 1 && b == 2))?,
        _ => return Err(Error::UnknownBuiltin(name.to_string())),
    };
    Ok(alg)
}

/// `Z_n` with `+`, `-` and the constant `0`.
pub fn cyclic_group(name: &str, n: usize) -> Result<FiniteAlgebra> {
    FiniteAlgebra::new(name, n, additive_ops(n, |a, b| (a + b) % n, |a| (n - a) % n))
}

fn additive_ops(n: usize, add: impl Fn(usize, usize) -> usize, neg: impl Fn(usize) -> usize) -> Vec<Operation> {
    vec![
        Operation::from_fn("+", n, 2, |a| add(a[0], a[1])),
        Operation::from_fn("-", n, 1, |a| neg(a[0])),
        Operation::new("0", 0, vec![0]),
    ]
}

fn klein_four() -> Result<FiniteAlgebra> {
    FiniteAlgebra::new("V4", 4, additive_ops(4, |a, b| a ^ b, |a| a))
}

/// A ring on `Z_n` whose multiplication is identically zero.
pub fn zero_ring(name: &str, n: usize) -> Result<FiniteAlgebra> {
    let mut ops = additive_ops(n, |a, b| (a + b) % n, |a| (n - a) % n);
    ops.push(Operation::new("*", 2, vec![0; n * n]));
    FiniteAlgebra::new(name, n, ops)
}

fn chain(name: &str, n: usize) -> Result<FiniteAlgebra> {
    lattice_from_order(name, n, |a, b| a <= b)
}

/// A lattice from its order relation; meets and joins are computed as
/// greatest lower and least upper bounds.
pub fn lattice_from_order(name: &str, n: usize, leq: impl Fn(usize, usize) -> bool) -> Result<FiniteAlgebra> {
    let bound = |a: usize, b: usize, below: bool| -> Result<usize> {
        let rel = |x: usize, y: usize| if below { leq(x, y) } else { leq(y, x) };
        let common: Vec<usize> = (0..n).filter(|&c| rel(c, a) && rel(c, b)).collect();
        common
            .iter()
            .copied()
            .find(|&c| common.iter().all(|&d| rel(d, c)))
            .ok_or_else(|| Error::Parse(format!("{name}: order is not a lattice at ({a},{b})")))
    };
    let mut meet = Vec::with_capacity(n * n);
    let mut join = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            meet.push(bound(a, b, true)?);
            join.push(bound(a, b, false)?);
        }
    }
    FiniteAlgebra::new(
        name,
        n,
        vec![Operation::new("meet", 2, meet), Operation::new("join", 2, join)],
    )
}

/// The permutation group generated by `generators` (as images of
/// `0..degree`), elements sorted lexicographically so that the identity
/// is element 0. `(p*q)(i) = p(q(i))`.
pub fn permutation_group(name: &str, degree: usize, generators: &[Vec<usize>]) -> Result<FiniteAlgebra> {
    let compose = |p: &[usize], q: &[usize]| -> Vec<usize> { q.iter().map(|&i| p[i]).collect() };
    let identity: Vec<usize> = (0..degree).collect();
    let mut elements = vec![identity];
    let mut i = 0;
    while i < elements.len() {
        for g in generators {
            let h = compose(&elements[i], g);
            if !elements.contains(&h) {
                elements.push(h);
            }
        }
        i += 1;
    }
    elements.sort();
    let n = elements.len();
    let index = |p: &[usize]| elements.iter().position(|e| e == p).expect("closed");
    let mul = Operation::from_fn("*", n, 2, |a| index(&compose(&elements[a[0]], &elements[a[1]])));
    let inv = Operation::from_fn("inv", n, 1, |a| {
        let p = &elements[a[0]];
        let mut q = vec![0; degree];
        for (i, &pi) in p.iter().enumerate() {
            q[pi] = i;
        }
        index(&q)
    });
    FiniteAlgebra::new(name, n, vec![mul, inv, Operation::new("e", 0, vec![0])])
}
