//! The congruence lattice `Con(A)`.

use std::collections::HashMap;

use serde::Serialize;

use crate::algebra::FiniteAlgebra;
use crate::congruence::cg;
use crate::error::{Error, Result};
use crate::partition::Partition;

pub const DEFAULT_LATTICE_CAP: usize = 200_000;

/// All congruences of an algebra, sorted by decreasing number of blocks
/// and then by block-id sequence, so `0_A` comes first and `1_A` last.
#[derive(Debug, Clone)]
pub struct CongruenceLattice {
    elements: Vec<Partition>,
    index: HashMap<Partition, usize>,
    meet: Vec<usize>,
    join: Vec<usize>,
    leq: Vec<bool>,
}

fn canonical_order(a: &Partition, b: &Partition) -> std::cmp::Ordering {
    b.num_blocks().cmp(&a.num_blocks()).then_with(|| a.cmp(b))
}

impl CongruenceLattice {
    /// Builds the lattice from a meet- and join-closed family containing
    /// `0_A` and `1_A`.
    pub fn from_elements(mut elements: Vec<Partition>) -> Self {
        elements.sort_by(canonical_order);
        elements.dedup();
        let m = elements.len();
        let index: HashMap<Partition, usize> = elements.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let mut meet = vec![0; m * m];
        let mut join = vec![0; m * m];
        let mut leq = vec![false; m * m];
        for i in 0..m {
            for j in 0..m {
                meet[i * m + j] = index[&elements[i].meet(&elements[j])];
                join[i * m + j] = index[&elements[i].join(&elements[j])];
                leq[i * m + j] = elements[i].leq(&elements[j]);
            }
        }
        CongruenceLattice {
            elements,
            index,
            meet,
            join,
            leq,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Partition] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &Partition {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.len() - 1
    }

    #[inline]
    pub fn meet(&self, i: usize, j: usize) -> usize {
        self.meet[i * self.len() + j]
    }

    #[inline]
    pub fn join(&self, i: usize, j: usize) -> usize {
        self.join[i * self.len() + j]
    }

    #[inline]
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i * self.len() + j]
    }

    /// Covering pairs `(lower, upper)` of the order, i.e. Hasse edges.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let m = self.len();
        let mut out = Vec::new();
        for i in 0..m {
            for j in 0..m {
                if i != j && self.leq(i, j) && !(0..m).any(|k| k != i && k != j && self.leq(i, k) && self.leq(k, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Every congruence of `alg`: the principal congruences closed under
/// joins. Fails with [`Error::CapExceeded`] past `cap` congruences.
pub fn con_all(alg: &FiniteAlgebra, cap: usize) -> Result<CongruenceLattice> {
    let n = alg.size;
    let mut principals: Vec<Partition> = Vec::new();
    let mut seen: HashMap<Partition, ()> = HashMap::new();
    for a in 0..n {
        for b in a + 1..n {
            let p = cg(alg, &[(a, b)]);
            if seen.insert(p.clone(), ()).is_none() {
                principals.push(p);
            }
        }
    }
    let mut all = vec![Partition::discrete(n)];
    let mut known: HashMap<Partition, ()> = HashMap::from([(Partition::discrete(n), ())]);
    for p in &principals {
        if known.insert(p.clone(), ()).is_none() {
            all.push(p.clone());
        }
    }
    let mut i = 0;
    while i < all.len() {
        for p in &principals {
            let j = all[i].join(p);
            if known.insert(j.clone(), ()).is_none() {
                if all.len() >= cap {
                    return Err(Error::CapExceeded { cap });
                }
                all.push(j);
            }
        }
        i += 1;
    }
    Ok(CongruenceLattice::from_elements(all))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeProperties {
    pub modular: bool,
    pub distributive: bool,
    /// Indices `(θ, φ, ψ)` with `θ ≤ ψ` and `(θ∨φ)∧ψ ≠ θ∨(φ∧ψ)`.
    pub modularity_failure: Option<[usize; 3]>,
    /// Indices `(θ, φ, ψ)` with `θ∧(φ∨ψ) ≠ (θ∧φ)∨(θ∧ψ)`.
    pub distributivity_failure: Option<[usize; 3]>,
    /// Three distinct non-trivial elements with pairwise meets `0` and
    /// pairwise joins `1`.
    pub m3_01: Option<[usize; 3]>,
}

pub fn lattice_properties(lat: &CongruenceLattice) -> LatticeProperties {
    let m = lat.len();
    let mut modularity_failure = None;
    let mut distributivity_failure = None;
    'outer: for t in 0..m {
        for f in 0..m {
            for p in 0..m {
                if modularity_failure.is_none()
                    && lat.leq(t, p)
                    && lat.meet(lat.join(t, f), p) != lat.join(t, lat.meet(f, p))
                {
                    modularity_failure = Some([t, f, p]);
                }
                if distributivity_failure.is_none()
                    && lat.meet(t, lat.join(f, p)) != lat.join(lat.meet(t, f), lat.meet(t, p))
                {
                    distributivity_failure = Some([t, f, p]);
                }
                if modularity_failure.is_some() && distributivity_failure.is_some() {
                    break 'outer;
                }
            }
        }
    }
    let (bottom, top) = (lat.bottom(), lat.top());
    let complements = |a: usize, b: usize| lat.meet(a, b) == bottom && lat.join(a, b) == top;
    let mut m3_01 = None;
    if m > 4 {
        'search: for a in 1..top {
            for b in a + 1..top {
                if !complements(a, b) {
                    continue;
                }
                for c in b + 1..top {
                    if complements(a, c) && complements(b, c) {
                        m3_01 = Some([a, b, c]);
                        break 'search;
                    }
                }
            }
        }
    }
    LatticeProperties {
        modular: modularity_failure.is_none(),
        distributive: distributivity_failure.is_none(),
        modularity_failure,
        distributivity_failure,
        m3_01,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::for_each_tuple;
    use crate::corpus::builtin;

    /// Oracle: filter all equivalence relations by compatibility.
    fn brute_force_congruences(alg: &FiniteAlgebra) -> Vec<Partition> {
        let n = alg.size;
        let mut out = Vec::new();
        for_each_tuple(n, n, |keys| {
            let p = Partition::from_keys(n, |i| keys[i]);
            if alg.is_congruence(&p) {
                out.push(p);
            }
        });
        out.sort();
        out.dedup();
        out
    }

    #[test]
    fn bare_two_element_set() {
        let lat = con_all(&builtin("set2").unwrap(), 100).unwrap();
        assert_eq!(lat.len(), 2);
        let props = lattice_properties(&lat);
        assert!(props.modular && props.distributive && props.m3_01.is_none());
    }

    #[test]
    fn counts_match_brute_force() {
        for (name, count) in [
            ("Z4", 3),
            ("S3", 3),
            ("V4", 5),
            ("chain3", 4),
            ("M3lat", 2),
            ("N5lat", 5),
        ] {
            let alg = builtin(name).unwrap();
            let lat = con_all(&alg, 1000).unwrap();
            let mut mine: Vec<Partition> = lat.elements().to_vec();
            mine.sort();
            assert_eq!(mine, brute_force_congruences(&alg), "{name}");
            assert_eq!(lat.len(), count, "{name}");
            assert!(lat.get(lat.bottom()).is_discrete() && lat.get(lat.top()).is_full());
        }
    }

    #[test]
    fn order_tables_are_consistent() {
        let lat = con_all(&builtin("V4").unwrap(), 1000).unwrap();
        for i in 0..lat.len() {
            for j in 0..lat.len() {
                assert_eq!(lat.leq(i, j), lat.meet(i, j) == i);
                assert_eq!(lat.leq(i, j), lat.join(i, j) == j);
                if lat.leq(i, j) {
                    assert!(i <= j, "sort is a linear extension");
                }
            }
        }
    }

    #[test]
    fn klein_group_has_m3() {
        let lat = con_all(&builtin("V4").unwrap(), 1000).unwrap();
        let props = lattice_properties(&lat);
        assert_eq!(props.m3_01, Some([1, 2, 3]));
        assert!(props.modular && !props.distributive);
        assert_eq!(lat.covers().len(), 6);
    }

    #[test]
    fn s3_is_a_three_chain() {
        let lat = con_all(&builtin("S3").unwrap(), 1000).unwrap();
        let props = lattice_properties(&lat);
        assert!(props.modular && props.distributive && props.m3_01.is_none());
        assert_eq!(lat.covers(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn partition_lattice_of_four_set_is_not_modular() {
        let set4 = FiniteAlgebra::new("set4", 4, vec![]).unwrap();
        let lat = con_all(&set4, 1000).unwrap();
        assert_eq!(lat.len(), 15);
        let props = lattice_properties(&lat);
        assert!(!props.modular);
        let [t, f, p] = props.modularity_failure.unwrap();
        assert!(lat.leq(t, p));
        assert_ne!(lat.meet(lat.join(t, f), p), lat.join(t, lat.meet(f, p)));
    }

    #[test]
    fn cap_is_reported() {
        let set4 = FiniteAlgebra::new("set4", 4, vec![]).unwrap();
        assert_eq!(con_all(&set4, 5).unwrap_err(), Error::CapExceeded { cap: 5 });
    }
}
