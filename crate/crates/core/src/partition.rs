//! Equivalence relations on `{0..n-1}` in canonical block-id form.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`; returns false if they were
    /// already merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn into_partition(mut self) -> Partition {
        let n = self.parent.len();
        let mut min_of_root = vec![usize::MAX; n];
        let mut ids = vec![0; n];
        for (i, id) in ids.iter_mut().enumerate() {
            let r = self.find(i);
            if min_of_root[r] == usize::MAX {
                min_of_root[r] = i;
            }
            *id = min_of_root[r];
        }
        Partition { ids }
    }
}

/// An equivalence relation stored as the sequence of block ids, where the
/// id of a block is its least element. Equal relations have equal
/// sequences.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    ids: Vec<usize>,
}

impl Partition {
    /// The identity relation `0_A`.
    pub fn discrete(n: usize) -> Self {
        Partition { ids: (0..n).collect() }
    }

    /// The full relation `1_A`.
    pub fn full(n: usize) -> Self {
        Partition { ids: vec![0; n] }
    }

    /// The kernel of a map: `a ~ b` iff `key(a) == key(b)`.
    pub fn from_keys<K: Eq + std::hash::Hash>(n: usize, mut key: impl FnMut(usize) -> K) -> Self {
        let mut first = std::collections::HashMap::new();
        let ids = (0..n).map(|i| *first.entry(key(i)).or_insert(i)).collect();
        Partition { ids }
    }

    /// Checks the canonical-form invariants of a raw id sequence.
    pub fn from_ids(ids: Vec<usize>) -> Result<Self> {
        for (i, &id) in ids.iter().enumerate() {
            if id > i || ids[id] != id {
                return Err(Error::Parse(format!("non-canonical block id {id} at {i}")));
            }
        }
        Ok(Partition { ids })
    }

    /// The equivalence generated by `pairs`.
    pub fn generated_by(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut uf = UnionFind::new(n);
        for (a, b) in pairs {
            uf.union(a, b);
        }
        uf.into_partition()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    #[inline]
    pub fn block_id(&self, a: usize) -> usize {
        self.ids[a]
    }

    #[inline]
    pub fn related(&self, a: usize, b: usize) -> bool {
        self.ids[a] == self.ids[b]
    }

    pub fn is_discrete(&self) -> bool {
        self.ids.iter().enumerate().all(|(i, &id)| i == id)
    }

    pub fn is_full(&self) -> bool {
        self.ids.iter().all(|&id| id == 0)
    }

    /// Least element of each block, ascending.
    pub fn representatives(&self) -> Vec<usize> {
        self.ids
            .iter()
            .enumerate()
            .filter(|(i, &id)| *i == id)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn num_blocks(&self) -> usize {
        self.representatives().len()
    }

    /// Blocks sorted by minimum, elements ascending.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut index = vec![usize::MAX; self.len()];
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, &id) in self.ids.iter().enumerate() {
            if id == i {
                index[i] = blocks.len();
                blocks.push(vec![i]);
            } else {
                blocks[index[id]].push(i);
            }
        }
        blocks
    }

    /// All ordered pairs `(a, b)` with `a ~ b`, including `a == b`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let blocks = self.blocks();
        let mut out = Vec::new();
        for block in &blocks {
            for &a in block {
                for &b in block {
                    out.push((a, b));
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn leq(&self, other: &Partition) -> bool {
        debug_assert_eq!(self.len(), other.len());
        self.ids
            .iter()
            .enumerate()
            .all(|(i, &id)| other.ids[i] == other.ids[id])
    }

    pub fn meet(&self, other: &Partition) -> Partition {
        Partition::from_keys(self.len(), |i| (self.ids[i], other.ids[i]))
    }

    pub fn join(&self, other: &Partition) -> Partition {
        let mut uf = UnionFind::new(self.len());
        for i in 0..self.len() {
            uf.union(i, self.ids[i]);
            uf.union(i, other.ids[i]);
        }
        uf.into_partition()
    }

    /// Parses block syntax `"0,2|1,3"` over a universe of size `n`.
    /// Singleton blocks may be omitted; `"0"` and `"1"` denote the
    /// identity and full relations.
    pub fn parse_blocks(text: &str, n: usize) -> Result<Partition> {
        let text = text.trim();
        match text {
            "0" => return Ok(Partition::discrete(n)),
            "1" => return Ok(Partition::full(n)),
            "" => return Ok(Partition::discrete(n)),
            _ => {}
        }
        let mut seen = vec![false; n];
        let mut uf = UnionFind::new(n);
        for block in text.split('|') {
            let mut first = None;
            for item in block.split(',') {
                let item = item.trim();
                let e: usize = item
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad element `{item}` in partition")))?;
                if e >= n {
                    return Err(Error::ElementOutOfRange { element: e, size: n });
                }
                if seen[e] {
                    return Err(Error::Parse(format!("element {e} appears in two blocks")));
                }
                seen[e] = true;
                match first {
                    None => first = Some(e),
                    Some(f) => {
                        uf.union(f, e);
                    }
                }
            }
        }
        Ok(uf.into_partition())
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, block) in self.blocks().iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            for (j, e) in block.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{e}")?;
            }
        }
        Ok(())
    }
}

/// Parses block syntax; the universe size is one more than the largest
/// listed element.
impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut max = None;
        for item in s.split(['|', ',']) {
            let e: usize = item
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad element `{item}` in partition")))?;
            max = max.max(Some(e));
        }
        Partition::parse_blocks(s, max.map_or(0, |m| m + 1))
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
