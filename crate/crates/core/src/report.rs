//! Whole-algebra reports and Hasse diagrams.

use std::time::Instant;

use serde::Serialize;

use crate::affine::{difference_term, module_reconstruct, AffineRepresentation};
use crate::algebra::FiniteAlgebra;
use crate::closure::DEFAULT_CAP;
use crate::commutator::{center, commutator_tc, iterated_commutator};
use crate::conditions::{find_chain, ChainKind, SearchOutcome, TermChain, DEFAULT_CAP3, DEFAULT_CAP4};
use crate::error::{Error, Result};
use crate::lattice::{con_all, lattice_properties, CongruenceLattice};
use crate::partition::Partition;

/// Limits on generated sets: `closure` for congruence lattices and
/// `M(α, β)`, `free3`/`free4` for term searches in ternary and quaternary
/// free algebras.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Caps {
    pub closure: usize,
    pub free3: usize,
    pub free4: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            closure: DEFAULT_CAP,
            free3: DEFAULT_CAP3,
            free4: DEFAULT_CAP4,
        }
    }
}

impl Caps {
    pub fn uniform(cap: usize) -> Self {
        Caps {
            closure: cap,
            free3: cap,
            free4: cap,
        }
    }

    pub fn search(&self, kind: ChainKind) -> usize {
        if kind == ChainKind::Day {
            self.free4
        } else {
            self.free3
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OperationSummary {
    pub symbol: String,
    pub arity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlgebraSummary {
    pub name: String,
    pub size: usize,
    pub operations: Vec<OperationSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceSummary {
    pub count: usize,
    pub list: Vec<String>,
    /// Hasse edges as `(lower, upper)` indices into `list`.
    pub covers: Vec<(usize, usize)>,
    pub modular: bool,
    pub distributive: bool,
    pub m3_01: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainSummary {
    pub status: &'static str,
    pub length: Option<usize>,
    pub terms: Option<Vec<String>>,
    /// Elements generated before the cap stopped an undecided search.
    pub elements: Option<usize>,
}

impl From<&SearchOutcome<TermChain>> for ChainSummary {
    fn from(o: &SearchOutcome<TermChain>) -> Self {
        ChainSummary {
            status: o.label(),
            length: o.found().map(TermChain::length),
            terms: o.found().map(|c| c.terms.iter().map(|t| t.to_string()).collect()),
            elements: match o {
                SearchOutcome::Undecided { elements } => Some(*elements),
                _ => None,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermSummary {
    pub maltsev: ChainSummary,
    pub jonsson: ChainSummary,
    pub day: ChainSummary,
    pub gumm: ChainSummary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Metadata {
    pub caps: Caps,
    /// Wall-clock time, only when requested, so that reports stay
    /// reproducible by default.
    pub elapsed_ms: Option<u128>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub algebra: AlgebraSummary,
    pub congruences: CongruenceSummary,
    /// `commutators[i][j] = [θ_i, θ_j]` by the term condition.
    pub commutators: Vec<Vec<String>>,
    pub center: String,
    pub abelian: bool,
    pub derived_series: Vec<String>,
    pub solvable_degree: Option<usize>,
    pub terms: TermSummary,
    pub difference_term: Option<String>,
    pub affine: Option<AffineRepresentation>,
    pub affine_error: Option<String>,
    pub metadata: Metadata,
}

pub fn congruence_summary(lat: &CongruenceLattice) -> CongruenceSummary {
    let props = lattice_properties(lat);
    CongruenceSummary {
        count: lat.len(),
        list: lat.elements().iter().map(Partition::to_string).collect(),
        covers: lat.covers(),
        modular: props.modular,
        distributive: props.distributive,
        m3_01: props.m3_01.map(|t| t.iter().map(|&i| lat.get(i).to_string()).collect()),
    }
}

pub fn build_report(alg: &FiniteAlgebra, caps: Caps, timing: bool) -> Result<Report> {
    let start = Instant::now();
    let n = alg.size;
    let lat = con_all(alg, caps.closure)?;
    let mut commutators = Vec::with_capacity(lat.len());
    for a in lat.elements() {
        let mut row = Vec::with_capacity(lat.len());
        for b in lat.elements() {
            row.push(commutator_tc(alg, a, b, caps.closure)?.to_string());
        }
        commutators.push(row);
    }
    let one = Partition::full(n);
    let series = iterated_commutator(alg, &one, lat.len(), caps.closure)?;
    let abelian = series.solvable_degree.is_some_and(|d| d <= 1);
    let outcomes: Vec<SearchOutcome<TermChain>> =
        [ChainKind::Maltsev, ChainKind::Jonsson, ChainKind::Day, ChainKind::Gumm]
            .into_iter()
            .map(|k| find_chain(alg, k, caps.search(k)))
            .collect::<Result<_>>()?;
    let difference = match outcomes[2].found() {
        Some(day) => Some(difference_term(alg, day)?.to_string()),
        None => None,
    };
    let (affine, affine_error) = if abelian {
        match module_reconstruct(alg, 0, caps.closure) {
            Ok(rep) => (Some(rep), None),
            Err(e @ Error::NotAffineEligible(_)) => (None, Some(e.to_string())),
            Err(e) => return Err(e),
        }
    } else {
        (None, Some("the algebra is not abelian".to_string()))
    };
    Ok(Report {
        algebra: AlgebraSummary {
            name: alg.name.clone(),
            size: n,
            operations: alg
                .operations
                .iter()
                .map(|o| OperationSummary {
                    symbol: o.symbol.clone(),
                    arity: o.arity,
                })
                .collect(),
        },
        congruences: congruence_summary(&lat),
        commutators,
        center: center(alg, caps.closure)?.to_string(),
        abelian,
        derived_series: series.series.iter().map(Partition::to_string).collect(),
        solvable_degree: series.solvable_degree,
        terms: TermSummary {
            maltsev: (&outcomes[0]).into(),
            jonsson: (&outcomes[1]).into(),
            day: (&outcomes[2]).into(),
            gumm: (&outcomes[3]).into(),
        },
        difference_term: difference,
        affine,
        affine_error,
        metadata: Metadata {
            caps,
            elapsed_ms: timing.then(|| start.elapsed().as_millis()),
        },
    })
}

/// The Hasse diagram of `Con(A)` in Graphviz DOT: one node per
/// congruence labelled by its blocks, one edge per covering pair.
pub fn lattice_dot(lat: &CongruenceLattice, name: &str) -> String {
    let mut out = format!(
        "digraph {} {{\n  rankdir=BT;\n",
        serde_json::to_string(&format!("Con({name})")).expect("string")
    );
    for (i, p) in lat.elements().iter().enumerate() {
        out.push_str(&format!("  n{i} [label=\"{p}\"];\n"));
    }
    for (a, b) in lat.covers() {
        out.push_str(&format!("  n{a} -> n{b};\n"));
    }
    out.push_str("}\n");
    out
}
