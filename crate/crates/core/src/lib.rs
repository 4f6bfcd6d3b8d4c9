//! Congruence lattices, commutators, Mal'tsev-condition terms and affine
//! representations for finite algebras given by operation tables.

pub mod affine;
pub mod algebra;
pub mod closure;
pub mod commutator;
pub mod conditions;
pub mod congruence;
pub mod corpus;
pub mod error;
pub mod io;
pub mod lattice;
pub mod partition;
pub mod report;
pub mod term;

pub use algebra::{FiniteAlgebra, Operation};
pub use closure::{closure_in_power, unary_polynomial_clone, Closure, ClosureStatus, Provenance};
pub use error::{Error, Result};
pub use partition::Partition;
pub use term::{verify_identity, Term};
