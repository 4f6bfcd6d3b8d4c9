use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("algebra must have at least one element")]
    EmptyUniverse,
    #[error("algebra size {0} exceeds the supported maximum of 65536")]
    UniverseTooLarge(usize),
    #[error("operation `{symbol}`: table has length {actual}, expected {expected}")]
    TableLength {
        symbol: String,
        expected: usize,
        actual: usize,
    },
    #[error("operation `{symbol}`: entry {value} out of range at flat index {index}")]
    EntryOutOfRange { symbol: String, index: usize, value: usize },
    #[error("invalid operation symbol `{0}`")]
    InvalidSymbol(String),
    #[error("duplicate operation symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("unknown operation symbol `{0}`")]
    UnknownSymbol(String),
    #[error("operation `{symbol}` has arity {expected} but was given {actual} arguments")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        actual: usize,
    },
    #[error("variable x{index} is not covered by an assignment of length {len}")]
    UnassignedVariable { index: usize, len: usize },
    #[error("element {element} out of range for universe of size {size}")]
    ElementOutOfRange { element: usize, size: usize },
    #[error("partition has length {actual}, expected {expected}")]
    PartitionSize { expected: usize, actual: usize },
    #[error("relation is not compatible with operation `{symbol}`")]
    NotCompatible { symbol: String },
    #[error("algebras have different signatures")]
    SignatureMismatch,
    #[error("map is not a homomorphism: fails at operation `{symbol}`")]
    NotHomomorphism { symbol: String },
    #[error("map is not surjective: element {0} has no preimage")]
    NotSurjective(usize),
    #[error("elements {0} and {1} are not related by the generated congruence")]
    NotRelated(usize, usize),
    #[error("shifting premise violated: {0}")]
    ShiftingPremise(&'static str),
    #[error("closure exceeded the cap of {cap} elements")]
    CapExceeded { cap: usize },
    #[error("modularity gate: {0}")]
    NotModular(String),
    #[error("ternary operation is not a ternary Abelian group: {0}")]
    NotTernaryGroup(String),
    #[error("algebra is not affine-eligible: {0}")]
    NotAffineEligible(String),
    #[error("congruence is not Abelian")]
    NotAbelianCongruence,
    #[error("affine decomposition failed: {0}")]
    Decomposition(String),
    #[error("term chain is not of the expected kind: {0}")]
    ChainKind(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown builtin algebra `{0}`")]
    UnknownBuiltin(String),
    #[error("i/o error: {0}")]
    Io(String),
}
