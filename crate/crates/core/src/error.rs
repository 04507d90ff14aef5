use thiserror::Error;

/// Errors produced by the library.
///
/// Most variants mirror a precondition of a single operation; the string
/// payloads carry enough context to explain a rejected input on the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0:?} is not a monic irreducible polynomial of the requested degree")]
    ReducibleModulus(Vec<u32>),
    #[error("element {0} is not primitive in this field")]
    NonPrimitive(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("the zero element has no multiplicative order")]
    ZeroElement,
    #[error("value {value} is not an element of a field with {q} elements")]
    NotAnElement { value: u64, q: u32 },
    #[error("field size {0} exceeds the supported maximum of 2^20")]
    FieldTooLarge(u64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("duplicate evaluation point at positions {0} and {1}")]
    DuplicatePoint(usize, usize),
    #[error("linear system has no solution")]
    NoSolution,

    #[error("no element of order {n} exists in GF({q})")]
    OrderMismatch { n: usize, q: u32 },
    #[error("coordinate set must be non-empty")]
    EmptySet,
    #[error("coordinate {index} is out of range for length {n}")]
    CoordinateOutOfRange { index: usize, n: usize },
    #[error("code has dimension zero")]
    ZeroDimensional,
    #[error("erasure pattern {0:?} is not recoverable")]
    Unrecoverable(Vec<usize>),
    #[error("unerased symbols are not consistent with any codeword")]
    NotACodeword,

    #[error("no repair partition found: {0}")]
    NotFound(String),
    #[error("locality profile has not been verified against this code")]
    UnverifiedProfile,
    #[error("code is not cyclic")]
    NotCyclic,
    #[error("workload too large: {0}")]
    TooLarge(String),

    #[error("parameter violation: {0}")]
    ParamViolation(String),
    #[error("mode {0} is only supported for h = 2")]
    ModeUnsupported(String),
    #[error("bad index: {0}")]
    BadIndex(String),

    #[error("{t} is not a unit modulo {modulus}")]
    NotUnit { t: u64, modulus: u64 },
    #[error("z residues modulo m do not form a permutation of Z_m")]
    NotResiduePermutation,
    #[error("permutation length {perm} does not match code length {code}")]
    LengthMismatch { perm: usize, code: usize },
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("none of the admissible (delta, r) cases holds: {0}")]
    CaseViolation(String),

    #[error("argument {0} is out of range")]
    OutOfRange(u64),
    #[error("r must be even for this check")]
    OddR,
    #[error("r must be odd for this check")]
    EvenR,
    #[error("epsilon {epsilon} exceeds the admissible maximum {max}")]
    EpsilonTooLarge { epsilon: u64, max: u64 },
    #[error("distance {d} must exceed r + delta = {min}")]
    DistanceTooSmall { d: u64, min: u64 },

    #[error("schema error: {0}")]
    SchemaError(String),
    #[error("field description does not reconstruct a valid field: {0}")]
    FieldReconstructionMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
