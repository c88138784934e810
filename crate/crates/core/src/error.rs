use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LmeError {
    #[error("qubit count must be at least 1")]
    NoQubits,
    #[error("qubit index {site} out of range for {n} qubits")]
    SiteOutOfRange { site: usize, n: usize },
    #[error("operator is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("amplitude vector has length {len}, expected {expected}")]
    LengthMismatch { len: usize, expected: usize },
    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("invalid qubit subset: {0}")]
    InvalidSubset(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("malformed adjacency matrix: {0}")]
    MalformedAdjacency(String),
    #[error("malformed phase table: {0}")]
    MalformedTable(String),
    #[error("malformed phase circuit: {0}")]
    MalformedCircuit(String),
    #[error("state is not flat (max modulus deviation {max_deviation:.3e})")]
    NotFlat { max_deviation: f64 },
    #[error("{qubits} qubits exceeds the dense simulation limit of {limit}")]
    SizeLimit { qubits: usize, limit: usize },
    #[error("expected an even qubit count, got {0}")]
    OddQubitCount(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot parse input: {0}")]
    Parse(String),
    #[error("internal consistency check failed: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, LmeError>;
