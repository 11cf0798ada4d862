use thiserror::Error;

use crate::statevec::MAX_QUBITS;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit count {0} outside 1..={MAX_QUBITS}")]
    QubitCount(usize),
    #[error("basis index {index} out of range for {n_qubits} qubits")]
    BasisIndex { index: usize, n_qubits: usize },
    #[error("qubit {qubit} out of range for a {n_qubits}-qubit state")]
    QubitIndex { qubit: usize, n_qubits: usize },
    #[error("qubit {0} listed more than once")]
    DuplicateQubit(usize),
    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },
    #[error("expected a {expected}-qubit state, got {actual}")]
    Arity { expected: usize, actual: usize },
    #[error("amplitude vector of length {0} is not a power of two")]
    BadLength(usize),
    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("non-finite amplitude")]
    NonFinite,
    #[error("zero vector cannot be normalized")]
    ZeroNorm,
    #[error("degenerate measurement basis: |a|^2 + |b|^2 = {0}")]
    DegenerateBasis(f64),
    #[error("invalid secret: |alpha|^2 + |beta|^2 = {0}")]
    InvalidSecret(f64),
    #[error("random draw {0} outside [0, 1)")]
    InvalidDraw(f64),
    #[error("measurement outcome {0} is not a basis index")]
    InvalidOutcome(usize),
    #[error("selected measurement branch has zero probability")]
    ZeroProbabilityBranch,
    #[error("expected {expected} random draws, got {actual}")]
    DrawCount { expected: usize, actual: usize },
    #[error("malformed ancilla outcome {0:?}")]
    MalformedOutcome(String),
    #[error("matrix is not unitary")]
    NotUnitary,
    #[error("syndrome {0} is outside the single-error correction table")]
    UncorrectableSyndrome(String),
}

pub type Result<T> = std::result::Result<T, Error>;
