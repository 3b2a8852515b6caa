//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("pauli string length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid pauli character {0:?} (expected one of I, X, Y, Z)")]
    InvalidPauliChar(char),

    #[error("hamiltonian must contain at least one term")]
    EmptyHamiltonian,

    #[error("term {term:?} has length {len}, expected {expected}")]
    TermLength {
        term: String,
        len: usize,
        expected: usize,
    },

    #[error("qubit count must be positive")]
    ZeroQubits,

    #[error("basis {basis:?} does not cover term {term:?}")]
    BasisDoesNotCover { basis: String, term: String },

    #[error("pmf qubit labels {got:?} do not match expected {expected:?}")]
    LabelMismatch {
        expected: Vec<usize>,
        got: Vec<usize>,
    },

    #[error("local pmf qubits {local:?} are not contained in global qubits {global:?}")]
    LocalNotInGlobal {
        local: Vec<usize>,
        global: Vec<usize>,
    },

    #[error("subset size {m} is invalid for {qubits} qubits")]
    BadSubsetSize { m: usize, qubits: usize },

    #[error("expected {expected} ansatz parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },

    #[error("qubit count {0} exceeds the dense-simulation cap of {1}")]
    QubitCapExceeded(usize, usize),

    #[error("probabilities must be non-negative and sum to 1 (sum was {0})")]
    InvalidPmf(f64),

    #[error("fraction {0} must lie in [0, 1]")]
    BadFraction(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid hamiltonian data: {0}")]
    InvalidHamiltonian(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
