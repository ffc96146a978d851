use alloc::string::String;

use crate::pauli::PauliString;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("qubit {index} is out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("qubit {0} appears more than once")]
    DuplicateQubit(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{n_qubits} qubits exceeds the configured maximum of {max}")]
    TooLarge { n_qubits: usize, max: usize },
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("state is unphysical (minimum eigenvalue {0:e})")]
    Unphysical(f64),
    #[error("empty qubit selection")]
    EmptySelection,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("gate {0} entangles qubits and is not a local operation")]
    EntanglingGate(String),
    #[error("correlator {0} is missing from the table")]
    MissingCorrelator(PauliString),
    #[error("correlator {0} is not covered by any measured setting")]
    Uncovered(PauliString),
    #[error("measurement setting {0} contains an identity symbol")]
    IdentityInSetting(PauliString),
    #[error("invalid Pauli label {0:?}")]
    InvalidPauli(char),
    #[error("curve has {0} points, at least 3 are needed")]
    TooFewPoints(usize),
    #[error("branch weight {0} lies outside [0, 1]")]
    BranchOutOfRange(f64),
}

pub type Result<T> = core::result::Result<T, Error>;
