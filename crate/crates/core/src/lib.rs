//! Hybrid stabilizer / tensor-network simulation of quantum circuits.
//!
//! A state is carried as a stabilizer frame (tableau) paired with a matrix
//! product state of coefficients over that frame. Clifford gates update only
//! the tableau; non-Clifford gates become two-term rotations on the MPS;
//! measurements project both halves in lockstep. The `mast` module adds the
//! gadgetized execution mode in which every non-Clifford gate is replaced by
//! a magic-state injection whose ancilla projection is deferred to the end of
//! the circuit.

pub mod bench;
pub mod circuits;
pub mod dense;
pub mod mast;
pub mod mps;
pub mod pauli;
pub mod stn;
pub mod tableau;

pub use circuits::{Circuit, Gate};
pub use mast::{run_mast, run_stn, ProjectionSchedule, RunResult};
pub use mps::{BondTrace, MatrixProductState, TruncationPolicy};
pub use pauli::{Pauli, PauliString, Phase};
pub use stn::StnState;
pub use tableau::{CliffordGate, RowKind, RowSelector, StabilizerTableau};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("operand dimensions do not match: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("qubit count must be at least 1")]
    EmptyRegister,
    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("gate operands must be distinct")]
    DuplicateQubits,
    #[error("tableau rows are not a valid stabilizer/destabilizer set: {0}")]
    InvalidTableau(&'static str),
    #[error("row decomposition failed to reconstruct the operator")]
    ReconstructionMismatch,
    #[error("observable must be a Hermitian Pauli (phase ±1)")]
    NonHermitian,
    #[error("rotation axis must act on at least one qubit")]
    IdentityAxis,
    #[error("operator matrix is not unitary")]
    NonUnitary,
    #[error("forced outcome contradicts a deterministic measurement")]
    OutcomeContradiction,
    #[error("forced measurement branch has probability below 1e-12")]
    ImpossibleOutcome,
    #[error("decomposition is stale: the tableau changed since it was built")]
    StaleDecomposition,
    #[error("decompositions with more than two terms are not supported")]
    MultiTermUnsupported,
    #[error("dense oracle supports at most {max} qubits, requested {requested}")]
    SizeLimit { requested: usize, max: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("circuit contains an unsynthesized clifford block")]
    UnsynthesizedBlock,
    #[error("unsupported gate for this operation: {0}")]
    UnsupportedGate(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn check_qubit(index: usize, n: usize) -> Result<()> {
        if index >= n {
            Err(Error::QubitOutOfRange { index, n })
        } else {
            Ok(())
        }
    }
}
