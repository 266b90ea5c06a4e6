use thiserror::Error;

/// Broad failure classes, used by front ends to pick exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed input: bad operands, subsets, sizes, gate parameters.
    Input,
    /// A numerical tolerance was exceeded (non-unitary, non-Hermitian, ...).
    Numerical,
    /// A physical precondition does not hold (zero-weight branch, unentangled foliation, ...).
    Physics,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not unitary (residual {residual:.3e})")]
    NonUnitary { residual: f64 },
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("observable is not an involution (|q^2 - 1| = {residual:.3e})")]
    NotInvolution { residual: f64 },
    #[error("network of {n} qubits exceeds the supported limit of {max}")]
    SizeLimit { n: usize, max: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("bad operands: {0}")]
    BadOperands(String),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("frame projector does not commute with descriptors (commutator {residual:.3e})")]
    NonCommuting { residual: f64 },
    #[error("branch has zero weight ({weight:.3e})")]
    ZeroWeightBranch { weight: f64 },
    #[error("gate kind {0} has no closed-form branch factor")]
    WrongGateKind(String),
    #[error("bad qubit subset: {0}")]
    BadSubset(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("classical function is not reversible: {0}")]
    NotReversible(String),
    #[error("need {needed} ancilla qubits, {available} supplied")]
    InsufficientAncillas { needed: usize, available: usize },
    #[error("branch {branch} register is not sharp ({stage}, residual {residual:.3e})")]
    BranchNotSharp {
        branch: usize,
        stage: &'static str,
        residual: f64,
    },
    #[error("circuit mismatch: {0}")]
    CircuitMismatch(String),
    #[error("spectral decomposition did not converge")]
    NoConvergence,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            NonUnitary { .. } | NotHermitian { .. } | NotInvolution { .. } | NoConvergence => {
                ErrorClass::Numerical
            }
            NonCommuting { .. }
            | ZeroWeightBranch { .. }
            | PreconditionFailed(_)
            | BranchNotSharp { .. } => ErrorClass::Physics,
            SizeLimit { .. }
            | DimMismatch { .. }
            | BadOperands(_)
            | InvalidGate(_)
            | WrongGateKind(_)
            | BadSubset(_)
            | NotReversible(_)
            | InsufficientAncillas { .. }
            | CircuitMismatch(_) => ErrorClass::Input,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
