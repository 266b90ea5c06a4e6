//! Heisenberg-picture simulation of quantum computational networks.
//!
//! Each qubit is carried as a descriptor, a triple of observables that
//! evolves by conjugation with gate unitaries built from the current
//! descriptors, against one fixed Heisenberg state. On top of that the crate
//! builds relative (branch) descriptors from record projectors, classifies
//! gates by whether they keep branches autonomous, decomposes binary
//! registers into ensembles of classical computations, and checks everything
//! against an independent Schrödinger state-vector simulator.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`.

pub mod classical;
pub mod error;
pub mod gate;
pub mod matrix;
pub mod network;
pub mod observable;
pub mod oracle;
pub mod relative;
pub mod scalar;
pub mod selftest;
pub mod spectral;
pub mod tolerance;

pub use classical::{
    classical_branches, compile_classical, product_sharpness, register_descriptor, simulate_bits,
    verify_classical_step, BranchStep, ClassicalBranch, ClassicalFunction, ClassicalStepReport,
    RegisterDescriptor,
};
pub use error::{Error, ErrorClass, Result};
pub use gate::{build_gate_unitary, check_f_coefficients, CustomGate, Gate, UnitaryBuilder};
pub use matrix::{
    conjugate, embed, embed_pauli, pauli_algebra_residual, pauli_projector, tensor, Axis, Matrix,
    StateVector,
};
pub use network::{Descriptor, Entanglement, NetworkState, RecordKey, RecordSnapshot, MAX_QUBITS};
pub use observable::{Observable, Term};
pub use oracle::{cross_validate, evolve, schrodinger_relative_state, CrossValidation, SchrodingerRun};
pub use relative::{
    autonomy_check, branch_evolution_factor, branch_factor, evolve_in_branch, foliate, make_pvm,
    pvm_from_involution, record_check, relative_descriptor, relative_expectation,
    relative_heisenberg_state, sharp_in, Autonomy, FoliationReport, RecordTag, RelativeDescriptor,
    RelativeFrame,
};
pub use scalar::Scalar;
pub use selftest::{run_all, run_criterion, CriterionResult, CRITERIA};
pub use spectral::{spectral, SpectralDecomposition};
pub use tolerance::Tolerances;

pub type C64 = num_complex::Complex<f64>;
pub type CMatrix = Matrix<f64>;
pub type State = StateVector<f64>;
pub type Network = NetworkState<f64>;
pub type Descriptor64 = Descriptor<f64>;
pub type Gate64 = Gate<f64>;
pub type Tol = Tolerances<f64>;
