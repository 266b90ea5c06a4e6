//! Gates as characteristic functions of the current descriptors.
//!
//! Every gate's unitary is rebuilt from the descriptors at the time it acts,
//! so the same gate has a different matrix at different times.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix::{pauli_projector_unchecked, Axis, Matrix};
use crate::network::{Descriptor, NetworkState};
use crate::scalar::{cplx, lit, to_f64, Scalar};

/// Builds a unitary from the current descriptors (index `a - 1` holds qubit `a`).
pub type UnitaryBuilder<T> = Arc<dyn Fn(&[Descriptor<T>]) -> Matrix<T> + Send + Sync>;

/// A user-supplied gate.
#[derive(Clone)]
pub struct CustomGate<T> {
    pub name: String,
    pub operands: Vec<usize>,
    pub builder: UnitaryBuilder<T>,
}

impl<T> fmt::Debug for CustomGate<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomGate")
            .field("name", &self.name)
            .field("operands", &self.operands)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum Gate<T> {
    /// Unit wire.
    Identity,
    Not { target: usize },
    Hadamard { target: usize },
    /// Flips `target` when `control` has z-value −1.
    Cnot { control: usize, target: usize },
    Rz { target: usize, theta: T },
    /// `α + β q_mz + γ q_sz + δ q_mz q_sz`, real coefficients.
    F { m: usize, s: usize, alpha: T, beta: T, gamma: T, delta: T },
    /// Flips `target` when both controls have z-value −1.
    Ccnot { controls: [usize; 2], target: usize },
    Custom(CustomGate<T>),
}

impl<T: Scalar> Gate<T> {
    pub fn not(target: usize) -> Self {
        Gate::Not { target }
    }

    pub fn h(target: usize) -> Self {
        Gate::Hadamard { target }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn rz(target: usize, theta: T) -> Self {
        Gate::Rz { target, theta }
    }

    pub fn ccnot(c1: usize, c2: usize, target: usize) -> Self {
        Gate::Ccnot { controls: [c1, c2], target }
    }

    /// F gate with validated coefficients.
    pub fn f(m: usize, s: usize, coeffs: [T; 4], tol_unitary: T) -> Result<Self> {
        let [alpha, beta, gamma, delta] = coeffs;
        check_f_coefficients(alpha, beta, gamma, delta, tol_unitary)?;
        Ok(Gate::F { m, s, alpha, beta, gamma, delta })
    }

    /// Rotation by `angle` about the unit axis `n` of qubit `target`:
    /// `cos(angle/2) − i sin(angle/2) (n · q_target)`.
    pub fn rotation(target: usize, n: [T; 3], angle: T) -> Self {
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        let n = n.map(|c| c / len);
        let half = angle / lit(2.0);
        let (c, s) = (half.cos(), half.sin());
        Gate::Custom(CustomGate {
            name: "ROT".to_string(),
            operands: vec![target],
            builder: Arc::new(move |d: &[Descriptor<T>]| {
                let q = &d[target - 1];
                let dim = q.x().dim();
                let axis = Axis::ALL
                    .iter()
                    .fold(Matrix::zeros(dim), |acc, &a| &acc + &q.component(a).scale_real(n[a.index()]));
                &Matrix::identity(dim).scale_real(c) + &axis.scale(cplx(T::zero(), -s))
            }),
        })
    }

    pub fn name(&self) -> &str {
        match self {
            Gate::Identity => "I",
            Gate::Not { .. } => "NOT",
            Gate::Hadamard { .. } => "H",
            Gate::Cnot { .. } => "CNOT",
            Gate::Rz { .. } => "RZ",
            Gate::F { .. } => "F",
            Gate::Ccnot { .. } => "CCNOT",
            Gate::Custom(c) => &c.name,
        }
    }

    /// Operand qubits, controls before target.
    pub fn operands(&self) -> Vec<usize> {
        match self {
            Gate::Identity => vec![],
            Gate::Not { target } | Gate::Hadamard { target } | Gate::Rz { target, .. } => {
                vec![*target]
            }
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::F { m, s, .. } => vec![*m, *s],
            Gate::Ccnot { controls, target } => vec![controls[0], controls[1], *target],
            Gate::Custom(c) => c.operands.clone(),
        }
    }

    pub fn check_operands(&self, n: usize) -> Result<()> {
        let ops = self.operands();
        for (i, &a) in ops.iter().enumerate() {
            if a < 1 || a > n {
                return Err(Error::BadOperands(format!(
                    "{} operand {a} outside 1..={n}",
                    self.name()
                )));
            }
            if ops[..i].contains(&a) {
                return Err(Error::BadOperands(format!(
                    "{} operand {a} repeated",
                    self.name()
                )));
            }
        }
        Ok(())
    }
}

/// The four eigenvalues `α + βm + γs + δms` (m, s = ±1) of an F gate must
/// have unit modulus.
pub fn check_f_coefficients<T: Scalar>(alpha: T, beta: T, gamma: T, delta: T, tol: T) -> Result<()> {
    let coeffs = [alpha, beta, gamma, delta];
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidGate("F coefficients must be finite".into()));
    }
    for m in [T::one(), -T::one()] {
        for s in [T::one(), -T::one()] {
            let ev = alpha + beta * m + gamma * s + delta * m * s;
            if (ev.abs() - T::one()).abs() > tol {
                return Err(Error::InvalidGate(format!(
                    "F eigenvalue for (m, s) = ({}, {}) is {}, not of unit modulus",
                    to_f64(m),
                    to_f64(s),
                    to_f64(ev)
                )));
            }
        }
    }
    Ok(())
}

/// Evaluate the gate's characteristic function on the current descriptors of
/// `state`, checking operands and unitarity.
pub fn build_gate_unitary<T: Scalar>(g: &Gate<T>, state: &NetworkState<T>) -> Result<Matrix<T>> {
    g.check_operands(state.n())?;
    let u = unitary_from_descriptors(g, state.descriptors(), state.dim(), state.tolerances().unitary)?;
    u.check_unitary(state.tolerances().unitary)?;
    Ok(u)
}

pub(crate) fn unitary_from_descriptors<T: Scalar>(
    g: &Gate<T>,
    d: &[Descriptor<T>],
    dim: usize,
    tol_unitary: T,
) -> Result<Matrix<T>> {
    let one = Matrix::identity(dim);
    let q = |a: usize| &d[a - 1];
    let u = match g {
        Gate::Identity => one,
        Gate::Not { target } => q(*target).x().clone(),
        Gate::Hadamard { target } => {
            let t = q(*target);
            (t.x() + t.z()).scale_real(T::one() / lit::<T>(2.0).sqrt())
        }
        Gate::Cnot { control, target } => {
            let c = q(*control).z();
            let p_plus = pauli_projector_unchecked(c, 1);
            let p_minus = pauli_projector_unchecked(c, -1);
            &p_plus + &(q(*target).x() * &p_minus)
        }
        Gate::Rz { target, theta } => {
            let half = *theta / lit(2.0);
            &one.scale_real(half.cos()) + &q(*target).z().scale(cplx(T::zero(), -half.sin()))
        }
        Gate::F { m, s, alpha, beta, gamma, delta } => {
            check_f_coefficients(*alpha, *beta, *gamma, *delta, tol_unitary)?;
            let (mz, sz) = (q(*m).z(), q(*s).z());
            let terms = [
                one.scale_real(*alpha),
                mz.scale_real(*beta),
                sz.scale_real(*gamma),
                (mz * sz).scale_real(*delta),
            ];
            terms.iter().fold(Matrix::zeros(dim), |acc, t| &acc + t)
        }
        Gate::Ccnot { controls, target } => {
            let p1 = pauli_projector_unchecked(q(controls[0]).z(), -1);
            let p2 = pauli_projector_unchecked(q(controls[1]).z(), -1);
            let both = &p1 * &p2;
            let flip = q(*target).x() * &both;
            &(&one - &both) + &flip
        }
        Gate::Custom(c) => {
            let u = (c.builder)(d);
            if u.dim() != dim {
                return Err(Error::DimMismatch { expected: dim, found: u.dim() });
            }
            u
        }
    };
    Ok(u)
}
