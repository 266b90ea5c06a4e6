//! Schrödinger-picture state-vector simulator used as an independent oracle.
//!
//! Gates act on amplitudes through their fixed computational-basis action;
//! nothing here goes through descriptor evolution. Qubit `a` of `n` is bit
//! `n - a` of a basis index and bit value 1 means z-value −1.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::matrix::{Axis, Matrix, StateVector};
use crate::network::NetworkState;
use crate::observable::Observable;
use crate::scalar::{cplx, lit, real, to_f64, Scalar};
use crate::tolerance::Tolerances;

/// State vectors at every integer time of a circuit.
#[derive(Debug, Clone)]
pub struct SchrodingerRun<T> {
    pub n: usize,
    pub states: Vec<StateVector<T>>,
    pub gates: Vec<Gate<T>>,
}

impl<T: Scalar> SchrodingerRun<T> {
    pub fn state(&self, t: usize) -> &StateVector<T> {
        &self.states[t]
    }

    pub fn last(&self) -> &StateVector<T> {
        self.states.last().expect("run has an initial state")
    }
}

/// `|1, …, 1⟩`, the all-zero basis index.
pub fn initial_state<T: Scalar>(n: usize) -> StateVector<T> {
    StateVector::basis(1 << n, 0)
}

#[inline]
fn mask(n: usize, qubit: usize) -> usize {
    1 << (n - qubit)
}

/// Fixed operator `σ_axis` on `qubit`, built entry by entry.
pub fn site_pauli<T: Scalar>(n: usize, qubit: usize, axis: Axis) -> Matrix<T> {
    let m = mask(n, qubit);
    let dim = 1 << n;
    let mut out = Matrix::zeros(dim);
    for k in 0..dim {
        let bit = k & m != 0;
        match axis {
            Axis::X => out[(k ^ m, k)] = real(T::one()),
            // σ_y|0⟩ = i|1⟩, σ_y|1⟩ = −i|0⟩
            Axis::Y => out[(k ^ m, k)] = cplx(T::zero(), if bit { -T::one() } else { T::one() }),
            Axis::Z => out[(k, k)] = real(if bit { -T::one() } else { T::one() }),
        }
    }
    out
}

/// Fixed operator for an observable expression.
pub fn fixed_observable<T: Scalar>(n: usize, obs: &Observable<T>) -> Result<Matrix<T>> {
    if obs.max_qubit() > n {
        return Err(Error::BadOperands(format!("observable `{obs}` exceeds {n} qubits")));
    }
    Ok(obs.evaluate(1 << n, |q, a| site_pauli(n, q, a)))
}

/// `½(1 ± σ_axis)` on `qubit`, as a fixed operator.
pub fn fixed_projector<T: Scalar>(n: usize, qubit: usize, axis: Axis, sign: i8) -> Matrix<T> {
    let s = if sign >= 0 { T::one() } else { -T::one() };
    let half = lit::<T>(0.5);
    &Matrix::identity(1 << n).scale_real(half) + &site_pauli(n, qubit, axis).scale_real(s * half)
}

/// Apply one gate to a state vector in place.
pub fn apply_gate<T: Scalar>(n: usize, g: &Gate<T>, psi: &mut StateVector<T>, tol: &Tolerances<T>) -> Result<()> {
    g.check_operands(n)?;
    let dim = 1 << n;
    let amps = psi.amplitudes_mut();
    match g {
        Gate::Identity => {}
        Gate::Not { target } => {
            let m = mask(n, *target);
            for k in (0..dim).filter(|k| k & m == 0) {
                amps.swap(k, k | m);
            }
        }
        Gate::Hadamard { target } => {
            let m = mask(n, *target);
            let r = real(T::FRAC_1_SQRT_2());
            for k in (0..dim).filter(|k| k & m == 0) {
                let (a0, a1) = (amps[k], amps[k | m]);
                amps[k] = (a0 + a1) * r;
                amps[k | m] = (a0 - a1) * r;
            }
        }
        Gate::Cnot { control, target } => {
            let (c, m) = (mask(n, *control), mask(n, *target));
            for k in (0..dim).filter(|k| k & c != 0 && k & m == 0) {
                amps.swap(k, k | m);
            }
        }
        Gate::Ccnot { controls, target } => {
            let c = mask(n, controls[0]) | mask(n, controls[1]);
            let m = mask(n, *target);
            for k in (0..dim).filter(|k| k & c == c && k & m == 0) {
                amps.swap(k, k | m);
            }
        }
        Gate::Rz { target, theta } => {
            let m = mask(n, *target);
            let half = *theta / lit(2.0);
            let up = Complex::from_polar(T::one(), -half);
            let down = Complex::from_polar(T::one(), half);
            for (k, a) in amps.iter_mut().enumerate() {
                *a *= if k & m == 0 { up } else { down };
            }
        }
        Gate::F { m, s, alpha, beta, gamma, delta } => {
            let (mm, sm) = (mask(n, *m), mask(n, *s));
            let sign = |set: bool| if set { -T::one() } else { T::one() };
            for (k, a) in amps.iter_mut().enumerate() {
                let (zm, zs) = (sign(k & mm != 0), sign(k & sm != 0));
                let ev = *alpha + *beta * zm + *gamma * zs + *delta * zm * zs;
                if (ev.abs() - T::one()).abs() > tol.unitary {
                    return Err(Error::NonUnitary { residual: to_f64((ev.abs() - T::one()).abs()) });
                }
                *a *= real(ev);
            }
        }
        Gate::Custom(c) => {
            // A custom gate is a function of the descriptors; at t = 0 those
            // are the fixed single-site operators.
            let fresh = NetworkState::<T>::with_tolerances(n, *tol)?;
            let u = (c.builder)(fresh.descriptors());
            if u.dim() != dim {
                return Err(Error::DimMismatch { expected: dim, found: u.dim() });
            }
            u.check_unitary(tol.unitary)?;
            *psi = u.apply(psi);
        }
    }
    Ok(())
}

/// Evolve `initial` through `gates`, one gate per time step.
pub fn evolve<T: Scalar>(
    n: usize,
    initial: &StateVector<T>,
    gates: &[Gate<T>],
    tol: &Tolerances<T>,
) -> Result<SchrodingerRun<T>> {
    if initial.dim() != 1 << n {
        return Err(Error::DimMismatch { expected: 1 << n, found: initial.dim() });
    }
    let norm0 = initial.norm();
    if (norm0 - T::one()).abs() > tol.norm {
        return Err(Error::PreconditionFailed(format!(
            "initial state has norm {}",
            to_f64(norm0)
        )));
    }
    let mut states = Vec::with_capacity(gates.len() + 1);
    states.push(initial.clone());
    let mut psi = initial.clone();
    for g in gates {
        apply_gate(n, g, &mut psi, tol)?;
        let drift = (psi.norm() - T::one()).abs();
        if drift > tol.norm {
            return Err(Error::NonUnitary { residual: to_f64(drift) });
        }
        states.push(psi.clone());
    }
    Ok(SchrodingerRun { n, states, gates: gates.to_vec() })
}

/// `Pψ / |Pψ|`.
pub fn schrodinger_relative_state<T: Scalar>(
    psi: &StateVector<T>,
    p: &Matrix<T>,
    tol: &Tolerances<T>,
) -> Result<StateVector<T>> {
    let v = p.apply(psi);
    let norm = v.norm();
    if norm * norm <= tol.weight {
        return Err(Error::ZeroWeightBranch { weight: to_f64(norm * norm) });
    }
    Ok(v.scale(real(T::one() / norm)))
}

/// `|Pψ|²`.
pub fn branch_weight<T: Scalar>(psi: &StateVector<T>, p: &Matrix<T>) -> T {
    let n = p.apply(psi).norm();
    n * n
}

#[derive(Debug, Clone, PartialEq)]
pub struct PictureResidual<T> {
    pub time: usize,
    pub observable: usize,
    pub heisenberg: T,
    pub schrodinger: T,
    pub residual: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation<T> {
    pub entries: Vec<PictureResidual<T>>,
    pub max_residual: T,
}

impl<T: Scalar> CrossValidation<T> {
    pub fn within(&self, tol: T) -> bool {
        self.max_residual <= tol
    }
}

/// Compare `<Ψ|A(t)|Ψ>` on the Heisenberg timeline with `<Ψ(t)|A(0)|Ψ(t)>`
/// from the run, for every time and observable.
pub fn cross_validate<T: Scalar>(
    run: &SchrodingerRun<T>,
    timeline: &[NetworkState<T>],
    observables: &[Observable<T>],
) -> Result<CrossValidation<T>> {
    if run.states.len() != timeline.len() {
        return Err(Error::CircuitMismatch(format!(
            "oracle has {} time steps, network timeline has {}",
            run.states.len(),
            timeline.len()
        )));
    }
    if let Some(s) = timeline.iter().find(|s| s.n() != run.n) {
        return Err(Error::CircuitMismatch(format!(
            "oracle has {} qubits, network has {}",
            run.n,
            s.n()
        )));
    }
    let fixed: Vec<Matrix<T>> =
        observables.iter().map(|o| fixed_observable(run.n, o)).collect::<Result<_>>()?;
    let mut entries = Vec::new();
    let mut worst = T::zero();
    for (t, (psi, s)) in run.states.iter().zip(timeline).enumerate() {
        for (i, (obs, a0)) in observables.iter().zip(&fixed).enumerate() {
            let h = s.expectation(&obs.at(s)?)?;
            let sch = a0.expectation(psi);
            let residual = (h - sch).norm();
            worst = worst.max(residual);
            entries.push(PictureResidual {
                time: t,
                observable: i,
                heisenberg: h.re,
                schrodinger: sch.re,
                residual,
            });
        }
    }
    Ok(CrossValidation { entries, max_residual: worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::embed_pauli;

    type S = StateVector<f64>;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    #[test]
    fn site_paulis_match_kronecker_embedding() {
        for n in 1..=3 {
            for q in 1..=n {
                let k = embed_pauli::<f64>(q, n);
                for a in Axis::ALL {
                    assert_eq!(site_pauli::<f64>(n, q, a), k[a.index()]);
                }
            }
        }
    }

    #[test]
    fn measurement_circuit_gives_bell_state() {
        let run = evolve(2, &initial_state(2), &[Gate::h(1), Gate::cnot(1, 2)], &tol()).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let expected = S::new(vec![real(r), real(0.0), real(0.0), real(r)]);
        assert!(run.last().dist_up_to_phase(&expected) < 1e-15);
    }

    #[test]
    fn empty_circuit_and_not() {
        let run = evolve(3, &initial_state(3), &[], &tol()).unwrap();
        assert_eq!(run.states.len(), 1);
        assert_eq!(*run.last(), initial_state::<f64>(3));
        let run = evolve(3, &initial_state(3), &[Gate::not(2)], &tol()).unwrap();
        assert_eq!(*run.last(), S::basis(8, 0b010));
    }

    #[test]
    fn relative_states_of_bell() {
        let run = evolve(2, &initial_state(2), &[Gate::h(1), Gate::cnot(1, 2)], &tol()).unwrap();
        let psi = run.last();
        let up = schrodinger_relative_state(psi, &fixed_projector(2, 1, Axis::Z, 1), &tol()).unwrap();
        assert!(up.dist_up_to_phase(&S::basis(4, 0)) < 1e-15);
        let down = schrodinger_relative_state(psi, &fixed_projector(2, 1, Axis::Z, -1), &tol()).unwrap();
        assert!(down.dist_up_to_phase(&S::basis(4, 3)) < 1e-15);
        let same = schrodinger_relative_state(psi, &Matrix::identity(4), &tol()).unwrap();
        assert!(same.dist(psi) < 1e-15);
        let fresh = initial_state::<f64>(2);
        assert!(matches!(
            schrodinger_relative_state(&fresh, &fixed_projector(2, 1, Axis::Z, -1), &tol()),
            Err(Error::ZeroWeightBranch { .. })
        ));
    }

    #[test]
    fn rejects_bad_f_and_unnormalised_input() {
        let g = Gate::F { m: 1, s: 2, alpha: 0.5, beta: 0.5, gamma: 0.5, delta: 0.5 };
        assert!(matches!(evolve(2, &initial_state(2), &[g], &tol()), Err(Error::NonUnitary { .. })));
        let v = S::new(vec![real(1.0), real(1.0)]);
        assert!(evolve(1, &v, &[], &tol()).is_err());
    }

    #[test]
    fn cross_validation_mismatch() {
        let run = evolve(2, &initial_state(2), &[Gate::h(1)], &tol()).unwrap();
        let timeline = vec![NetworkState::<f64>::new(2).unwrap()];
        assert!(matches!(
            cross_validate(&run, &timeline, &[]),
            Err(Error::CircuitMismatch(_))
        ));
    }
}
