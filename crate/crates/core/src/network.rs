//! Descriptor network: qubit descriptors evolving under gates against a fixed
//! Heisenberg state.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::gate::{build_gate_unitary, Gate};
use crate::matrix::{conjugate_unchecked, embed_pauli, polish_unitary, pauli_algebra_residual, Axis, Matrix, StateVector};
use crate::scalar::Scalar;
use crate::tolerance::Tolerances;

/// Largest supported network.
pub const MAX_QUBITS: usize = 10;

/// The `(x, y, z)` observables of one qubit at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct Descriptor<T> {
    pub qubit: usize,
    pub time: usize,
    components: [Matrix<T>; 3],
}

impl<T: Scalar> Descriptor<T> {
    pub fn new(qubit: usize, time: usize, components: [Matrix<T>; 3]) -> Self {
        Descriptor { qubit, time, components }
    }

    pub fn x(&self) -> &Matrix<T> {
        &self.components[0]
    }

    pub fn y(&self) -> &Matrix<T> {
        &self.components[1]
    }

    pub fn z(&self) -> &Matrix<T> {
        &self.components[2]
    }

    pub fn component(&self, axis: Axis) -> &Matrix<T> {
        &self.components[axis.index()]
    }

    pub fn components(&self) -> &[Matrix<T>; 3] {
        &self.components
    }

    /// Violation of the single-qubit Pauli algebra.
    pub fn algebra_residual(&self) -> T {
        pauli_algebra_residual(&self.components, &Matrix::identity(self.x().dim()))
    }

    /// Largest entry change of any component relative to `other`.
    pub fn dist(&self, other: &Self) -> T {
        self.components
            .iter()
            .zip(&other.components)
            .fold(T::zero(), |m, (a, b)| m.max(a.dist(b)))
    }
}

/// Identifies a record snapshot: component `axis` of `qubit` at `time`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RecordKey {
    pub qubit: usize,
    pub axis: Axis,
    pub time: usize,
}

impl std::fmt::Display for RecordKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "q{}{}@{}", self.qubit, self.axis, self.time)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordSnapshot<T> {
    pub key: RecordKey,
    pub matrix: Matrix<T>,
}

/// Result of the pairwise entanglement test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entanglement<T> {
    pub entangled: bool,
    /// Component pair with the largest `|<q_ai q_bj> − <q_ai><q_bj>|`.
    pub witness: (Axis, Axis),
    pub discrepancy: T,
}

/// An `n`-qubit network at integer time `t`.
#[derive(Debug, Clone)]
pub struct NetworkState<T> {
    n: usize,
    t: usize,
    descriptors: Vec<Descriptor<T>>,
    heisenberg: StateVector<T>,
    tol: Tolerances<T>,
    records: Vec<RecordSnapshot<T>>,
}

impl<T: Scalar> NetworkState<T> {
    /// Fresh network with default tolerances.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_tolerances(n, Tolerances::default())
    }

    /// Descriptors start as `1^{a-1} ⊗ σ ⊗ 1^{n-a}`; the Heisenberg state is
    /// the first standard basis vector, the joint +1 eigenvector of every `q_az`.
    pub fn with_tolerances(n: usize, tol: Tolerances<T>) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadOperands("network needs at least one qubit".into()));
        }
        if n > MAX_QUBITS {
            return Err(Error::SizeLimit { n, max: MAX_QUBITS });
        }
        let descriptors = (1..=n).map(|a| Descriptor::new(a, 0, embed_pauli(a, n))).collect();
        Ok(NetworkState {
            n,
            t: 0,
            descriptors,
            heisenberg: StateVector::basis(1 << n, 0),
            tol,
            records: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn time(&self) -> usize {
        self.t
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn tolerances(&self) -> &Tolerances<T> {
        &self.tol
    }

    pub fn with_tolerance_set(mut self, tol: Tolerances<T>) -> Self {
        self.tol = tol;
        self
    }

    pub fn heisenberg_state(&self) -> &StateVector<T> {
        &self.heisenberg
    }

    pub fn descriptors(&self) -> &[Descriptor<T>] {
        &self.descriptors
    }

    pub fn check_qubit(&self, a: usize) -> Result<()> {
        if a < 1 || a > self.n {
            return Err(Error::BadOperands(format!("qubit {a} outside 1..={}", self.n)));
        }
        Ok(())
    }

    /// Descriptor of qubit `a` (1-based). Panics if out of range.
    pub fn descriptor(&self, a: usize) -> &Descriptor<T> {
        assert!(a >= 1 && a <= self.n, "qubit {a} outside 1..={}", self.n);
        &self.descriptors[a - 1]
    }

    pub fn component(&self, a: usize, axis: Axis) -> &Matrix<T> {
        self.descriptor(a).component(axis)
    }

    pub fn identity(&self) -> Matrix<T> {
        Matrix::identity(self.dim())
    }

    /// Conjugate every descriptor by the gate's unitary and advance time by one.
    pub fn apply_gate(&self, g: &Gate<T>) -> Result<Self> {
        let u = polish_unitary(&build_gate_unitary(g, self)?);
        let t = self.t + 1;
        let descriptors = self
            .descriptors
            .iter()
            .map(|d| {
                Descriptor::new(d.qubit, t, d.components.clone().map(|c| conjugate_unchecked(&u, &c)))
            })
            .collect();
        Ok(NetworkState {
            n: self.n,
            t,
            descriptors,
            heisenberg: self.heisenberg.clone(),
            tol: self.tol,
            records: self.records.clone(),
        })
    }

    /// Apply gates in order, returning every intermediate state (including `self`).
    pub fn evolve(&self, gates: &[Gate<T>]) -> Result<Vec<Self>> {
        let mut timeline = Vec::with_capacity(gates.len() + 1);
        timeline.push(self.clone());
        for g in gates {
            let next = timeline.last().expect("non-empty").apply_gate(g)?;
            timeline.push(next);
        }
        Ok(timeline)
    }

    pub fn run(&self, gates: &[Gate<T>]) -> Result<Self> {
        gates.iter().try_fold(self.clone(), |s, g| s.apply_gate(g))
    }

    /// Store the current `q_{qubit,axis}` as a record snapshot.
    pub fn record(&self, qubit: usize, axis: Axis) -> Result<Self> {
        self.check_qubit(qubit)?;
        let key = RecordKey { qubit, axis, time: self.t };
        let mut next = self.clone();
        if next.snapshot(key).is_none() {
            next.records.push(RecordSnapshot { key, matrix: self.component(qubit, axis).clone() });
        }
        Ok(next)
    }

    pub fn snapshot(&self, key: RecordKey) -> Option<&RecordSnapshot<T>> {
        self.records.iter().find(|r| r.key == key)
    }

    pub fn records(&self) -> &[RecordSnapshot<T>] {
        &self.records
    }

    /// `<Ψ|A|Ψ>`.
    pub fn expectation(&self, a: &Matrix<T>) -> Result<Complex<T>> {
        if a.dim() != self.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), found: a.dim() });
        }
        Ok(a.expectation(&self.heisenberg))
    }

    /// Real part of `<Ψ|A|Ψ>`, for Hermitian `A`.
    pub fn expectation_real(&self, a: &Matrix<T>) -> Result<T> {
        Ok(self.expectation(a)?.re)
    }

    /// The value of `A` if `<A>² = <A²>` within `tol.sharp`, otherwise `None`.
    pub fn is_sharp(&self, a: &Matrix<T>) -> Result<Option<T>> {
        a.check_hermitian(self.tol.hermitian)?;
        let mean = self.expectation_real(a)?;
        let sq = self.expectation_real(&(a * a))?;
        Ok(((mean * mean - sq).abs() <= self.tol.sharp).then_some(mean))
    }

    /// Entanglement criterion: some pair `(i, j)` has
    /// `<q_ai q_bj> ≠ <q_ai><q_bj>` beyond `tol.entangle`. The witness is the
    /// pair with the largest discrepancy.
    pub fn are_entangled(&self, a: usize, b: usize) -> Result<Entanglement<T>> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(Error::BadOperands("entanglement needs two distinct qubits".into()));
        }
        let (qa, qb) = (self.descriptor(a), self.descriptor(b));
        // Scan z, y, x so ties (within tol) resolve toward the z-z pair.
        let mut best = (Axis::Z, Axis::Z, -T::one());
        for i in Axis::ALL.into_iter().rev() {
            let ai = qa.component(i);
            let ea = self.expectation(ai)?;
            for j in Axis::ALL.into_iter().rev() {
                let bj = qb.component(j);
                let joint = self.expectation(&(ai * bj))?;
                let d = (joint - ea * self.expectation(bj)?).norm();
                if d > best.2 + self.tol.entangle {
                    best = (i, j, d);
                }
            }
        }
        Ok(Entanglement {
            entangled: best.2 > self.tol.entangle,
            witness: (best.0, best.1),
            discrepancy: best.2,
        })
    }

    /// Largest violation of the descriptor algebra: single-qubit Pauli
    /// relations and commutation between distinct qubits.
    pub fn algebra_residual(&self) -> T {
        let mut worst = T::zero();
        for (i, d) in self.descriptors.iter().enumerate() {
            worst = worst.max(d.algebra_residual());
            for e in &self.descriptors[i + 1..] {
                for a in d.components() {
                    for b in e.components() {
                        worst = worst.max(a.commutator(b).max_abs());
                    }
                }
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::tensor;

    type Net = NetworkState<f64>;
    type M = Matrix<f64>;

    #[test]
    fn single_qubit_init_is_pauli() {
        let s = Net::new(1).unwrap();
        for a in Axis::ALL {
            assert_eq!(*s.component(1, a), M::pauli(a));
        }
    }

    #[test]
    fn two_qubit_init_slots() {
        let s = Net::new(2).unwrap();
        let one = M::identity(2);
        for a in Axis::ALL {
            assert_eq!(*s.component(1, a), tensor(&M::pauli(a), &one));
            assert_eq!(*s.component(2, a), tensor(&one, &M::pauli(a)));
        }
        for q in 1..=2 {
            assert_eq!(s.is_sharp(s.component(q, Axis::Z)).unwrap(), Some(1.0));
        }
    }

    #[test]
    fn size_limit() {
        assert!(matches!(Net::new(11), Err(Error::SizeLimit { n: 11, .. })));
        assert!(Net::new(0).is_err());
    }

    #[test]
    fn not_toggles_z() {
        let s = Net::new(2).unwrap();
        let u = build_gate_unitary(&Gate::not(2), &s).unwrap();
        assert_eq!(u, *s.component(2, Axis::X));
        let t = s.apply_gate(&Gate::not(2)).unwrap();
        let q = s.descriptor(2);
        assert!(t.component(2, Axis::X).dist(q.x()) < 1e-15);
        assert!(t.component(2, Axis::Y).dist(&-q.y()) < 1e-15);
        assert!(t.component(2, Axis::Z).dist(&-q.z()) < 1e-15);
        assert!(t.descriptor(1).dist(s.descriptor(1)) < 1e-15);
        assert_eq!(t.time(), 1);
        assert_eq!(t.is_sharp(t.component(2, Axis::Z)).unwrap(), Some(-1.0));
    }

    #[test]
    fn identity_gate_unitary() {
        let s = Net::new(3).unwrap();
        assert_eq!(build_gate_unitary(&Gate::Identity, &s).unwrap(), M::identity(8));
    }

    #[test]
    fn hadamard_action() {
        let s = Net::new(2).unwrap();
        let t = s.apply_gate(&Gate::h(1)).unwrap();
        let q = s.descriptor(1);
        assert!(t.component(1, Axis::X).dist(q.z()) < 1e-15);
        assert!(t.component(1, Axis::Y).dist(&-q.y()) < 1e-15);
        assert!(t.component(1, Axis::Z).dist(q.x()) < 1e-15);
        assert_eq!(t.is_sharp(t.component(1, Axis::Z)).unwrap(), None);
    }

    #[test]
    fn rz_action() {
        let s = Net::new(2).unwrap().apply_gate(&Gate::h(2)).unwrap();
        let theta = 0.7_f64;
        let t = s.apply_gate(&Gate::rz(2, theta)).unwrap();
        let q = s.descriptor(2);
        let (c, sn) = (theta.cos(), theta.sin());
        let x = &q.x().scale_real(c) - &q.y().scale_real(sn);
        let y = &q.y().scale_real(c) + &q.x().scale_real(sn);
        assert!(t.component(2, Axis::X).dist(&x) < 1e-14);
        assert!(t.component(2, Axis::Y).dist(&y) < 1e-14);
        assert!(t.component(2, Axis::Z).dist(q.z()) < 1e-14);
    }

    #[test]
    fn expectation_dim_mismatch() {
        let s = Net::new(2).unwrap();
        assert!(matches!(s.expectation(&M::identity(2)), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn entanglement_fresh_and_bell() {
        let s = Net::new(2).unwrap();
        assert!(!s.are_entangled(1, 2).unwrap().entangled);
        let t = s.run(&[Gate::h(1), Gate::cnot(1, 2)]).unwrap();
        let e = t.are_entangled(1, 2).unwrap();
        assert!(e.entangled);
        assert_eq!(e.witness, (Axis::Z, Axis::Z));
        assert!((e.discrepancy - 1.0).abs() < 1e-12);
        let u = t.apply_gate(&Gate::cnot(1, 2)).unwrap();
        assert!(!u.are_entangled(1, 2).unwrap().entangled);
        assert!(s.are_entangled(1, 1).is_err());
    }

    #[test]
    fn records_are_kept_across_gates() {
        let s = Net::new(2).unwrap().run(&[Gate::h(1), Gate::cnot(1, 2)]).unwrap();
        let s = s.record(1, Axis::Z).unwrap();
        let key = RecordKey { qubit: 1, axis: Axis::Z, time: 2 };
        let later = s.apply_gate(&Gate::cnot(1, 2)).unwrap();
        assert_eq!(later.snapshot(key).unwrap().matrix, *s.component(1, Axis::Z));
        assert!(s.record(3, Axis::Z).is_err());
    }

    #[test]
    fn bad_gate_operands_rejected() {
        let s = Net::new(2).unwrap();
        assert!(matches!(s.apply_gate(&Gate::cnot(2, 2)), Err(Error::BadOperands(_))));
        assert!(matches!(s.apply_gate(&Gate::not(5)), Err(Error::BadOperands(_))));
    }
}
