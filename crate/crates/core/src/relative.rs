//! Relative (branch) descriptors.
//!
//! A record observable that is an involution (or has a discrete spectrum)
//! defines a PVM; each projector selects one branch. Multiplying a qubit's
//! descriptors by a projector that commutes with them gives the qubit's
//! relative descriptors in that branch, whose Pauli algebra has the projector
//! as its unit.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::gate::{build_gate_unitary, Gate};
use crate::matrix::{pauli_algebra_residual, pauli_projector_unchecked, Axis, Matrix, StateVector};
use crate::network::{NetworkState, RecordKey, RecordSnapshot};
use crate::scalar::{real, to_f64, Scalar};
use crate::spectral::spectral;

/// One recorded value selecting a branch: which observable, and its eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordTag<T> {
    pub source: String,
    pub value: T,
}

/// A branch selector.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeFrame<T> {
    pub projector: Matrix<T>,
    /// Recorded values defining the branch, outermost first. Empty for the
    /// whole-network frame.
    pub tags: Vec<RecordTag<T>>,
    /// `<Ψ|P|Ψ>`.
    pub weight: T,
}

impl<T: Scalar> RelativeFrame<T> {
    /// Frame for `projector`, after checking it is a Hermitian idempotent.
    pub fn new(s: &NetworkState<T>, projector: Matrix<T>, tags: Vec<RecordTag<T>>) -> Result<Self> {
        let tol = s.tolerances();
        if projector.dim() != s.dim() {
            return Err(Error::DimMismatch { expected: s.dim(), found: projector.dim() });
        }
        projector.check_hermitian(tol.hermitian)?;
        let idem = projector.idempotence_residual();
        if idem > tol.general * T::from(10).unwrap() {
            return Err(Error::PreconditionFailed(format!(
                "frame projector is not idempotent (residual {:.3e})",
                to_f64(idem)
            )));
        }
        let weight = s.expectation_real(&projector)?;
        Ok(RelativeFrame { projector, tags, weight })
    }

    /// The trivial frame `P = 1`.
    pub fn whole(s: &NetworkState<T>) -> Self {
        RelativeFrame { projector: s.identity(), tags: Vec::new(), weight: T::one() }
    }

    /// Eigenvalue of the innermost record, if any.
    pub fn label(&self) -> Option<T> {
        self.tags.last().map(|t| t.value)
    }

    pub fn describe(&self) -> String {
        if self.tags.is_empty() {
            return "whole network".into();
        }
        self.tags
            .iter()
            .map(|t| format!("{}={}", t.source, t.value))
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// Branch of a branch: product of commuting projectors.
    pub fn compose(&self, inner: &Self, s: &NetworkState<T>) -> Result<Self> {
        let c = self.projector.commutator(&inner.projector).max_abs();
        if c > s.tolerances().commute {
            return Err(Error::NonCommuting { residual: to_f64(c) });
        }
        let mut tags = self.tags.clone();
        tags.extend(inner.tags.iter().cloned());
        RelativeFrame::new(s, &self.projector * &inner.projector, tags)
    }
}

/// The descriptors of one qubit instance in one branch.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeDescriptor<T> {
    pub qubit: usize,
    pub time: usize,
    components: [Matrix<T>; 3],
    pub frame: RelativeFrame<T>,
}

impl<T: Scalar> RelativeDescriptor<T> {
    pub fn component(&self, axis: Axis) -> &Matrix<T> {
        &self.components[axis.index()]
    }

    pub fn components(&self) -> &[Matrix<T>; 3] {
        &self.components
    }

    /// The branch unit, i.e. the frame projector.
    pub fn relative_unit(&self) -> &Matrix<T> {
        &self.frame.projector
    }

    /// Violation of the Pauli algebra with the relative unit in place of 1.
    pub fn algebra_residual(&self) -> T {
        pauli_algebra_residual(&self.components, self.relative_unit())
    }

    pub fn hermitian_residual(&self) -> T {
        self.components.iter().fold(T::zero(), |m, c| m.max(c.hermitian_residual()))
    }

    /// Largest `|[q_i, P]|`.
    pub fn commutation_residual(&self) -> T {
        self.components
            .iter()
            .fold(T::zero(), |m, c| m.max(c.commutator(self.relative_unit()).max_abs()))
    }
}

/// Two-outcome PVM `½(1 ± r)` of an involution `r`, labels `+1` then `−1`.
pub fn pvm_from_involution<T: Scalar>(
    s: &NetworkState<T>,
    recorded: &Matrix<T>,
    source: &str,
) -> Result<Vec<RelativeFrame<T>>> {
    recorded.check_involution(s.tolerances().general)?;
    [1i8, -1]
        .into_iter()
        .map(|sign| {
            let p = pauli_projector_unchecked(recorded, sign);
            let tag = RecordTag { source: source.to_string(), value: T::from(sign).unwrap() };
            RelativeFrame::new(s, p, vec![tag])
        })
        .collect()
}

/// PVM of a recorded observable: the two Pauli projectors for an involution,
/// otherwise one spectral projector per distinct eigenvalue (ascending).
pub fn make_pvm<T: Scalar>(
    s: &NetworkState<T>,
    recorded: &Matrix<T>,
    source: &str,
) -> Result<Vec<RelativeFrame<T>>> {
    let tol = s.tolerances();
    recorded.check_hermitian(tol.hermitian)?;
    if recorded.involution_residual() <= tol.general {
        return pvm_from_involution(s, recorded, source);
    }
    let d = spectral(recorded, tol)?;
    d.eigenvalues
        .iter()
        .zip(d.projectors)
        .map(|(&value, p)| {
            RelativeFrame::new(s, p, vec![RecordTag { source: source.to_string(), value }])
        })
        .collect()
}

/// `q_qubit · P` for each component, requiring `P` to commute with them.
pub fn relative_descriptor<T: Scalar>(
    s: &NetworkState<T>,
    qubit: usize,
    frame: &RelativeFrame<T>,
) -> Result<RelativeDescriptor<T>> {
    s.check_qubit(qubit)?;
    let p = &frame.projector;
    let d = s.descriptor(qubit);
    let worst = d.components().iter().fold(T::zero(), |m, c| m.max(c.commutator(p).max_abs()));
    if worst > s.tolerances().commute {
        return Err(Error::NonCommuting { residual: to_f64(worst) });
    }
    Ok(RelativeDescriptor {
        qubit,
        time: s.time(),
        components: d.components().clone().map(|c| &c * p),
        frame: frame.clone(),
    })
}

fn branch_norm<T: Scalar>(s: &NetworkState<T>, frame: &RelativeFrame<T>) -> Result<T> {
    let w = s.expectation_real(&frame.projector)?;
    if !(w > s.tolerances().weight) {
        return Err(Error::ZeroWeightBranch { weight: to_f64(w) });
    }
    Ok(w)
}

/// Conditional expectation `<A P> / <P>`.
pub fn relative_expectation<T: Scalar>(
    s: &NetworkState<T>,
    a: &Matrix<T>,
    frame: &RelativeFrame<T>,
) -> Result<Complex<T>> {
    let w = branch_norm(s, frame)?;
    let ap = s.expectation(&(a * &frame.projector))?;
    Ok(ap / real(w))
}

/// `P|Ψ> / |P|Ψ>|`.
pub fn relative_heisenberg_state<T: Scalar>(
    s: &NetworkState<T>,
    frame: &RelativeFrame<T>,
) -> Result<StateVector<T>> {
    let w = branch_norm(s, frame)?;
    Ok(frame.projector.apply(s.heisenberg_state()).scale(real(T::one() / w.sqrt())))
}

/// Sharp value of `A` in a normalised state, if `<A>² = <A²>` within `tol`.
pub fn sharp_in<T: Scalar>(psi: &StateVector<T>, a: &Matrix<T>, tol: T) -> (Option<T>, T) {
    let mean = a.expectation(psi).re;
    let sq = (a * a).expectation(psi).re;
    let residual = (mean * mean - sq).abs();
    ((residual <= tol).then_some(mean), residual)
}

/// Components `i` of `holder` whose product with `recorded` is sharp, in
/// x, y, z order, with the sharp value. Empty means no record.
pub fn record_check<T: Scalar>(
    s: &NetworkState<T>,
    holder: usize,
    recorded: &Matrix<T>,
) -> Result<Vec<(Axis, T)>> {
    s.check_qubit(holder)?;
    if recorded.dim() != s.dim() {
        return Err(Error::DimMismatch { expected: s.dim(), found: recorded.dim() });
    }
    let mut found = Vec::new();
    for axis in Axis::ALL {
        let prod = s.component(holder, axis) * recorded;
        if prod.hermitian_residual() > s.tolerances().hermitian {
            continue;
        }
        if let Some(v) = s.is_sharp(&prod)? {
            found.push((axis, v));
        }
    }
    Ok(found)
}

/// Whether a gate keeps the relative states defined by a set of records
/// evolving autonomously.
#[derive(Debug, Clone, PartialEq)]
pub enum Autonomy<T> {
    Preserving,
    Destroying { record: RecordKey, commutator: T },
}

impl<T> Autonomy<T> {
    pub fn is_preserving(&self) -> bool {
        matches!(self, Autonomy::Preserving)
    }
}

/// A record survives the gate when the gate unitary commutes with it, or when
/// the gate acts only on the record's holder (it commutes with every
/// descriptor of every other qubit), so the partners foliated by that record
/// are untouched.
pub fn autonomy_check<T: Scalar>(
    s: &NetworkState<T>,
    g: &Gate<T>,
    records: &[RecordSnapshot<T>],
) -> Result<Autonomy<T>> {
    let u = build_gate_unitary(g, s)?;
    let tol = s.tolerances().commute;
    for r in records {
        if r.matrix.dim() != s.dim() {
            return Err(Error::DimMismatch { expected: s.dim(), found: r.matrix.dim() });
        }
        let c = u.commutator(&r.matrix).max_abs();
        if c <= tol {
            continue;
        }
        let local_to_holder = s
            .descriptors()
            .iter()
            .filter(|d| d.qubit != r.key.qubit)
            .flat_map(|d| d.components().iter())
            .all(|q| u.commutator(q).max_abs() <= tol);
        if !local_to_holder {
            return Ok(Autonomy::Destroying { record: r.key, commutator: c });
        }
    }
    Ok(Autonomy::Preserving)
}

/// Branch-restricted unitary of an F gate acting on `qubit` (one of its two
/// operands) in a frame recording the other operand's z-value `λ`:
/// `(α + λβ) P + (γ + λδ) q_sz P` when `qubit` is the second operand, and
/// `(α + λγ) P + (β + λδ) q_mz P` when it is the first.
pub fn branch_evolution_factor<T: Scalar>(
    s: &NetworkState<T>,
    g: &Gate<T>,
    frame: &RelativeFrame<T>,
    qubit: usize,
) -> Result<Matrix<T>> {
    let Gate::F { m, s: sq, alpha, beta, gamma, delta } = *g else {
        return Err(Error::WrongGateKind(g.name().to_string()));
    };
    g.check_operands(s.n())?;
    // (other operand, coefficient pairs multiplying 1 and λ)
    let (other, unit, with_lambda) = if qubit == sq {
        (m, (alpha, gamma), (beta, delta))
    } else if qubit == m {
        (sq, (alpha, beta), (gamma, delta))
    } else {
        return Err(Error::BadOperands(format!("qubit {qubit} is not an operand of F")));
    };
    let lambda = frame
        .label()
        .ok_or_else(|| Error::PreconditionFailed("frame carries no record value".into()))?;
    let p = &frame.projector;
    let drift = (s.component(other, Axis::Z) * p).dist(&p.scale_real(lambda));
    if drift > s.tolerances().commute {
        return Err(Error::PreconditionFailed(format!(
            "frame is not a z-record of qubit {other} with value {} (residual {:.3e})",
            to_f64(lambda),
            to_f64(drift)
        )));
    }
    let c_unit = unit.0 + lambda * with_lambda.0;
    let c_z = unit.1 + lambda * with_lambda.1;
    let own_z = s.component(qubit, Axis::Z) * p;
    Ok(&p.scale_real(c_unit) + &own_z.scale_real(c_z))
}

/// Branch-restricted unitary for any gate classified as preserving: `U P`
/// when `U` commutes with the frame, the bare unit `P` when `U` leaves the
/// foliated qubit untouched.
pub fn branch_factor<T: Scalar>(
    s: &NetworkState<T>,
    g: &Gate<T>,
    frame: &RelativeFrame<T>,
    qubit: usize,
) -> Result<Matrix<T>> {
    s.check_qubit(qubit)?;
    let u = build_gate_unitary(g, s)?;
    let tol = s.tolerances().commute;
    let p = &frame.projector;
    let c = u.commutator(p).max_abs();
    if c <= tol {
        return Ok(&u * p);
    }
    let touches = s
        .descriptor(qubit)
        .components()
        .iter()
        .map(|q| u.commutator(q).max_abs())
        .fold(T::zero(), T::max);
    if touches <= tol {
        return Ok(p.clone());
    }
    Err(Error::NonCommuting { residual: to_f64(c) })
}

/// Evolve relative descriptors inside their branch: `B† q_rel B`.
pub fn evolve_in_branch<T: Scalar>(rel: &RelativeDescriptor<T>, factor: &Matrix<T>) -> [Matrix<T>; 3] {
    let fa = factor.adjoint();
    rel.components().clone().map(|c| &(&fa * &c) * factor)
}

/// A qubit set split into relative descriptors by one record.
#[derive(Debug, Clone)]
pub struct FoliationReport<T> {
    pub record: String,
    pub frames: Vec<RelativeFrame<T>>,
    /// Foliated qubits and their relative descriptors, one per frame.
    pub descriptors: Vec<(usize, Vec<RelativeDescriptor<T>>)>,
    pub completeness_residual: T,
    pub valid: bool,
}

impl<T: Scalar> FoliationReport<T> {
    pub fn foliated_qubits(&self) -> Vec<usize> {
        self.descriptors.iter().map(|(q, _)| *q).collect()
    }

    pub fn max_algebra_residual(&self) -> T {
        self.descriptors
            .iter()
            .flat_map(|(_, r)| r.iter())
            .fold(T::zero(), |m, r| m.max(r.algebra_residual()))
    }

    /// `|Σ_frames q_rel,i − q_i|` for the given network (usually the one foliated).
    pub fn sum_rule_residual(&self, s: &NetworkState<T>) -> T {
        let mut worst = T::zero();
        for (q, rels) in &self.descriptors {
            for axis in Axis::ALL {
                let sum = rels
                    .iter()
                    .fold(Matrix::zeros(s.dim()), |acc, r| &acc + r.component(axis));
                worst = worst.max(sum.dist(s.component(*q, axis)));
            }
        }
        worst
    }
}

/// Foliate `qubits` by the PVM of a recorded observable. A record that is
/// sharp leaves only one nonzero-weight branch, which means the qubits are
/// not entangled with it; that is rejected.
pub fn foliate<T: Scalar>(
    s: &NetworkState<T>,
    qubits: &[usize],
    recorded: &Matrix<T>,
    source: &str,
) -> Result<FoliationReport<T>> {
    if qubits.is_empty() {
        return Err(Error::BadSubset("no qubits to foliate".into()));
    }
    let frames = make_pvm(s, recorded, source)?;
    let live = frames.iter().filter(|f| f.weight > s.tolerances().weight).count();
    if live < 2 {
        return Err(Error::PreconditionFailed(format!(
            "record {source} is sharp; unentangled systems cannot be foliated into relative states"
        )));
    }
    let sum = frames.iter().fold(Matrix::zeros(s.dim()), |acc, f| &acc + &f.projector);
    let completeness_residual = sum.dist(&s.identity());
    let mut descriptors = Vec::with_capacity(qubits.len());
    for &q in qubits {
        let rels = frames
            .iter()
            .map(|f| relative_descriptor(s, q, f))
            .collect::<Result<Vec<_>>>()?;
        descriptors.push((q, rels));
    }
    let tol = s.tolerances();
    let valid = completeness_residual <= tol.general
        && descriptors
            .iter()
            .flat_map(|(_, r)| r.iter())
            .all(|r| r.algebra_residual() <= tol.general * T::from(10).unwrap());
    Ok(FoliationReport { record: source.to_string(), frames, descriptors, completeness_residual, valid })
}

#[cfg(test)]
mod tests {
    use super::*;

    type Net = NetworkState<f64>;

    /// The measurement network at t = 2: H on S (qubit 1), then CNOT S→M (qubit 2).
    fn measured() -> Net {
        Net::new(2).unwrap().run(&[Gate::h(1), Gate::cnot(1, 2)]).unwrap()
    }

    #[test]
    fn pvm_weights() {
        let s = measured();
        let f = make_pvm(&s, s.component(1, Axis::Z), "q1z@2").unwrap();
        assert_eq!(f.len(), 2);
        assert!((f[0].weight - 0.5).abs() < 1e-12 && (f[1].weight - 0.5).abs() < 1e-12);
        assert_eq!(f[0].label(), Some(1.0));
        assert_eq!(f[1].label(), Some(-1.0));

        let fresh = Net::new(2).unwrap();
        let f = make_pvm(&fresh, fresh.component(1, Axis::Z), "q1z@0").unwrap();
        assert!((f[0].weight - 1.0).abs() < 1e-15 && f[1].weight.abs() < 1e-15);
    }

    #[test]
    fn pvm_rejects_non_involution() {
        let s = measured();
        let half = s.identity().scale_real(0.5);
        assert!(matches!(pvm_from_involution(&s, &half, "x"), Err(Error::NotInvolution { .. })));
    }

    #[test]
    fn relative_descriptor_of_measurer() {
        let s = measured();
        let frames = pvm_from_involution(&s, s.component(1, Axis::Z), "q1z@2").unwrap();
        for f in &frames {
            let r = relative_descriptor(&s, 2, f).unwrap();
            assert!(r.algebra_residual() < 1e-12);
            assert!(r.hermitian_residual() < 1e-12);
            for c in r.components() {
                assert!((c * c).dist(&f.projector) < 1e-12);
            }
        }
        let plus = relative_descriptor(&s, 2, &frames[0]).unwrap();
        let v = relative_expectation(&s, plus.component(Axis::Z), &frames[0]).unwrap();
        assert!((v.re - 1.0).abs() < 1e-12);
        let v = relative_expectation(&s, s.component(2, Axis::Z), &frames[1]).unwrap();
        assert!((v.re + 1.0).abs() < 1e-12);
    }

    #[test]
    fn whole_frame_is_absolute() {
        let s = measured();
        let w = RelativeFrame::whole(&s);
        let r = relative_descriptor(&s, 2, &w).unwrap();
        assert_eq!(r.components(), s.descriptor(2).components());
        let a = s.component(2, Axis::X);
        assert_eq!(relative_expectation(&s, a, &w).unwrap(), s.expectation(a).unwrap());
        assert_eq!(relative_heisenberg_state(&s, &w).unwrap(), *s.heisenberg_state());
    }

    #[test]
    fn non_commuting_frame_rejected() {
        let s = measured();
        let frames = pvm_from_involution(&s, s.component(2, Axis::Z), "q2z@2").unwrap();
        assert!(matches!(relative_descriptor(&s, 2, &frames[0]), Err(Error::NonCommuting { .. })));
    }

    #[test]
    fn zero_weight_branch_guard() {
        let s = Net::new(2).unwrap();
        let frames = pvm_from_involution(&s, s.component(1, Axis::Z), "q1z@0").unwrap();
        let err = relative_expectation(&s, s.component(2, Axis::Z), &frames[1]).unwrap_err();
        assert!(matches!(err, Error::ZeroWeightBranch { .. }));
        assert!(matches!(
            relative_heisenberg_state(&s, &frames[1]),
            Err(Error::ZeroWeightBranch { .. })
        ));
    }

    #[test]
    fn record_checks() {
        let s = measured();
        let sz = s.component(1, Axis::Z).clone();
        let r = record_check(&s, 2, &sz).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].0, Axis::Z);
        assert!((r[0].1 - 1.0).abs() < 1e-12);

        let fresh = Net::new(2).unwrap();
        let r = record_check(&fresh, 2, fresh.component(1, Axis::Z)).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].0, Axis::Z);
        assert!((r[0].1 - 1.0).abs() < 1e-15);

        let erased = s.apply_gate(&Gate::cnot(1, 2)).unwrap();
        assert!(record_check(&erased, 2, &sz).unwrap().is_empty());
    }

    #[test]
    fn composed_frames() {
        // Three qubits: S = 1 measured by M1 = 2 and M2 = 3.
        let s = Net::new(3).unwrap().run(&[Gate::h(1), Gate::cnot(1, 2), Gate::cnot(1, 3)]).unwrap();
        let outer = pvm_from_involution(&s, s.component(1, Axis::Z), "q1z").unwrap();
        let inner = pvm_from_involution(&s, s.component(2, Axis::Z), "q2z").unwrap();
        let both = outer[0].compose(&inner[0], &s).unwrap();
        assert!((both.weight - 0.5).abs() < 1e-12);
        assert_eq!(both.tags.len(), 2);
        let crossed = outer[0].compose(&inner[1], &s).unwrap();
        assert!(crossed.weight.abs() < 1e-12);
        let x = pvm_from_involution(&s, s.component(1, Axis::X), "q1x").unwrap();
        assert!(matches!(outer[0].compose(&x[0], &s), Err(Error::NonCommuting { .. })));
    }

    #[test]
    fn foliation_of_sharp_record_rejected() {
        let s = Net::new(2).unwrap();
        let err = foliate(&s, &[2], s.component(1, Axis::Z), "q1z@0").unwrap_err();
        assert!(matches!(err, Error::PreconditionFailed(_)));
    }

    #[test]
    fn autonomy_classes() {
        let s = measured().record(1, Axis::Z).unwrap().record(2, Axis::Z).unwrap();
        let recs = s.records().to_vec();
        assert!(autonomy_check(&s, &Gate::rz(2, 0.3), &recs).unwrap().is_preserving());
        assert!(autonomy_check(&s, &Gate::h(2), &recs).unwrap().is_preserving());
        let cz = Gate::f(2, 1, [0.5, 0.5, 0.5, -0.5], 1e-10).unwrap();
        assert!(autonomy_check(&s, &cz, &recs).unwrap().is_preserving());
        match autonomy_check(&s, &Gate::cnot(1, 2), &recs).unwrap() {
            Autonomy::Destroying { record, commutator } => {
                assert_eq!(record.qubit, 2);
                assert!(commutator > 0.1);
            }
            Autonomy::Preserving => panic!("second CNOT must destroy the foliation"),
        }
    }

    #[test]
    fn branch_factor_matches_full_evolution() {
        let s = measured();
        let frames = pvm_from_involution(&s, s.component(1, Axis::Z), "q1z@2").unwrap();
        let signs = [[1.0, 1.0, 1.0, -1.0], [1.0, -1.0, 1.0, 1.0], [-1.0, 1.0, 1.0, 1.0]];
        for e in signs {
            let c = [
                (e[0] + e[1] + e[2] + e[3]) / 4.0,
                (e[0] - e[1] + e[2] - e[3]) / 4.0,
                (e[0] + e[1] - e[2] - e[3]) / 4.0,
                (e[0] - e[1] - e[2] + e[3]) / 4.0,
            ];
            let g = Gate::f(1, 2, c, 1e-10).unwrap();
            let after = s.apply_gate(&g).unwrap();
            for f in &frames {
                let b = branch_evolution_factor(&s, &g, f, 2).unwrap();
                let via_branch = evolve_in_branch(&relative_descriptor(&s, 2, f).unwrap(), &b);
                let direct = relative_descriptor(&after, 2, f).unwrap();
                for axis in Axis::ALL {
                    assert!(via_branch[axis.index()].dist(direct.component(axis)) < 1e-12);
                }
                let generic = branch_factor(&s, &g, f, 2).unwrap();
                assert!(generic.dist(&b) < 1e-12);
            }
            // a frame recording the wrong qubit is refused
            let wrong = pvm_from_involution(&s, s.component(1, Axis::X), "q1x@2").unwrap();
            assert!(matches!(
                branch_evolution_factor(&s, &g, &wrong[0], 2),
                Err(Error::PreconditionFailed(_))
            ));
        }
    }

    #[test]
    fn foliation_sum_rule() {
        let s = measured();
        let r = foliate(&s, &[2], s.component(1, Axis::Z), "q1z@2").unwrap();
        assert!(r.valid);
        assert_eq!(r.foliated_qubits(), vec![2]);
        assert!(r.completeness_residual < 1e-12);
        assert!(r.max_algebra_residual() < 1e-12);
        assert!(r.sum_rule_residual(&s) < 1e-12);
    }

    #[test]
    fn wrong_gate_kind() {
        let s = measured();
        let f = RelativeFrame::whole(&s);
        assert!(matches!(
            branch_evolution_factor(&s, &Gate::h(1), &f, 1),
            Err(Error::WrongGateKind(_))
        ));
    }
}
