//! Binary registers and classical computation inside branches.
//!
//! A register over qubits `[a_0, a_1, ...]` (least significant first) is the
//! observable `Σ_k 2^k P_{-1}(q_{a_k z})`, so z-value −1 encodes bit 1 and the
//! fresh network holds the all-zeros register. When a register `b_S` is
//! entangled with `b_M`, the spectral projectors of `b_S` split the network
//! into branches, each carrying a sharp value of `b_M`; a reversible circuit
//! acting only on M then computes the same classical function in every branch.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::matrix::{pauli_projector_unchecked, Axis, Matrix, StateVector};
use crate::network::NetworkState;
use crate::relative::{make_pvm, relative_heisenberg_state, sharp_in, RelativeFrame};
use crate::scalar::{to_f64, Scalar};
use crate::spectral::spectral;

#[derive(Debug, Clone, PartialEq)]
pub struct RegisterDescriptor<T> {
    /// Network qubits, least significant bit first.
    pub qubits: Vec<usize>,
    pub matrix: Matrix<T>,
    pub time: usize,
}

impl<T: Scalar> RegisterDescriptor<T> {
    pub fn bits(&self) -> usize {
        self.qubits.len()
    }

    /// Largest distance of an eigenvalue from the nearest integer in `[0, 2^m)`.
    pub fn spectrum_residual(&self, s: &NetworkState<T>) -> Result<T> {
        let top = T::from((1usize << self.bits()) - 1).unwrap();
        let d = spectral(&self.matrix, s.tolerances())?;
        Ok(d.eigenvalues.iter().fold(T::zero(), |m, &e| {
            let nearest = e.round().max(T::zero()).min(top);
            m.max((e - nearest).abs())
        }))
    }
}

fn check_subset(n: usize, qubits: &[usize], what: &str) -> Result<()> {
    if qubits.is_empty() {
        return Err(Error::BadSubset(format!("{what} is empty")));
    }
    let mut seen = BTreeSet::new();
    for &q in qubits {
        if q == 0 || q > n {
            return Err(Error::BadSubset(format!("{what}: qubit {q} outside 1..={n}")));
        }
        if !seen.insert(q) {
            return Err(Error::BadSubset(format!("{what}: qubit {q} repeated")));
        }
    }
    Ok(())
}

pub fn register_descriptor<T: Scalar>(
    s: &NetworkState<T>,
    qubits: &[usize],
) -> Result<RegisterDescriptor<T>> {
    check_subset(s.n(), qubits, "register")?;
    let mut m = Matrix::zeros(s.dim());
    let mut weight = T::one();
    for &q in qubits {
        let p = pauli_projector_unchecked(s.component(q, Axis::Z), -1);
        m = &m + &p.scale_real(weight);
        weight = weight + weight;
    }
    Ok(RegisterDescriptor { qubits: qubits.to_vec(), matrix: m, time: s.time() })
}

/// A reversible function on `bits`-bit integers, as a permutation table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalFunction {
    bits: usize,
    table: Vec<usize>,
}

impl ClassicalFunction {
    pub fn new(bits: usize, table: Vec<usize>) -> Result<Self> {
        if bits == 0 || bits > 16 {
            return Err(Error::BadSubset(format!("{bits}-bit functions are not supported")));
        }
        let size = 1usize << bits;
        if table.len() != size {
            return Err(Error::NotReversible(format!(
                "table has {} entries, domain has {size}",
                table.len()
            )));
        }
        let mut hit = vec![false; size];
        for (x, &y) in table.iter().enumerate() {
            if y >= size {
                return Err(Error::NotReversible(format!("f({x}) = {y} is out of range")));
            }
            if std::mem::replace(&mut hit[y], true) {
                return Err(Error::NotReversible(format!("value {y} is hit twice")));
            }
        }
        Ok(ClassicalFunction { bits, table })
    }

    pub fn from_fn(bits: usize, f: impl Fn(usize) -> usize) -> Result<Self> {
        Self::new(bits, (0..1usize << bits.min(16)).map(f).collect())
    }

    pub fn identity(bits: usize) -> Result<Self> {
        Self::from_fn(bits, |x| x)
    }

    pub fn not_all(bits: usize) -> Result<Self> {
        Self::from_fn(bits, |x| !x & ((1 << bits) - 1))
    }

    /// `x → x + 1 mod 2^bits`.
    pub fn increment(bits: usize) -> Result<Self> {
        Self::from_fn(bits, |x| (x + 1) & ((1 << bits) - 1))
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn compose(&self, then: &Self) -> Result<Self> {
        if self.bits != then.bits {
            return Err(Error::BadSubset("functions differ in width".into()));
        }
        Self::new(self.bits, self.table.iter().map(|&x| then.table[x]).collect())
    }
}

/// Run NOT / CNOT / CCNOT gates on a classical bit assignment (`bits[q - 1]`
/// is qubit `q`, `true` meaning z-value −1).
pub fn simulate_bits<T: Scalar>(gates: &[Gate<T>], bits: &mut [bool]) -> Result<()> {
    let n = bits.len();
    for g in gates {
        g.check_operands(n)?;
        match *g {
            Gate::Identity => {}
            Gate::Not { target } => bits[target - 1] ^= true,
            Gate::Cnot { control, target } => bits[target - 1] ^= bits[control - 1],
            Gate::Ccnot { controls: [a, b], target } => bits[target - 1] ^= bits[a - 1] & bits[b - 1],
            _ => {
                return Err(Error::CircuitMismatch(format!(
                    "{} is not a classical reversible gate",
                    g.name()
                )))
            }
        }
    }
    Ok(())
}

/// Flip `target` when every `(qubit, value)` control holds. Controls wanting
/// bit 0 are conjugated by NOT; more than two controls go through a Toffoli
/// ladder whose ancillas must start at 0 and are restored.
fn multi_controlled_not<T: Scalar>(
    controls: &[(usize, bool)],
    target: usize,
    ancillas: &[usize],
    out: &mut Vec<Gate<T>>,
) {
    let flips: Vec<usize> = controls.iter().filter(|c| !c.1).map(|c| c.0).collect();
    out.extend(flips.iter().map(|&q| Gate::not(q)));
    let c: Vec<usize> = controls.iter().map(|c| c.0).collect();
    match c.len() {
        0 => out.push(Gate::not(target)),
        1 => out.push(Gate::cnot(c[0], target)),
        2 => out.push(Gate::ccnot(c[0], c[1], target)),
        k => {
            let mut ladder = vec![Gate::ccnot(c[0], c[1], ancillas[0])];
            for i in 2..k - 1 {
                ladder.push(Gate::ccnot(c[i], ancillas[i - 2], ancillas[i - 1]));
            }
            out.extend(ladder.iter().cloned());
            out.push(Gate::ccnot(c[k - 1], ancillas[k - 3], target));
            out.extend(ladder.into_iter().rev());
        }
    }
    out.extend(flips.iter().map(|&q| Gate::not(q)));
}

/// Swap register values `a` and `b`, fixing everything else.
fn transposition<T: Scalar>(
    a: usize,
    b: usize,
    register: &[usize],
    ancillas: &[usize],
    out: &mut Vec<Gate<T>>,
) {
    let diff = a ^ b;
    let pivot = diff.trailing_zeros() as usize;
    let others: Vec<usize> = (0..register.len()).filter(|&k| k != pivot && diff >> k & 1 == 1).collect();
    let fan: Vec<Gate<T>> = others.iter().map(|&k| Gate::cnot(register[pivot], register[k])).collect();
    out.extend(fan.iter().cloned());
    // After the fan-out, a and b agree on every bit except the pivot.
    let a_pivot = a >> pivot & 1;
    let controls: Vec<(usize, bool)> = (0..register.len())
        .filter(|&k| k != pivot)
        .map(|k| {
            let bit = if diff >> k & 1 == 1 { (a >> k & 1) ^ a_pivot } else { a >> k & 1 };
            (register[k], bit == 1)
        })
        .collect();
    multi_controlled_not(&controls, register[pivot], ancillas, out);
    out.extend(fan.into_iter().rev());
}

/// Compile `f` into NOT / CNOT / CCNOT gates on `register` (least significant
/// first). Functions on more than 3 bits need `bits - 3` ancillas, which must
/// hold 0 on entry and are returned to 0. The result is checked against the
/// table on every input.
pub fn compile_classical<T: Scalar>(
    f: &ClassicalFunction,
    register: &[usize],
    ancillas: &[usize],
) -> Result<Vec<Gate<T>>> {
    if register.len() != f.bits() {
        return Err(Error::BadSubset(format!(
            "register has {} qubits, function has {} bits",
            register.len(),
            f.bits()
        )));
    }
    let all: Vec<usize> = register.iter().chain(ancillas).copied().collect();
    let n = all.iter().copied().max().unwrap_or(0);
    check_subset(n, &all, "register and ancillas")?;

    let size = 1usize << f.bits();
    let c = f.apply(0);
    let g: Vec<usize> = (0..size).map(|x| f.apply(x) ^ c).collect();

    // Write g = t_1 ∘ ... ∘ t_r by sorting it with swaps on the output side.
    let mut h = g;
    let mut swaps = Vec::new();
    for x in 0..size {
        if h[x] != x {
            let y = h[x];
            for v in h.iter_mut() {
                if *v == x {
                    *v = y;
                } else if *v == y {
                    *v = x;
                }
            }
            swaps.push((x, y));
        }
    }
    let needed = if swaps.is_empty() { 0 } else { f.bits().saturating_sub(3) };
    if ancillas.len() < needed {
        return Err(Error::InsufficientAncillas { needed, available: ancillas.len() });
    }

    let mut gates = Vec::new();
    for &(a, b) in swaps.iter().rev() {
        transposition(a, b, register, ancillas, &mut gates);
    }
    for (k, &q) in register.iter().enumerate() {
        if c >> k & 1 == 1 {
            gates.push(Gate::not(q));
        }
    }

    for x in 0..size {
        let mut bits = vec![false; n];
        for (k, &q) in register.iter().enumerate() {
            bits[q - 1] = x >> k & 1 == 1;
        }
        simulate_bits(&gates, &mut bits)?;
        let y: usize = register.iter().enumerate().map(|(k, &q)| (bits[q - 1] as usize) << k).sum();
        if y != f.apply(x) || ancillas.iter().any(|&a| bits[a - 1]) {
            return Err(Error::CircuitMismatch(format!(
                "synthesised circuit maps {x} to {y}, expected {}",
                f.apply(x)
            )));
        }
    }
    Ok(gates)
}

/// One branch of an ensemble of classical computers.
#[derive(Debug, Clone)]
pub struct ClassicalBranch<T> {
    /// Value of the branching register in this branch.
    pub j: T,
    pub frame: RelativeFrame<T>,
    /// `b_M P_j`.
    pub relative_register: Matrix<T>,
    /// Sharp value of `b_M` in the relative Heisenberg state.
    pub value: T,
    pub sharpness_residual: T,
}

fn sharp_register<T: Scalar>(
    psi: &StateVector<T>,
    b: &Matrix<T>,
    p: &Matrix<T>,
    tol: T,
) -> (Option<T>, T) {
    sharp_in(psi, &(b * p), tol)
}

/// Split the network into branches by the value of `b_s`, and read off the
/// sharp value of `b_m` in each nonzero-weight branch.
pub fn classical_branches<T: Scalar>(
    s: &NetworkState<T>,
    b_m: &RegisterDescriptor<T>,
    b_s: &RegisterDescriptor<T>,
) -> Result<Vec<ClassicalBranch<T>>> {
    if b_m.qubits.iter().any(|q| b_s.qubits.contains(q)) {
        return Err(Error::BadSubset("registers overlap".into()));
    }
    if let Some(v) = s.is_sharp(&b_s.matrix)? {
        return Err(Error::PreconditionFailed(format!(
            "b_S is sharp (value {}); the registers are not entangled",
            to_f64(v)
        )));
    }
    if let Some(v) = s.is_sharp(&b_m.matrix)? {
        return Err(Error::PreconditionFailed(format!(
            "b_M is sharp (value {}); the registers are not entangled",
            to_f64(v)
        )));
    }
    let tol = s.tolerances();
    let frames = make_pvm(s, &b_s.matrix, "b_S")?;
    let mut out = Vec::new();
    for frame in frames {
        if !(frame.weight > tol.weight) {
            continue;
        }
        let psi = relative_heisenberg_state(s, &frame)?;
        let (value, residual) = sharp_register(&psi, &b_m.matrix, &frame.projector, tol.sharp);
        let j = frame.label().unwrap_or_else(T::zero);
        let Some(value) = value else {
            return Err(Error::PreconditionFailed(format!(
                "relative register in branch b_S = {} is not sharp (residual {:.3e})",
                to_f64(j),
                to_f64(residual)
            )));
        };
        out.push(ClassicalBranch {
            j,
            relative_register: &b_m.matrix * &frame.projector,
            frame,
            value,
            sharpness_residual: residual,
        });
    }
    Ok(out)
}

/// `<b_M b_S>² − <(b_M b_S)²>`, with the sharp value if within `tol.sharp`.
pub fn product_sharpness<T: Scalar>(
    s: &NetworkState<T>,
    b_m: &RegisterDescriptor<T>,
    b_s: &RegisterDescriptor<T>,
) -> Result<(Option<T>, T)> {
    let prod = &b_m.matrix * &b_s.matrix;
    prod.check_hermitian(s.tolerances().hermitian)?;
    Ok(sharp_in(s.heisenberg_state(), &prod, s.tolerances().sharp))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchStep<T> {
    pub branch: usize,
    pub label: Option<T>,
    pub weight: T,
    pub before: T,
    pub after: T,
    pub expected: usize,
    pub residual_before: T,
    pub residual_after: T,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalStepReport<T> {
    pub branches: Vec<BranchStep<T>>,
    /// Qubits outside the register and ancillas whose descriptors changed.
    pub interacting_qubits: Vec<usize>,
}

impl<T> ClassicalStepReport<T> {
    pub fn ok(&self) -> bool {
        self.interacting_qubits.is_empty() && self.branches.iter().all(|b| b.ok)
    }
}

/// Check that the step `before → after` computed `f` on `register` in every
/// nonzero-weight frame, without touching qubits outside register and ancillas.
pub fn verify_classical_step<T: Scalar>(
    before: &NetworkState<T>,
    after: &NetworkState<T>,
    register: &[usize],
    ancillas: &[usize],
    f: &ClassicalFunction,
    frames: &[RelativeFrame<T>],
) -> Result<ClassicalStepReport<T>> {
    if before.n() != after.n() {
        return Err(Error::CircuitMismatch(format!(
            "networks have {} and {} qubits",
            before.n(),
            after.n()
        )));
    }
    if register.len() != f.bits() {
        return Err(Error::BadSubset(format!(
            "register has {} qubits, function has {} bits",
            register.len(),
            f.bits()
        )));
    }
    let b0 = register_descriptor(before, register)?;
    let b1 = register_descriptor(after, register)?;
    let tol = before.tolerances();

    let mut branches = Vec::new();
    for (i, frame) in frames.iter().enumerate() {
        if !(frame.weight > tol.weight) {
            continue;
        }
        let psi = relative_heisenberg_state(before, frame)?;
        let (v, r0) = sharp_register(&psi, &b0.matrix, &frame.projector, tol.sharp);
        let v = v.ok_or(Error::BranchNotSharp { branch: i, stage: "before", residual: to_f64(r0) })?;
        let (w, r1) = sharp_register(&psi, &b1.matrix, &frame.projector, tol.sharp);
        let w = w.ok_or(Error::BranchNotSharp { branch: i, stage: "after", residual: to_f64(r1) })?;
        let top = (1usize << f.bits()) - 1;
        let vi = to_f64(v).round().clamp(0.0, top as f64) as usize;
        let expected = f.apply(vi);
        let ok = (w - T::from(expected).unwrap()).abs() <= tol.sharp.sqrt()
            && (v - T::from(vi).unwrap()).abs() <= tol.sharp.sqrt();
        branches.push(BranchStep {
            branch: i,
            label: frame.label(),
            weight: frame.weight,
            before: v,
            after: w,
            expected,
            residual_before: r0,
            residual_after: r1,
            ok,
        });
    }

    let interacting_qubits = (1..=before.n())
        .filter(|q| !register.contains(q) && !ancillas.contains(q))
        .filter(|&q| before.descriptor(q).dist(after.descriptor(q)) > tol.general)
        .collect();
    Ok(ClassicalStepReport { branches, interacting_qubits })
}

#[cfg(test)]
mod tests {
    use super::*;

    type Net = NetworkState<f64>;

    fn sharp_value(s: &Net, b: &RegisterDescriptor<f64>) -> Option<f64> {
        s.is_sharp(&b.matrix).unwrap()
    }

    #[test]
    fn register_values() {
        let s = Net::new(3).unwrap();
        let b = register_descriptor(&s, &[1, 3]).unwrap();
        assert_eq!(sharp_value(&s, &b), Some(0.0));
        let s1 = s.apply_gate(&Gate::not(1)).unwrap();
        let b = register_descriptor(&s1, &[1]).unwrap();
        assert!((sharp_value(&s1, &b).unwrap() - 1.0).abs() < 1e-12);
        let s2 = s.run(&[Gate::not(1), Gate::not(2)]).unwrap();
        let b = register_descriptor(&s2, &[1, 2]).unwrap();
        assert!((sharp_value(&s2, &b).unwrap() - 3.0).abs() < 1e-12);
        let s3 = s.apply_gate(&Gate::not(2)).unwrap();
        let b = register_descriptor(&s3, &[1, 2]).unwrap();
        assert!((sharp_value(&s3, &b).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn register_spectrum_is_integral() {
        let s = Net::new(3).unwrap().run(&[Gate::h(1), Gate::cnot(1, 2), Gate::h(3), Gate::rz(2, 0.4)]).unwrap();
        let b = register_descriptor(&s, &[3, 1, 2]).unwrap();
        assert!(b.spectrum_residual(&s).unwrap() < 1e-8);
        let d = spectral(&b.matrix, s.tolerances()).unwrap();
        assert_eq!(d.eigenvalues.len(), 8);
    }

    #[test]
    fn bad_subsets() {
        let s = Net::new(2).unwrap();
        for q in [&[][..], &[1, 1], &[3], &[0]] {
            assert!(matches!(register_descriptor(&s, q), Err(Error::BadSubset(_))));
        }
    }

    #[test]
    fn reversibility() {
        assert!(matches!(ClassicalFunction::new(2, vec![0, 0, 1, 2]), Err(Error::NotReversible(_))));
        assert!(matches!(ClassicalFunction::new(2, vec![0, 1, 2]), Err(Error::NotReversible(_))));
        assert!(matches!(ClassicalFunction::new(1, vec![0, 2]), Err(Error::NotReversible(_))));
        let inc = ClassicalFunction::increment(2).unwrap();
        assert_eq!(inc.table(), &[1, 2, 3, 0]);
        assert_eq!(inc.compose(&inc).unwrap().table(), &[2, 3, 0, 1]);
    }

    #[test]
    fn compile_examples() {
        let id: Vec<Gate<f64>> = compile_classical(&ClassicalFunction::identity(2).unwrap(), &[1, 2], &[]).unwrap();
        assert!(id.is_empty());

        let not: Vec<Gate<f64>> = compile_classical(&ClassicalFunction::not_all(2).unwrap(), &[1, 2], &[]).unwrap();
        assert_eq!(not.len(), 2);
        assert!(not.iter().all(|g| matches!(g, Gate::Not { .. })));

        let inc: Vec<Gate<f64>> =
            compile_classical(&ClassicalFunction::increment(2).unwrap(), &[1, 2], &[]).unwrap();
        assert_eq!(inc.len(), 2);
        assert!(matches!(inc[0], Gate::Cnot { control: 1, target: 2 }));
        assert!(matches!(inc[1], Gate::Not { target: 1 }));
    }

    /// Every permutation of 3 bits, and some of 4 and 5 bits, compiles to a
    /// circuit whose truth table matches.
    #[test]
    fn compile_exhaustive() {
        fn perms(items: Vec<usize>) -> Vec<Vec<usize>> {
            if items.len() <= 1 {
                return vec![items];
            }
            let mut out = Vec::new();
            for i in 0..items.len() {
                let mut rest = items.clone();
                let x = rest.remove(i);
                for mut p in perms(rest) {
                    p.insert(0, x);
                    out.push(p);
                }
            }
            out
        }
        for p in perms((0..8).collect()).into_iter().step_by(7) {
            let f = ClassicalFunction::new(3, p).unwrap();
            compile_classical::<f64>(&f, &[2, 3, 1], &[]).unwrap();
        }
        let rev4 = ClassicalFunction::from_fn(4, |x| (x * 7 + 3) % 16).unwrap();
        compile_classical::<f64>(&rev4, &[1, 2, 3, 4], &[5]).unwrap();
        assert!(matches!(
            compile_classical::<f64>(&rev4, &[1, 2, 3, 4], &[]),
            Err(Error::InsufficientAncillas { needed: 1, available: 0 })
        ));
        let rev5 = ClassicalFunction::from_fn(5, |x| 31 - x).unwrap();
        compile_classical::<f64>(&rev5, &[1, 2, 3, 4, 5], &[]).unwrap();
        let swap5 = ClassicalFunction::from_fn(5, |x| match x {
            0 => 31,
            31 => 0,
            x => x,
        })
        .unwrap();
        compile_classical::<f64>(&swap5, &[5, 4, 3, 2, 1], &[6, 7]).unwrap();
    }

    /// S = qubit 1, M = qubit 2: H on S, CNOT S→M.
    fn one_bit_copy() -> Net {
        Net::new(2).unwrap().run(&[Gate::h(1), Gate::cnot(1, 2)]).unwrap()
    }

    #[test]
    fn one_bit_branches() {
        let s = one_bit_copy();
        let bm = register_descriptor(&s, &[2]).unwrap();
        let bs = register_descriptor(&s, &[1]).unwrap();
        let br = classical_branches(&s, &bm, &bs).unwrap();
        assert_eq!(br.len(), 2);
        assert!((br[0].j - 0.0).abs() < 1e-9 && (br[0].value - 0.0).abs() < 1e-9);
        assert!((br[1].j - 1.0).abs() < 1e-9 && (br[1].value - 1.0).abs() < 1e-9);

        let fresh = Net::new(2).unwrap();
        let bm = register_descriptor(&fresh, &[2]).unwrap();
        let bs = register_descriptor(&fresh, &[1]).unwrap();
        assert!(matches!(classical_branches(&fresh, &bm, &bs), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn product_sharpness_is_diagnostic_only() {
        let s = one_bit_copy();
        let bm = register_descriptor(&s, &[2]).unwrap();
        let bs = register_descriptor(&s, &[1]).unwrap();
        let (v, r) = product_sharpness(&s, &bm, &bs).unwrap();
        assert!(v.is_none());
        assert!((r - 0.25).abs() < 1e-12);
    }

    /// M = {1, 2}, S = {3, 4}; every S value copied into M.
    fn two_bit_copy() -> Net {
        Net::new(4)
            .unwrap()
            .run(&[Gate::h(3), Gate::h(4), Gate::cnot(3, 1), Gate::cnot(4, 2)])
            .unwrap()
    }

    #[test]
    fn two_bit_branches() {
        let s = two_bit_copy();
        let bm = register_descriptor(&s, &[1, 2]).unwrap();
        let bs = register_descriptor(&s, &[3, 4]).unwrap();
        let br = classical_branches(&s, &bm, &bs).unwrap();
        assert_eq!(br.len(), 4);
        for (k, b) in br.iter().enumerate() {
            assert!((b.frame.weight - 0.25).abs() < 1e-12);
            assert!((b.j - k as f64).abs() < 1e-9);
            assert!((b.value - k as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn step_not_and_increment() {
        let s = one_bit_copy();
        let bs = register_descriptor(&s, &[1]).unwrap();
        let frames = make_pvm(&s, &bs.matrix, "b_S").unwrap();
        let f = ClassicalFunction::not_all(1).unwrap();
        let after = s.run(&compile_classical(&f, &[2], &[]).unwrap()).unwrap();
        let rep = verify_classical_step(&s, &after, &[2], &[], &f, &frames).unwrap();
        assert!(rep.ok());
        let vals: Vec<(f64, f64)> = rep.branches.iter().map(|b| (b.before, b.after)).collect();
        assert!((vals[0].0 - 0.0).abs() < 1e-9 && (vals[0].1 - 1.0).abs() < 1e-9);
        assert!((vals[1].0 - 1.0).abs() < 1e-9 && (vals[1].1 - 0.0).abs() < 1e-9);

        let s = two_bit_copy();
        let bs = register_descriptor(&s, &[3, 4]).unwrap();
        let frames = make_pvm(&s, &bs.matrix, "b_S").unwrap();
        let inc = ClassicalFunction::increment(2).unwrap();
        let after = s.run(&compile_classical(&inc, &[1, 2], &[]).unwrap()).unwrap();
        let rep = verify_classical_step(&s, &after, &[1, 2], &[], &inc, &frames).unwrap();
        assert!(rep.ok());
        for (k, b) in rep.branches.iter().enumerate() {
            assert_eq!(b.expected, (k + 1) % 4);
        }

        let id = ClassicalFunction::identity(2).unwrap();
        let rep = verify_classical_step(&s, &s, &[1, 2], &[], &id, &frames).unwrap();
        assert!(rep.ok());
    }

    #[test]
    fn coupling_gate_is_flagged() {
        let s = one_bit_copy();
        let bs = register_descriptor(&s, &[1]).unwrap();
        let frames = make_pvm(&s, &bs.matrix, "b_S").unwrap();
        let after = s.apply_gate(&Gate::cnot(2, 1)).unwrap();
        let f = ClassicalFunction::identity(1).unwrap();
        match verify_classical_step(&s, &after, &[2], &[], &f, &frames) {
            Ok(rep) => {
                assert!(!rep.ok());
                assert_eq!(rep.interacting_qubits, vec![1]);
            }
            Err(e) => assert!(matches!(e, Error::BranchNotSharp { .. })),
        }
    }

    #[test]
    fn register_does_not_fix_full_state() {
        let s = one_bit_copy();
        let t = s.apply_gate(&Gate::rz(2, 1.3)).unwrap();
        let bs = register_descriptor(&s, &[1]).unwrap();
        let frames = make_pvm(&s, &bs.matrix, "b_S").unwrap();
        let b0 = register_descriptor(&s, &[2]).unwrap();
        let b1 = register_descriptor(&t, &[2]).unwrap();
        for f in &frames {
            let e0 = crate::relative::relative_expectation(&s, &b0.matrix, f).unwrap();
            let e1 = crate::relative::relative_expectation(&t, &b1.matrix, f).unwrap();
            assert!((e0 - e1).norm() < 1e-12);
        }
        assert!(s.descriptor(2).dist(t.descriptor(2)) > 0.1);
    }
}
