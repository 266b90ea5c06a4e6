//! Dense complex matrices and state vectors.
//!
//! Matrices are square with power-of-two dimension and stored row-major.
//! Residuals are measured as the largest entry modulus ([`Matrix::max_abs`]).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{lit, real, Scalar};

/// Which Pauli generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i]
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }

    pub fn parse(s: &str) -> Option<Axis> {
        match s {
            "x" | "X" => Some(Axis::X),
            "y" | "Y" => Some(Axis::Y),
            "z" | "Z" => Some(Axis::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Square complex matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix({}x{})", self.dim, self.dim)?;
        for row in self.data.chunks(self.dim.max(1)) {
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim.is_power_of_two(), "matrix dimension {dim} is not a power of two");
        Matrix {
            dim,
            data: vec![Complex::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex::one();
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.data[r * dim + c] = f(r, c);
            }
        }
        m
    }

    /// Build from row-major entries. Panics unless `entries.len()` is a
    /// square of a power of two.
    pub fn from_rows(entries: Vec<Complex<T>>) -> Self {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        assert_eq!(dim * dim, entries.len(), "entries do not form a square matrix");
        assert!(dim.is_power_of_two(), "matrix dimension {dim} is not a power of two");
        Matrix { dim, data: entries }
    }

    pub fn diagonal(diag: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = d;
        }
        m
    }

    pub fn pauli(axis: Axis) -> Self {
        let (o, z) = (T::one(), T::zero());
        let c = |re: T, im: T| Complex::new(re, im);
        let entries = match axis {
            Axis::X => vec![c(z, z), c(o, z), c(o, z), c(z, z)],
            Axis::Y => vec![c(z, z), c(z, -o), c(z, o), c(z, z)],
            Axis::Z => vec![c(o, z), c(z, z), c(z, z), c(-o, z)],
        };
        Matrix::from_rows(entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of qubits spanned, i.e. log2 of the dimension.
    pub fn qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        Matrix::from_fn(n, |r, c| self.data[c * n + r].conj())
    }

    pub fn scale(&self, k: Complex<T>) -> Self {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * k).collect(),
        }
    }

    pub fn scale_real(&self, k: T) -> Self {
        self.scale(real(k))
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).fold(Complex::zero(), |a, b| a + b)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// Largest entry modulus of `self - other`.
    pub fn dist(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "dimension mismatch in dist");
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn hermitian_residual(&self) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        for r in 0..n {
            for c in r..n {
                let d = (self.data[r * n + c] - self.data[c * n + r].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn unitary_residual(&self) -> T {
        (&self.adjoint() * self).dist(&Matrix::identity(self.dim))
    }

    /// `|A^2 - 1|`.
    pub fn involution_residual(&self) -> T {
        (self * self).dist(&Matrix::identity(self.dim))
    }

    pub fn idempotence_residual(&self) -> T {
        (self * self).dist(self)
    }

    pub fn check_hermitian(&self, tol: T) -> Result<()> {
        let r = self.hermitian_residual();
        if r > tol || r.is_nan() {
            return Err(Error::NotHermitian { residual: crate::scalar::to_f64(r) });
        }
        Ok(())
    }

    pub fn check_unitary(&self, tol: T) -> Result<()> {
        let r = self.unitary_residual();
        if r > tol || r.is_nan() {
            return Err(Error::NonUnitary { residual: crate::scalar::to_f64(r) });
        }
        Ok(())
    }

    pub fn check_involution(&self, tol: T) -> Result<()> {
        self.check_hermitian(tol)?;
        let r = self.involution_residual();
        if r > tol || r.is_nan() {
            return Err(Error::NotInvolution { residual: crate::scalar::to_f64(r) });
        }
        Ok(())
    }

    pub fn apply(&self, v: &StateVector<T>) -> StateVector<T> {
        assert_eq!(self.dim, v.dim(), "dimension mismatch in apply");
        let n = self.dim;
        let amps = (0..n)
            .map(|r| {
                self.data[r * n..(r + 1) * n]
                    .iter()
                    .zip(&v.amps)
                    .fold(Complex::zero(), |acc, (a, b)| acc + *a * *b)
            })
            .collect();
        StateVector { amps }
    }

    /// `<v|A|v>`.
    pub fn expectation(&self, v: &StateVector<T>) -> Complex<T> {
        v.inner(&self.apply(v))
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = Complex<T>;
    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        &self.data[r * self.dim + c]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[r * self.dim + c]
    }
}

impl<'a, T: Scalar> Mul<&'a Matrix<T>> for &'a Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in mul");
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            let row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for (o, b) in row.iter_mut().zip(&rhs.data[k * n..(k + 1) * n]) {
                    *o += a * *b;
                }
            }
        }
        out
    }
}

impl<'a, T: Scalar> Add<&'a Matrix<T>> for &'a Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in add");
        Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect(),
        }
    }
}

impl<'a, T: Scalar> Sub<&'a Matrix<T>> for &'a Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sub");
        Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect(),
        }
    }
}

impl<T: Scalar> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(|z| -*z).collect(),
        }
    }
}

/// Kronecker product; `a` is the left (more significant) factor.
pub fn tensor<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let (da, db) = (a.dim, b.dim);
    let n = da * db;
    let mut out = Matrix::zeros(n);
    for ar in 0..da {
        for ac in 0..da {
            let x = a.data[ar * da + ac];
            if x.is_zero() {
                continue;
            }
            for br in 0..db {
                for bc in 0..db {
                    out.data[(ar * db + br) * n + ac * db + bc] = x * b.data[br * db + bc];
                }
            }
        }
    }
    out
}

/// `1^{slot-1} ⊗ op ⊗ 1^{n-slot}` for a single-qubit `op`; `slot` is 1-based.
pub fn embed<T: Scalar>(op: &Matrix<T>, slot: usize, n: usize) -> Matrix<T> {
    assert!(slot >= 1 && slot <= n, "slot {slot} out of range 1..={n}");
    let left = Matrix::identity(1 << (slot - 1));
    let right = Matrix::identity(1 << (n - slot));
    tensor(&tensor(&left, op), &right)
}

/// The three Pauli generators placed at `slot` of an `n`-qubit network.
pub fn embed_pauli<T: Scalar>(slot: usize, n: usize) -> [Matrix<T>; 3] {
    Axis::ALL.map(|a| embed(&Matrix::pauli(a), slot, n))
}

/// `u† a u`, after checking that `u` is unitary.
pub fn conjugate<T: Scalar>(u: &Matrix<T>, a: &Matrix<T>, tol_unitary: T) -> Result<Matrix<T>> {
    if u.dim() != a.dim() {
        return Err(Error::DimMismatch { expected: u.dim(), found: a.dim() });
    }
    u.check_unitary(tol_unitary)?;
    Ok(conjugate_unchecked(u, a))
}

pub(crate) fn conjugate_unchecked<T: Scalar>(u: &Matrix<T>, a: &Matrix<T>) -> Matrix<T> {
    &(&u.adjoint() * a) * u
}

/// Nearest unitary to an almost-unitary `u` (two Newton–Schulz steps
/// `u ← ½ u (3 − u†u)`). Conjugating by the polished matrix keeps round-off
/// in the descriptors from compounding from one gate to the next.
pub(crate) fn polish_unitary<T: Scalar>(u: &Matrix<T>) -> Matrix<T> {
    let three = Matrix::identity(u.dim()).scale_real(lit::<T>(3.0));
    let mut v = u.clone();
    for _ in 0..2 {
        v = (&v * &(&three - &(&v.adjoint() * &v))).scale_real(lit::<T>(0.5));
    }
    v
}

/// `½(1 + s·q)` for an involution `q` and sign `s = ±1`.
pub fn pauli_projector<T: Scalar>(q: &Matrix<T>, sign: i8, tol: T) -> Result<Matrix<T>> {
    q.check_involution(tol)?;
    Ok(pauli_projector_unchecked(q, sign))
}

pub(crate) fn pauli_projector_unchecked<T: Scalar>(q: &Matrix<T>, sign: i8) -> Matrix<T> {
    let s: T = if sign >= 0 { T::one() } else { -T::one() };
    let half = lit::<T>(0.5);
    let mut p = q.scale_real(s * half);
    for i in 0..p.dim {
        let d = p.dim;
        p.data[i * d + i] += real(half);
    }
    p
}

/// Largest violation of `q_i q_j = δ_ij·unit + i ε_ijk q_k` over all `i, j`.
pub fn pauli_algebra_residual<T: Scalar>(q: &[Matrix<T>; 3], unit: &Matrix<T>) -> T {
    let i_unit = Complex::new(T::zero(), T::one());
    let mut worst = T::zero();
    for i in 0..3 {
        for j in 0..3 {
            let lhs = &q[i] * &q[j];
            let rhs = if i == j {
                unit.clone()
            } else {
                // k is the remaining index; ε_ijk = +1 for cyclic (i, j, k).
                let k = 3 - i - j;
                let sign = if (j + 3 - i) % 3 == 1 { T::one() } else { -T::one() };
                q[k].scale(i_unit * sign)
            };
            worst = worst.max(lhs.dist(&rhs));
        }
    }
    worst
}

/// State vector of a `2^n`-dimensional space.
#[derive(Clone, PartialEq)]
pub struct StateVector<T> {
    amps: Vec<Complex<T>>,
}

impl<T: fmt::Debug> fmt::Debug for StateVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateVector{:?}", self.amps)
    }
}

impl<T: Scalar> StateVector<T> {
    pub fn new(amps: Vec<Complex<T>>) -> Self {
        assert!(amps.len().is_power_of_two(), "state dimension is not a power of two");
        StateVector { amps }
    }

    /// Standard basis vector `k` of dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amps = vec![Complex::zero(); dim];
        amps[k] = Complex::one();
        StateVector::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in inner");
        self.amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * *b)
    }

    pub fn norm(&self) -> T {
        self.amps.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
    }

    pub fn scale(&self, k: Complex<T>) -> Self {
        StateVector { amps: self.amps.iter().map(|&z| z * k).collect() }
    }

    /// Largest amplitude difference.
    pub fn dist(&self, other: &Self) -> T {
        self.amps
            .iter()
            .zip(&other.amps)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }

    /// Distance after removing the global phase that best aligns `other` with `self`.
    pub fn dist_up_to_phase(&self, other: &Self) -> T {
        let ov = other.inner(self);
        let phase = if ov.norm() > T::zero() { ov / real(ov.norm()) } else { Complex::one() };
        self.dist(&other.scale(phase))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = Matrix<f64>;

    fn diag_re(m: &M) -> Vec<f64> {
        (0..m.dim()).map(|i| m[(i, i)].re).collect()
    }

    #[test]
    fn tensor_slot_order() {
        let z = M::pauli(Axis::Z);
        let one = M::identity(2);
        assert_eq!(diag_re(&tensor(&z, &one)), vec![1.0, 1.0, -1.0, -1.0]);
        assert_eq!(diag_re(&tensor(&one, &z)), vec![1.0, -1.0, 1.0, -1.0]);
    }

    #[test]
    fn embed_pauli_first_slot_of_two() {
        let q = embed_pauli::<f64>(1, 2);
        for a in Axis::ALL {
            assert_eq!(q[a.index()], tensor(&M::pauli(a), &M::identity(2)));
        }
    }

    #[test]
    fn conjugate_examples() {
        let x = M::pauli(Axis::X);
        let z = M::pauli(Axis::Z);
        let a = &z + &x;
        assert_eq!(conjugate(&M::identity(2), &a, 1e-10).unwrap(), a);
        assert_eq!(conjugate(&x, &z, 1e-10).unwrap(), -&z);
        assert_eq!(conjugate(&x, &x, 1e-10).unwrap(), x);
    }

    #[test]
    fn conjugate_rejects_non_unitary() {
        let z = M::pauli(Axis::Z);
        let bad = M::identity(2).scale_real(2.0);
        assert!(matches!(conjugate(&bad, &z, 1e-10), Err(Error::NonUnitary { .. })));
        let big = M::identity(4);
        assert!(matches!(conjugate(&big, &z, 1e-10), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn projector_examples() {
        let z = M::pauli(Axis::Z);
        assert_eq!(diag_re(&pauli_projector(&z, 1, 1e-10).unwrap()), vec![1.0, 0.0]);
        assert_eq!(diag_re(&pauli_projector(&z, -1, 1e-10).unwrap()), vec![0.0, 1.0]);
        let y = M::pauli(Axis::Y);
        let sum = &pauli_projector(&y, 1, 1e-10).unwrap() + &pauli_projector(&y, -1, 1e-10).unwrap();
        assert!(sum.dist(&M::identity(2)) < 1e-15);
    }

    #[test]
    fn projector_rejects_non_involution() {
        let h = M::diagonal(&[real(1.0), real(2.0)]);
        assert!(matches!(pauli_projector(&h, 1, 1e-10), Err(Error::NotInvolution { .. })));
    }

    #[test]
    fn pauli_generators_satisfy_algebra() {
        let q = Axis::ALL.map(M::pauli);
        assert!(pauli_algebra_residual(&q, &M::identity(2)) < 1e-15);
        // Swapping x and y flips the handedness and breaks the algebra.
        let swapped = [q[1].clone(), q[0].clone(), q[2].clone()];
        assert!(pauli_algebra_residual(&swapped, &M::identity(2)) > 1.0);
    }

    #[test]
    fn phase_insensitive_distance() {
        let v = StateVector::<f64>::new(vec![real(0.6), real(0.8)]);
        let w = v.scale(Complex::new(0.0, 1.0));
        assert!(v.dist(&w) > 0.5);
        assert!(v.dist_up_to_phase(&w) < 1e-15);
    }
}
