//! Spectral decomposition of Hermitian matrices into eigenvalue/projector
//! pairs, via cyclic complex Jacobi rotations.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{lit, real, Scalar};
use crate::tolerance::Tolerances;

const MAX_SWEEPS: usize = 100;

/// Distinct eigenvalues (ascending) and their eigenspace projectors.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition<T> {
    pub eigenvalues: Vec<T>,
    pub projectors: Vec<Matrix<T>>,
}

impl<T: Scalar> SpectralDecomposition<T> {
    /// `Σ λ_i P_i`.
    pub fn reconstruct(&self) -> Matrix<T> {
        let dim = self.projectors[0].dim();
        self.eigenvalues
            .iter()
            .zip(&self.projectors)
            .fold(Matrix::zeros(dim), |acc, (&l, p)| &acc + &p.scale_real(l))
    }

    /// `|Σ P_i - 1|`.
    pub fn completeness_residual(&self) -> T {
        let dim = self.projectors[0].dim();
        let sum = self.projectors.iter().fold(Matrix::zeros(dim), |acc, p| &acc + p);
        sum.dist(&Matrix::identity(dim))
    }

    /// Largest `|P_i P_j|` over `i ≠ j`.
    pub fn orthogonality_residual(&self) -> T {
        let mut worst = T::zero();
        for (i, a) in self.projectors.iter().enumerate() {
            for b in &self.projectors[i + 1..] {
                worst = worst.max((a * b).max_abs());
            }
        }
        worst
    }

    pub fn idempotence_residual(&self) -> T {
        self.projectors.iter().fold(T::zero(), |m, p| m.max(p.idempotence_residual()))
    }

    pub fn rank(&self, i: usize) -> usize {
        self.projectors[i].trace().re.round().to_usize().unwrap_or(0)
    }
}

/// Eigenvalues (unsorted) and unit eigenvectors (columns of the returned
/// matrix) of a Hermitian matrix.
pub fn hermitian_eigen<T: Scalar>(h: &Matrix<T>) -> Result<(Vec<T>, Matrix<T>)> {
    let n = h.dim();
    let mut a = h.clone();
    let mut v = Matrix::identity(n);
    let scale = h.max_abs().max(T::min_positive_value());
    let target = T::epsilon() * scale * lit(n as f64);

    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= target {
            let vals = (0..n).map(|i| a[(i, i)].re).collect();
            return Ok((vals, v));
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if off_diagonal_norm(&a) <= target * lit(1e3) {
        let vals = (0..n).map(|i| a[(i, i)].re).collect();
        return Ok((vals, v));
    }
    Err(Error::NoConvergence)
}

fn off_diagonal_norm<T: Scalar>(a: &Matrix<T>) -> T {
    let n = a.dim();
    let mut s = T::zero();
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Jacobi step zeroing `a[p][q]`: `a ← J† a J`, `v ← v J`, where
/// `J = D R` with `D = diag(1, e^{-iφ})` removing the phase of `a[p][q]` and
/// `R` the real symmetric rotation.
fn rotate<T: Scalar>(a: &mut Matrix<T>, v: &mut Matrix<T>, p: usize, q: usize) {
    let g = a[(p, q)];
    let mag = g.norm();
    if mag.is_zero() {
        return;
    }
    let phase = g / real(mag);
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (lit::<T>(2.0) * mag);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    let eph = phase.conj();
    let jpp = real(c);
    let jpq = real(s);
    let jqp = eph * real(-s);
    let jqq = eph * real(c);

    let n = a.dim();
    // a ← a J (columns p, q)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    // a ← J† a (rows p, q)
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)] = real(a[(p, p)].re);
    a[(q, q)] = real(a[(q, q)].re);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

/// Spectral projectors of a Hermitian matrix. Sorted eigenvalues are merged
/// by single linkage whenever consecutive values differ by at most
/// `tol.eigengap`; each cluster reports its mean eigenvalue.
pub fn spectral<T: Scalar>(h: &Matrix<T>, tol: &Tolerances<T>) -> Result<SpectralDecomposition<T>> {
    h.check_hermitian(tol.hermitian)?;
    let n = h.dim();
    let (vals, vecs) = hermitian_eigen(h)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).expect("finite eigenvalues"));

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match clusters.last_mut() {
            Some(cl) if vals[i] - vals[*cl.last().unwrap()] <= tol.eigengap => cl.push(i),
            _ => clusters.push(vec![i]),
        }
    }

    let mut eigenvalues = Vec::with_capacity(clusters.len());
    let mut projectors = Vec::with_capacity(clusters.len());
    for cl in clusters {
        let mean = cl.iter().fold(T::zero(), |s, &i| s + vals[i]) / lit(cl.len() as f64);
        let mut p = Matrix::zeros(n);
        for &k in &cl {
            for r in 0..n {
                let vr = vecs[(r, k)];
                if vr.is_zero() {
                    continue;
                }
                for c in 0..n {
                    p[(r, c)] += vr * vecs[(c, k)].conj();
                }
            }
        }
        eigenvalues.push(mean);
        projectors.push(p);
    }
    Ok(SpectralDecomposition { eigenvalues, projectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{embed, pauli_projector, Axis};
    use crate::scalar::cplx;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type M = Matrix<f64>;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    #[test]
    fn pauli_z() {
        let d = spectral(&M::pauli(Axis::Z), &tol()).unwrap();
        assert_eq!(d.eigenvalues.len(), 2);
        assert!((d.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((d.eigenvalues[1] - 1.0).abs() < 1e-14);
        assert!(d.projectors[1].dist(&M::diagonal(&[real(1.0), real(0.0)])) < 1e-14);
        assert!(d.projectors[0].dist(&M::diagonal(&[real(0.0), real(1.0)])) < 1e-14);
    }

    #[test]
    fn identity_single_cluster() {
        let d = spectral(&M::identity(8), &tol()).unwrap();
        assert_eq!(d.eigenvalues, vec![1.0]);
        assert!(d.projectors[0].dist(&M::identity(8)) < 1e-14);
    }

    #[test]
    fn two_bit_register_spectrum() {
        // 2·P_-(q_2z) + P_-(q_1z): basis index k has bits (q1, q2) = (k>>1, k&1),
        // so its binary value is 2·(k&1) + (k>>1).
        let z = M::pauli(Axis::Z);
        let p1 = pauli_projector(&embed(&z, 1, 2), -1, 1e-10).unwrap();
        let p2 = pauli_projector(&embed(&z, 2, 2), -1, 1e-10).unwrap();
        let b = &p2.scale_real(2.0) + &p1;
        let d = spectral(&b, &tol()).unwrap();
        assert_eq!(d.eigenvalues.len(), 4);
        for (j, &l) in d.eigenvalues.iter().enumerate() {
            assert!((l - j as f64).abs() < 1e-12);
            assert_eq!(d.rank(j), 1);
            let k = (0..4).find(|k| 2 * (k & 1) + (k >> 1) == j).unwrap();
            assert!((d.projectors[j][(k, k)].re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = M::from_rows(vec![real(0.0), real(1.0), real(0.0), real(0.0)]);
        assert!(matches!(spectral(&m, &tol()), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn degenerate_clusters() {
        let m = M::diagonal(&[real(2.0), real(-1.0), real(2.0), real(2.0 + 1e-12)]);
        let d = spectral(&m, &tol()).unwrap();
        assert_eq!(d.eigenvalues.len(), 2);
        assert_eq!(d.rank(0), 1);
        assert_eq!(d.rank(1), 3);
    }

    #[test]
    fn random_hermitian_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in [1usize, 2, 4, 8, 16] {
            for _ in 0..5 {
                let mut h = M::zeros(dim);
                for r in 0..dim {
                    h[(r, r)] = real(rng.gen_range(-2.0..2.0));
                    for c in r + 1..dim {
                        let z = cplx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                        h[(r, c)] = z;
                        h[(c, r)] = z.conj();
                    }
                }
                let d = spectral(&h, &tol()).unwrap();
                assert!(d.reconstruct().dist(&h) <= 1e-9, "dim {dim}");
                assert!(d.completeness_residual() <= 1e-10);
                assert!(d.orthogonality_residual() <= 1e-10);
                assert!(d.idempotence_residual() <= 1e-10);
            }
        }
    }
}
