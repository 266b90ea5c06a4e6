//! Tolerance set shared by every module. Defaults are tuned for `f64`; for
//! narrower scalars each default is raised to at least `1000 * epsilon`.

use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    /// Generic residual bound (idempotence, algebra, orthogonality).
    pub general: T,
    pub hermitian: T,
    pub unitary: T,
    /// Gap below which sorted eigenvalues are merged into one cluster.
    pub eigengap: T,
    pub sharp: T,
    pub entangle: T,
    pub commute: T,
    /// Branch weights at or below this are treated as zero.
    pub weight: T,
    pub norm: T,
    /// Heisenberg vs Schrödinger agreement.
    pub oracle: T,
}

/// Names accepted by [`Tolerances::set`], in declaration order.
pub const TOLERANCE_NAMES: [&str; 10] = [
    "general", "hermitian", "unitary", "eigengap", "sharp", "entangle", "commute", "weight",
    "norm", "oracle",
];

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        let floor = T::epsilon() * lit(1000.0);
        let pick = |x: f64| lit::<T>(x).max(floor);
        Tolerances {
            general: pick(1e-10),
            hermitian: pick(1e-10),
            unitary: pick(1e-10),
            eigengap: pick(1e-8),
            sharp: pick(1e-9),
            entangle: pick(1e-9),
            commute: pick(1e-9),
            weight: pick(1e-12),
            norm: pick(1e-10),
            oracle: pick(1e-9),
        }
    }
}

impl<T: Scalar> Tolerances<T> {
    /// Override one tolerance by name. Returns `false` for unknown names or
    /// non-positive values.
    pub fn set(&mut self, name: &str, value: T) -> bool {
        if !(value > T::zero()) {
            return false;
        }
        let slot = match name {
            "general" | "tol" => &mut self.general,
            "hermitian" => &mut self.hermitian,
            "unitary" => &mut self.unitary,
            "eigengap" => &mut self.eigengap,
            "sharp" => &mut self.sharp,
            "entangle" => &mut self.entangle,
            "commute" => &mut self.commute,
            "weight" => &mut self.weight,
            "norm" => &mut self.norm,
            "oracle" => &mut self.oracle,
            _ => return false,
        };
        *slot = value;
        true
    }

    pub fn entries(&self) -> [(&'static str, T); 10] {
        [
            ("general", self.general),
            ("hermitian", self.hermitian),
            ("unitary", self.unitary),
            ("eigengap", self.eigengap),
            ("sharp", self.sharp),
            ("entangle", self.entangle),
            ("commute", self.commute),
            ("weight", self.weight),
            ("norm", self.norm),
            ("oracle", self.oracle),
        ]
    }
}
