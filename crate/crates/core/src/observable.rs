//! Observables written as real combinations of products of descriptor
//! components, e.g. `q1z*q2z` or `0.5*q1x - q2y`.
//!
//! The same expression can be evaluated on a network at any time (Heisenberg
//! picture) or as a fixed operator by the Schrödinger oracle.

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::{Axis, Matrix};
use crate::network::NetworkState;
use crate::scalar::Scalar;

/// `coeff · Π q_{qubit,axis}`; an empty factor list is the unit observable.
#[derive(Debug, Clone, PartialEq)]
pub struct Term<T> {
    pub coeff: T,
    pub factors: Vec<(usize, Axis)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observable<T> {
    pub terms: Vec<Term<T>>,
}

impl<T: Scalar> Observable<T> {
    pub fn component(qubit: usize, axis: Axis) -> Self {
        Observable { terms: vec![Term { coeff: T::one(), factors: vec![(qubit, axis)] }] }
    }

    pub fn product(factors: &[(usize, Axis)]) -> Self {
        Observable { terms: vec![Term { coeff: T::one(), factors: factors.to_vec() }] }
    }

    /// All `3n` descriptor components, qubit-major.
    pub fn all_components(n: usize) -> Vec<Self> {
        (1..=n).flat_map(|a| Axis::ALL.map(|ax| Self::component(a, ax))).collect()
    }

    pub fn max_qubit(&self) -> usize {
        self.terms.iter().flat_map(|t| t.factors.iter().map(|f| f.0)).max().unwrap_or(0)
    }

    /// Evaluate on the network's current descriptors.
    pub fn at(&self, s: &NetworkState<T>) -> Result<Matrix<T>> {
        for t in &self.terms {
            for &(q, _) in &t.factors {
                s.check_qubit(q)?;
            }
        }
        Ok(self.evaluate(s.dim(), |q, a| s.component(q, a).clone()))
    }

    /// Evaluate with an arbitrary component provider.
    pub fn evaluate(&self, dim: usize, component: impl Fn(usize, Axis) -> Matrix<T>) -> Matrix<T> {
        let mut acc = Matrix::zeros(dim);
        for t in &self.terms {
            let prod = t
                .factors
                .iter()
                .fold(Matrix::identity(dim), |m, &(q, a)| &m * &component(q, a));
            acc = &acc + &prod.scale_real(t.coeff);
        }
        acc
    }

    /// Parse `[coeff*]factor[*factor...] (+|- ...)`, factors being `q<k><x|y|z>` or `1`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::BadOperands(format!("observable `{text}`: {msg}"));
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(bad("empty expression".into()));
        }
        // Split on + / - that start a term (not the sign of an exponent).
        let mut pieces: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        let chars: Vec<char> = cleaned.chars().collect();
        for (i, &c) in chars.iter().enumerate() {
            let is_exp_sign = i > 0 && matches!(chars[i - 1], 'e' | 'E') && i > 1 && chars[i - 2].is_ascii_digit();
            if (c == '+' || c == '-') && !is_exp_sign {
                if !cur.is_empty() {
                    pieces.push((neg, std::mem::take(&mut cur)));
                } else if i > 0 {
                    return Err(bad("dangling operator".into()));
                }
                neg = c == '-';
            } else {
                cur.push(c);
            }
        }
        if cur.is_empty() {
            return Err(bad("dangling operator".into()));
        }
        pieces.push((neg, cur));

        let mut terms = Vec::new();
        for (neg, piece) in pieces {
            let mut coeff = if neg { -T::one() } else { T::one() };
            let mut factors = Vec::new();
            for f in piece.split('*') {
                if f.is_empty() {
                    return Err(bad("empty factor".into()));
                }
                if let Some(rest) = f.strip_prefix('q') {
                    let (idx, axis) = rest.split_at(rest.len().saturating_sub(1));
                    let axis = Axis::parse(axis).ok_or_else(|| bad(format!("bad axis in `{f}`")))?;
                    let qubit: usize =
                        idx.parse().map_err(|_| bad(format!("bad qubit index in `{f}`")))?;
                    if qubit == 0 {
                        return Err(bad("qubits are numbered from 1".into()));
                    }
                    factors.push((qubit, axis));
                } else {
                    let v: f64 = f.parse().map_err(|_| bad(format!("bad factor `{f}`")))?;
                    coeff *= T::from(v).ok_or_else(|| bad("coefficient out of range".into()))?;
                }
            }
            terms.push(Term { coeff, factors });
        }
        Ok(Observable { terms })
    }
}

impl<T: Scalar> fmt::Display for Observable<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            let neg = t.coeff < T::zero();
            let mag = t.coeff.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let mut parts: Vec<String> = Vec::new();
            if mag != T::one() || t.factors.is_empty() {
                parts.push(format!("{mag}"));
            }
            parts.extend(t.factors.iter().map(|(q, a)| format!("q{q}{a}")));
            f.write_str(&parts.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let o = Observable::<f64>::parse("q1z*q2z").unwrap();
        assert_eq!(o.terms.len(), 1);
        assert_eq!(o.terms[0].factors, vec![(1, Axis::Z), (2, Axis::Z)]);
        assert_eq!(o.to_string(), "q1z*q2z");

        let o = Observable::<f64>::parse("-0.5*q2x + 2*q10y - 1").unwrap();
        assert_eq!(o.terms.len(), 3);
        assert_eq!(o.terms[0].coeff, -0.5);
        assert_eq!(o.terms[1].factors, vec![(10, Axis::Y)]);
        assert_eq!(o.terms[2].coeff, -1.0);
        assert!(o.terms[2].factors.is_empty());
        assert_eq!(o.max_qubit(), 10);
        assert_eq!(Observable::<f64>::parse("1e-3*q1x").unwrap().terms[0].coeff, 1e-3);
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "q0z", "q1w", "q1z*", "q1z+", "qz", "foo"] {
            assert!(Observable::<f64>::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn evaluates_on_network() {
        let s = NetworkState::<f64>::new(2).unwrap();
        let o = Observable::parse("q1z*q2z").unwrap();
        let m = o.at(&s).unwrap();
        assert_eq!(m, s.component(1, Axis::Z) * s.component(2, Axis::Z));
        assert!(Observable::<f64>::parse("q3z").unwrap().at(&s).is_err());
    }
}
