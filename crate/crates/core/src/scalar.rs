//! Real scalar abstraction. Everything numeric in this crate is generic over
//! a [`Scalar`]; complex entries are `Complex<T>`.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, NumAssign};

/// Floating point scalar usable as the real part of matrix entries: f32 or f64.
pub trait Scalar:
    Float + FloatConst + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FloatConst + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
}

/// Convert an `f64` literal into `T`.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from(x).expect("f64 literal representable in scalar type")
}

#[inline]
pub fn cplx<T: Scalar>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub fn real<T: Scalar>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
