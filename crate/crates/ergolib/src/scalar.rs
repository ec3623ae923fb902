//! Scalar abstraction: every numeric kernel in this crate is generic over the
//! underlying real field, instantiated at `f32` or `f64`.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps};

/// Real scalar type backing all complex arithmetic: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssignOps + Debug + Display + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for complex numbers over the crate's scalar type.
pub type C<T> = Complex<T>;

/// Converts an `f64` literal into the working scalar type.
///
/// Panics only if the target type cannot represent any `f64` at all, which
/// does not happen for `f32`/`f64`.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal must convert into the scalar type")
}

/// Complex number from `f64` literals.
#[inline]
pub fn complex<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(real(re), real(im))
}
