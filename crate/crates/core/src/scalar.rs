//! Scalar abstractions shared by the jet, recursion and verification layers.
//!
//! The algebraic part of the construction (jets, the potential expansion and the
//! coefficient recursion) only needs a field with characteristic zero, so it is
//! written against [`Scalar`] and runs unchanged on `f32`, `f64` and exact
//! rationals. Sampling, finite differences and growth fits need transcendental
//! functions and use [`Real`].

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, Num, ToPrimitive};

/// A real field element usable as the coefficient type of a jet.
pub trait Scalar:
    Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static
{
    /// Embeds an integer.
    fn from_integer(n: i64) -> Self;

    /// Nearest `f64`, used for norms and tolerance checks.
    fn to_float(&self) -> f64;
}

/// A floating-point [`Scalar`].
pub trait Real: Scalar + Float {
    fn from_float(x: f64) -> Self;
}

impl Scalar for f64 {
    fn from_integer(n: i64) -> Self {
        n as f64
    }

    fn to_float(&self) -> f64 {
        *self
    }
}

impl Real for f64 {
    fn from_float(x: f64) -> Self {
        x
    }
}

impl Scalar for f32 {
    fn from_integer(n: i64) -> Self {
        n as f32
    }

    fn to_float(&self) -> f64 {
        f64::from(*self)
    }
}

impl Real for f32 {
    fn from_float(x: f64) -> Self {
        x as f32
    }
}

impl Scalar for BigRational {
    fn from_integer(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn to_float(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Modulus of a complex scalar, as `f64`.
pub(crate) fn modulus<T: Scalar>(z: &Complex<T>) -> f64 {
    z.re.to_float().hypot(z.im.to_float())
}

pub(crate) fn cint<T: Scalar>(n: i64) -> Complex<T> {
    Complex::new(T::from_integer(n), T::zero())
}

pub(crate) fn imag_unit<T: Scalar>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}
