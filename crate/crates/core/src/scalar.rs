//! Floating-point scalar abstraction shared by every numerical routine.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};

/// Real scalar type the numerics are generic over: `f32` or `f64`.
pub trait Scalar:
    RealField
    + Copy
    + FromPrimitive
    + ToPrimitive
    + Display
    + Debug
    + Send
    + Sync
    + serde::Serialize
    + serde::de::DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal; infallible for the supported float types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::lit(n as f64)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    fn infinity() -> Self {
        Self::lit(f64::INFINITY)
    }

    fn neg_infinity() -> Self {
        Self::lit(f64::NEG_INFINITY)
    }

    fn nan() -> Self {
        Self::lit(f64::NAN)
    }

    /// Tolerance used for eigen-residual convergence, scaled to the precision.
    fn solver_tolerance() -> Self {
        Self::lit(Self::default_epsilon().as_f64().powf(0.68))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `exp(i phase)`.
#[inline]
pub fn cis<T: Scalar>(phase: T) -> Complex<T> {
    Complex::new(phase.cos(), phase.sin())
}

#[inline]
pub(crate) fn czero<T: Scalar>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}
