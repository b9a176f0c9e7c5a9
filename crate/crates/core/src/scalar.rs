//! Floating-point scalar abstraction for the whole crate.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Scalar type the simulation is generic over: `f32` or `f64`.
///
/// The quantitative claims in the test suite (1e-12 round trips and the
/// like) only hold for `f64`; `f32` builds are for memory-bound scans.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + rustfft::FftNum + Display + LowerExp + Debug
{
    /// Lossless (for f32/f64) conversion used when crossing an API that is
    /// fixed to `f64`, e.g. error reporting and CSV output.
    fn to_f64(self) -> f64;

    fn from_f64_lossy(x: f64) -> Self;
}

impl Scalar for f32 {
    fn to_f64(self) -> f64 {
        self as f64
    }
    fn from_f64_lossy(x: f64) -> Self {
        x as f32
    }
}

impl Scalar for f64 {
    fn to_f64(self) -> f64 {
        self
    }
    fn from_f64_lossy(x: f64) -> Self {
        x
    }
}

/// `2π` in the scalar type.
pub fn two_pi<S: Scalar>() -> S {
    S::PI() + S::PI()
}

/// `4π` in the scalar type.
pub fn four_pi<S: Scalar>() -> S {
    two_pi::<S>() + two_pi::<S>()
}
