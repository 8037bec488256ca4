//! Scalar abstraction for the numeric core.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::float::{Float, FloatConst};
use num_traits::{FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar the numeric core is generic over.
///
/// Implemented for `f32` and `f64`. The documented accuracy figures
/// (eigensolver residuals, special-function error bounds, quantile
/// round-trips) are stated for `f64`; the `f32` instantiation degrades
/// gracefully to single-precision accuracy.
pub trait Scalar:
    'static
    + Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
{
    /// Lossless-as-possible conversion from an `f64` constant.
    fn from_f64_c(v: f64) -> Self {
        Self::from(v).expect("f64 constant not representable in scalar type")
    }

    /// Conversion from a usize count.
    fn from_count(v: usize) -> Self {
        Self::from_usize(v).expect("count not representable in scalar type")
    }

    /// Relative tolerance for symmetry and consistency checks: tight for
    /// `f64`, proportionally looser for `f32`.
    fn consistency_tol() -> Self {
        Self::from_f64_c(1e-12).max(Self::epsilon() * Self::from_f64_c(50.0))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
