//! Scalar abstraction for all numeric kernels.
//!
//! Every matrix routine in this crate is generic over [`Scalar`], which is
//! implemented for `f32` and `f64`. Concrete `f64` aliases live at the crate
//! root; the tight default tolerances throughout the crate are calibrated for
//! `f64`.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point element type of matrices and data.
pub trait Scalar:
    Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Sum<Self>
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Lossy conversion from `f64` used for constants and RNG output.
#[inline]
pub fn real<F: Scalar>(x: f64) -> F {
    F::from_f64(x).expect("f64 is representable in any Scalar")
}

/// Conversion from a count.
#[inline]
pub fn real_of<F: Scalar>(n: usize) -> F {
    F::from_usize(n).expect("usize is representable in any Scalar")
}
