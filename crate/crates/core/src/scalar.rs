//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the entropy machinery is generic over (`f32` or `f64`).
///
/// `TOL` is the absolute tolerance used for normalization, clamping and
/// inequality satisfaction. For `f64` it is `1e-9`; `f32` cannot resolve that
/// and uses `1e-5` instead.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Global comparison tolerance.
    const TOL: Self;

    /// Converts an `f64` literal, panicking only for values the type cannot hold.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const TOL: Self = 1e-9;
}

impl Real for f32 {
    const TOL: Self = 1e-5;
}

/// Clamps `x` to zero when it lies within `T::TOL` below zero.
///
/// Returns `None` when `x` is more negative than the tolerance.
pub(crate) fn clamp_nonnegative<T: Real>(x: T) -> Option<T> {
    if x >= T::zero() {
        Some(x)
    } else if x >= -T::TOL {
        Some(T::zero())
    } else {
        None
    }
}
