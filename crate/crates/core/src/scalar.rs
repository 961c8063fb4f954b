//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point type the models are evaluated in: `f32` or `f64`.
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
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal. Panics only if the target cannot hold it.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    #[inline]
    fn deg(degrees: f64) -> Self {
        Self::of(degrees.to_radians())
    }

    #[inline]
    fn to_deg(self) -> f64 {
        self.as_f64().to_degrees()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `acos` with the argument clamped into [-1, 1].
#[inline]
pub(crate) fn acos_clamped<T: Real>(x: T) -> T {
    x.max(-T::one()).min(T::one()).acos()
}

/// Wraps an angle into [0, 2π).
#[inline]
pub(crate) fn wrap_two_pi<T: Real>(a: T) -> T {
    let tau = T::TAU();
    let w = a % tau;
    let w = if w < T::zero() { w + tau } else { w };
    if w >= tau {
        T::zero()
    } else {
        w
    }
}
