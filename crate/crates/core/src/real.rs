//! Scalar abstraction shared by every geometric routine.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Lossy conversion to `f64` for reporting.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Converts an integer into `T`.
#[inline]
pub fn from_int<T: Real>(n: i64) -> T {
    T::from_i64(n).expect("integer representable in scalar type")
}

/// `2^e` as `T`, exact for the exponent range used by dyadic arithmetic.
#[inline]
pub fn pow2<T: Real>(e: i32) -> T {
    T::from_f64(2f64.powi(e)).expect("power of two representable")
}

/// Total order on scalars for heaps and sorting; NaN compares equal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrdReal<T>(pub T);

impl<T: Real> Eq for OrdReal<T> {}

impl<T: Real> PartialOrd for OrdReal<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Real> Ord for OrdReal<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .partial_cmp(&other.0)
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}
