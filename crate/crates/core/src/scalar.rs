//! Scalar abstraction for the numeric kernels.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar usable by every kernel in this crate.
///
/// Implemented by `f32` and `f64` through the blanket impl; the solvers,
/// factorizations and problem generators are all written against this
/// trait and instantiated through the aliases at the crate root.
pub trait Real:
    Float + NumAssign + Sum + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float
        + NumAssign
        + Sum
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` constant into the working scalar type.
#[inline]
pub fn real<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("f64 constant must be representable in the scalar type")
}

/// Converts a count into the working scalar type.
#[inline]
pub fn real_usize<T: Real>(v: usize) -> T {
    T::from_usize(v).expect("count must be representable in the scalar type")
}
