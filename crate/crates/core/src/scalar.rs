//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real field the solver is generic over. Implemented for `f32` and `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Every `f64` is representable (possibly rounded) in the
    /// supported types, so this never fails for them.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable in scalar type")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable in scalar type")
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Maximum of a sequence, ignoring nothing: a NaN anywhere propagates.
pub(crate) fn max_of<S: Scalar>(iter: impl IntoIterator<Item = S>) -> S {
    iter.into_iter().fold(S::zero(), |acc, v| {
        if v.is_nan() || acc.is_nan() {
            S::nan()
        } else {
            acc.max(v)
        }
    })
}
