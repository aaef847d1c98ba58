use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the score math is generic over: f32 or f64.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

/// Lossy conversion from f64 literals into the working scalar.
pub(crate) fn s<S: Scalar>(x: f64) -> S {
    S::from_f64(x).expect("f64 converts into any Scalar")
}
