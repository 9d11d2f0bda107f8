//! Scalar abstraction: all model arithmetic is generic over a floating-point
//! type so that the same code runs in `f32` or `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar used throughout the crate: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
}

/// Converts an `f64` constant (tolerance, literal) into the working scalar.
pub fn real<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("f64 constant must be representable in the scalar type")
}

/// Average of a slice.
pub fn mean<T: Real>(values: &[T]) -> T {
    if values.is_empty() {
        return T::zero();
    }
    values.iter().copied().sum::<T>() / real::<T>(values.len() as f64)
}

/// Sample standard deviation (n-1 denominator); zero for fewer than two values.
pub fn sample_std<T: Real>(values: &[T]) -> T {
    if values.len() < 2 {
        return T::zero();
    }
    let m = mean(values);
    let ss = values.iter().map(|&v| (v - m) * (v - m)).sum::<T>();
    (ss / real::<T>((values.len() - 1) as f64)).sqrt()
}
