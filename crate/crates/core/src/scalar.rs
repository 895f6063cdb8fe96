//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar the schemes and estimators are generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used for constants and sampled noise.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Euclidean norm.
pub fn norm<T: Scalar>(x: &[T]) -> T {
    if let [v] = x {
        return v.abs();
    }
    x.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt()
}

/// Euclidean distance `‖a − b‖`.
pub fn distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    if let ([x], [y]) = (a, b) {
        return (*x - *y).abs();
    }
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y)).sqrt()
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn all_finite<T: Scalar>(x: &[T]) -> bool {
    x.iter().all(|v| v.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_norm_is_exact_absolute_value() {
        for x in [1.5_f64, -3.25, 1e-300, -7.0e150] {
            assert_eq!(norm(&[x]), x.abs());
        }
        assert_eq!(norm(&[3.0_f32, 4.0]), 5.0);
    }

    #[test]
    fn distance_and_dot() {
        assert_eq!(distance(&[1.0, 2.0], &[4.0, 6.0]), 5.0);
        assert_eq!(dot(&[1.0, 2.0], &[3.0, -1.0]), 1.0);
        assert!(!all_finite(&[1.0, f64::NAN]));
    }
}
