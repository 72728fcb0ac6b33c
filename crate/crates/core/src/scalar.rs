//! Floating-point scalar abstraction shared by the numeric modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar used for modularity, correlation and forest arithmetic.
///
/// Implemented for `f32` and `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Lossless for every integer weight the graph layer produces up to 2^53 (f64) or 2^24 (f32).
    #[inline]
    fn of_u64(v: u64) -> Self {
        <Self as FromPrimitive>::from_u64(v).expect("float conversion from u64 is total")
    }

    #[inline]
    fn of_usize(v: usize) -> Self {
        <Self as FromPrimitive>::from_usize(v).expect("float conversion from usize is total")
    }

    #[inline]
    fn of_f64(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("float conversion from f64 is total")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).expect("float conversion to f64 is total")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Round half away from zero to `digits` decimals.
pub fn round_to(x: f64, digits: i32) -> f64 {
    let scale = 10f64.powi(digits);
    (x * scale).round() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_to(0.27525, 3), 0.275);
        assert_eq!(round_to(0.1675, 2), 0.17);
        assert_eq!(round_to(0.0, 3), 0.0);
    }

    #[test]
    fn conversions() {
        assert_eq!(<f32 as Scalar>::of_u64(3), 3.0f32);
        assert_eq!(<f64 as Scalar>::of_usize(7).as_f64(), 7.0);
    }
}
