use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumCast};

/// Real scalar the estimators are generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FromPrimitive + NumCast + Debug + Display + Sum + Send + Sync + 'static
{
    /// Converts an `f64` constant into the scalar type.
    fn lit(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("f64 constant representable in scalar type")
    }

    fn count(n: usize) -> Self {
        <Self as NumCast>::from(n).expect("count representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        <f64 as NumCast>::from(self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
