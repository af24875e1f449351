use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumCast};

/// Floating point type a scalar field can be stored in: `f32` or `f64`.
///
/// `Display` must print a representation that parses back to the identical
/// value, which holds for the std float types.
pub trait Scalar:
    Float + FromPrimitive + NumCast + FromStr + Display + Debug + Default + Send + Sync + 'static
{
    fn from_f64_lossy(x: f64) -> Self {
        <Self as NumCast>::from(x).unwrap_or_else(Self::nan)
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
