//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

use crate::linalg::LinearSolve;

/// Real floating-point scalar the numerical core is generic over.
///
/// Implemented for `f32` and `f64`. Everything that touches files or the
/// command line is instantiated at `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + LinearSolve + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Conversion from an integer index.
    #[inline]
    fn from_index(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex scalar over a [`Real`] component type.
pub type Complex<T> = num_complex::Complex<T>;
