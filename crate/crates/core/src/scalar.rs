use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar used throughout the crate: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `x^nu` with fast paths for the common integer exponents.
#[inline]
pub fn pow_nu<T: Scalar>(x: T, nu: T) -> T {
    if nu == T::one() {
        x
    } else if nu == T::lit(2.0) {
        x * x
    } else {
        x.powf(nu)
    }
}

/// Inverse of [`pow_nu`] on non-negative inputs.
#[inline]
pub fn root_nu<T: Scalar>(x: T, nu: T) -> T {
    if nu == T::one() {
        x
    } else if nu == T::lit(2.0) {
        x.sqrt()
    } else {
        x.powf(nu.recip())
    }
}
