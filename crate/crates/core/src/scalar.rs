//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating-point field the toolkit computes over (`f32` or `f64`).
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// A tolerance of `x`, floored at a small multiple of machine epsilon so
    /// that `f64` defaults stay meaningful for `f32`.
    fn tol(x: f64) -> Self {
        let floor = Self::epsilon() * Self::of(64.0);
        Self::of(x).max(floor)
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Square root with the cut on `(-inf, 0]`, continuous from the upper half-plane.
///
/// Real negative arguments map to `+i sqrt|x|`, i.e. the boundary value from above.
pub fn sqrt_upper<T: Scalar>(w: Complex<T>) -> Complex<T> {
    if w.im == T::zero() {
        if w.re >= T::zero() {
            Complex::new(w.re.sqrt(), T::zero())
        } else {
            Complex::new(T::zero(), (-w.re).sqrt())
        }
    } else {
        w.sqrt()
    }
}

pub(crate) fn c<T: Scalar>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

pub(crate) fn is_finite<T: Scalar>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
