//! Scalar abstraction shared by the analytic modules.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::{Debug, Display};

/// Real floating point type usable by the kernels (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Largest binary exponent that stays finite.
    const MAX_EXP2: i32;
    /// Smallest binary exponent of a normal number.
    const MIN_EXP2: i32;

    fn c(x: f64) -> Self {
        Self::from_f64(x).unwrap()
    }

    fn from_usize_(k: usize) -> Self {
        Self::from_usize(k).unwrap()
    }

    fn to_f64_(self) -> f64 {
        self.to_f64().unwrap()
    }
}

impl Real for f64 {
    const MAX_EXP2: i32 = 1023;
    const MIN_EXP2: i32 = -1021;
}

impl Real for f32 {
    const MAX_EXP2: i32 = 127;
    const MIN_EXP2: i32 = -125;
}

/// Complex number over a [`Real`].
pub type Cx<T> = Complex<T>;

pub(crate) fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

pub(crate) fn re<T: Real>(x: T) -> Cx<T> {
    Complex::new(x, T::zero())
}
