//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All operator entries are complex numbers over a real field `T`; the
//! concrete aliases at the crate root fix `T = f64`.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating point type the engine is generic over (`f32` or `f64`).
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync {
    /// Relative tolerance used for rank decisions and membership tests.
    fn default_tolerance() -> Self;

    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("finite float")
    }
}

impl Real for f64 {
    fn default_tolerance() -> Self {
        1e-9
    }
}

impl Real for f32 {
    fn default_tolerance() -> Self {
        1e-4
    }
}

/// Complex entry type.
pub type C<T> = Complex<T>;

#[inline]
pub fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub fn re<T: Real>(x: f64) -> C<T> {
    Complex::new(T::from_f64_lossy(x), T::zero())
}

#[inline]
pub fn zero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn one<T: Real>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

/// Integer power `d^k` with overflow check.
pub fn ipow(d: usize, k: usize) -> usize {
    d.checked_pow(k as u32)
        .expect("tensor power dimension overflows usize")
}

/// `|z|`.
#[inline]
pub fn modulus<T: Real>(z: C<T>) -> T {
    nalgebra::ComplexField::modulus(z)
}
