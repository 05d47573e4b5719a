//! Scalar field abstraction over `f64` and `Complex<f64>`.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

/// Unit roundoff of IEEE binary64 (2^-53).
pub const UNIT_ROUNDOFF_F64: f64 = f64::EPSILON / 2.0;

/// Field element used by every routine in the crate.
///
/// Real instantiation makes `conj` the identity and `im` zero.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    const IS_COMPLEX: bool;

    /// Unit roundoff of the working precision.
    const UNIT: f64;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(x: f64) -> Self;

    /// Builds a scalar from parts. Real scalars drop `im`.
    fn from_parts(re: f64, im: f64) -> Self;

    fn re(self) -> f64;
    fn im(self) -> f64;
    fn conj(self) -> Self;

    /// Modulus `|x|`.
    fn modulus(self) -> f64;

    fn is_finite(self) -> bool {
        self.re().is_finite() && self.im().is_finite()
    }

    fn is_zero(self) -> bool {
        self == Self::zero()
    }
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;
    const UNIT: f64 = UNIT_ROUNDOFF_F64;

    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn one() -> Self {
        1.0
    }
    #[inline]
    fn from_real(x: f64) -> Self {
        x
    }
    #[inline]
    fn from_parts(re: f64, _im: f64) -> Self {
        re
    }
    #[inline]
    fn re(self) -> f64 {
        self
    }
    #[inline]
    fn im(self) -> f64 {
        0.0
    }
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    const IS_COMPLEX: bool = true;
    const UNIT: f64 = UNIT_ROUNDOFF_F64;

    #[inline]
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    #[inline]
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    #[inline]
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    #[inline]
    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn im(self) -> f64 {
        self.im
    }
    #[inline]
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    #[inline]
    fn modulus(self) -> f64 {
        self.norm()
    }
}
