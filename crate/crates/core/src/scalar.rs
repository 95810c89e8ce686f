//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! [`Real`] covers the two working precisions (`f64` and [`DoubleDouble`]);
//! [`Scalar`] covers matrix element types, i.e. a real type or its complex
//! extension. Decompositions are written once against these traits.

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex;
use num_traits::{Num, NumAssign};
use serde::{Deserialize, Serialize};

use crate::dd::DoubleDouble;

pub trait Real:
    Copy
    + Debug
    + Display
    + Default
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Num
    + NumAssign
    + Neg<Output = Self>
    + Scalar<Real = Self>
{
    const PRECISION: Precision;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn epsilon() -> Self;
    /// Smallest positive normal number.
    fn safe_min() -> Self;
    fn pi() -> Self;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn cosh(self) -> Self;
    fn tanh(self) -> Self;
    fn hypot(self, other: Self) -> Self;
    fn is_finite(self) -> bool;

    /// Width of the little-endian encoding used by the matrix dump.
    const BYTES: usize;
    fn write_le(self, out: &mut Vec<u8>);
    /// Decodes from exactly [`Self::BYTES`] bytes.
    fn read_le(bytes: &[u8]) -> Self;

    #[inline]
    fn from_usize(n: usize) -> Self {
        Self::from_f64(n as f64)
    }

    #[inline]
    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    #[inline]
    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// `|self|` carrying the sign of `sign` (positive for zero).
    #[inline]
    fn copysign(self, sign: Self) -> Self {
        if sign < Self::zero() {
            -self.abs()
        } else {
            self.abs()
        }
    }
}

impl Real for f64 {
    const PRECISION: Precision = Precision::Double;
    const BYTES: usize = 8;

    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn read_le(bytes: &[u8]) -> Self {
        f64::from_le_bytes(bytes.try_into().expect("8 bytes"))
    }

    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn epsilon() -> Self {
        f64::EPSILON
    }
    #[inline]
    fn safe_min() -> Self {
        f64::MIN_POSITIVE
    }
    #[inline]
    fn pi() -> Self {
        std::f64::consts::PI
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    #[inline]
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    #[inline]
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    #[inline]
    fn hypot(self, other: Self) -> Self {
        f64::hypot(self, other)
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Real for DoubleDouble {
    const PRECISION: Precision = Precision::Extended;
    const BYTES: usize = 16;

    /// High word, then low word.
    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.hi().to_le_bytes());
        out.extend_from_slice(&self.lo().to_le_bytes());
    }
    fn read_le(bytes: &[u8]) -> Self {
        let hi = f64::from_le_bytes(bytes[..8].try_into().expect("16 bytes"));
        let lo = f64::from_le_bytes(bytes[8..16].try_into().expect("16 bytes"));
        DoubleDouble::new(hi, lo)
    }

    #[inline]
    fn from_f64(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self.into()
    }
    #[inline]
    fn epsilon() -> Self {
        DoubleDouble::from_f64(DoubleDouble::EPSILON)
    }
    #[inline]
    fn safe_min() -> Self {
        // Keep a margin above f64::MIN_POSITIVE so the low word stays normal.
        DoubleDouble::from_f64(f64::MIN_POSITIVE * 2f64.powi(53))
    }
    #[inline]
    fn pi() -> Self {
        DoubleDouble::PI
    }
    #[inline]
    fn abs(self) -> Self {
        DoubleDouble::abs(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        DoubleDouble::sqrt(self)
    }
    #[inline]
    fn exp(self) -> Self {
        DoubleDouble::exp(self)
    }
    #[inline]
    fn sin(self) -> Self {
        DoubleDouble::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        DoubleDouble::cos(self)
    }
    #[inline]
    fn cosh(self) -> Self {
        DoubleDouble::cosh(self)
    }
    #[inline]
    fn tanh(self) -> Self {
        DoubleDouble::tanh(self)
    }
    #[inline]
    fn hypot(self, other: Self) -> Self {
        DoubleDouble::hypot(self, other)
    }
    #[inline]
    fn is_finite(self) -> bool {
        DoubleDouble::is_finite(self)
    }
}

/// Working precision of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// IEEE binary64.
    #[default]
    Double,
    /// Software double-double (about 32 significant digits).
    Extended,
}

impl Precision {
    pub fn epsilon(self) -> f64 {
        match self {
            Precision::Double => f64::EPSILON,
            Precision::Extended => DoubleDouble::EPSILON,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Precision::Double => "double",
            Precision::Extended => "extended",
        }
    }

    /// Relative residual tolerance `||A v - lambda v|| / ||A||_F` accepted for
    /// a computed eigenpair.
    pub fn residual_tolerance(self) -> f64 {
        match self {
            Precision::Double => 1e-10,
            Precision::Extended => 1e-24,
        }
    }
}

impl std::str::FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "double" | "double64" | "f64" => Ok(Precision::Double),
            "extended" | "extended128" | "dd" | "quad" => Ok(Precision::Extended),
            other => Err(format!("unknown precision `{other}` (expected double or extended)")),
        }
    }
}

impl std::fmt::Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Element type of a dense matrix: a [`Real`] or a `Complex` over one.
pub trait Scalar:
    Copy
    + Debug
    + Send
    + Sync
    + 'static
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + num_traits::Zero
    + num_traits::One
{
    type Real: Real;

    fn from_real(r: Self::Real) -> Self;
    fn re(self) -> Self::Real;
    fn im(self) -> Self::Real;
    fn conj(self) -> Self;
    /// Euclidean modulus.
    fn modulus(self) -> Self::Real;
    /// `|re| + |im|`, the cheap magnitude used in convergence tests.
    fn abs1(self) -> Self::Real;
    fn abs_sqr(self) -> Self::Real;
    fn scale(self, r: Self::Real) -> Self;
    fn to_complex(self) -> Complex<Self::Real>;
}

macro_rules! real_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            type Real = $t;
            #[inline]
            fn from_real(r: Self::Real) -> Self {
                r
            }
            #[inline]
            fn re(self) -> Self::Real {
                self
            }
            #[inline]
            fn im(self) -> Self::Real {
                <$t as num_traits::Zero>::zero()
            }
            #[inline]
            fn conj(self) -> Self {
                self
            }
            #[inline]
            fn modulus(self) -> Self::Real {
                Real::abs(self)
            }
            #[inline]
            fn abs1(self) -> Self::Real {
                Real::abs(self)
            }
            #[inline]
            fn abs_sqr(self) -> Self::Real {
                self * self
            }
            #[inline]
            fn scale(self, r: Self::Real) -> Self {
                self * r
            }
            #[inline]
            fn to_complex(self) -> Complex<Self::Real> {
                Complex::new(self, <$t as num_traits::Zero>::zero())
            }
        }
    };
}

real_scalar!(f64);
real_scalar!(DoubleDouble);

impl<T: Real> Scalar for Complex<T> {
    type Real = T;
    #[inline]
    fn from_real(r: Self::Real) -> Self {
        Complex::new(r, T::zero())
    }
    #[inline]
    fn re(self) -> Self::Real {
        self.re
    }
    #[inline]
    fn im(self) -> Self::Real {
        self.im
    }
    #[inline]
    fn conj(self) -> Self {
        Complex::new(self.re, -self.im)
    }
    #[inline]
    fn modulus(self) -> Self::Real {
        Real::hypot(self.re, self.im)
    }
    #[inline]
    fn abs1(self) -> Self::Real {
        Real::abs(self.re) + Real::abs(self.im)
    }
    #[inline]
    fn abs_sqr(self) -> Self::Real {
        self.re * self.re + self.im * self.im
    }
    #[inline]
    fn scale(self, r: Self::Real) -> Self {
        Complex::new(self.re * r, self.im * r)
    }
    #[inline]
    fn to_complex(self) -> Complex<Self::Real> {
        self
    }
}

/// Principal square root of a complex number.
pub fn csqrt<T: Real>(z: Complex<T>) -> Complex<T> {
    let zero = T::zero();
    let half = T::from_f64(0.5);
    if z.re == zero && z.im == zero {
        return Complex::new(zero, zero);
    }
    let r = z.re.hypot(z.im);
    if z.re >= zero {
        let t = ((r + z.re) * half).sqrt();
        Complex::new(t, z.im / (t + t))
    } else {
        let t = ((r - z.re) * half).sqrt();
        Complex::new(z.im.abs() / (t + t), t.copysign(z.im))
    }
}

/// Converts a complex value to double precision.
pub fn complex_to_f64<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_sqrt_branches() {
        let z = csqrt(Complex::new(-4.0, 0.0));
        assert!((z - Complex::new(0.0, 2.0)).norm() < 1e-15);
        let w = Complex::new(3.0, -4.0);
        let s = csqrt(w);
        assert!((s * s - w).norm() < 1e-14);
        assert!(s.re >= 0.0);
        let dd = csqrt(Complex::new(DoubleDouble::from(-3.0), DoubleDouble::from(-1e-3)));
        let back = dd * dd;
        assert!((back.re + DoubleDouble::from(3.0)).abs().hi() < 1e-30);
    }

    #[test]
    fn precision_parsing() {
        assert_eq!("double".parse::<Precision>().unwrap(), Precision::Double);
        assert_eq!("Extended".parse::<Precision>().unwrap(), Precision::Extended);
        assert!("half".parse::<Precision>().is_err());
        assert!(Precision::Extended.epsilon() < 1e-30);
        assert!((Precision::Double.epsilon() - 2.22e-16).abs() < 1e-18);
    }

    #[test]
    fn scalar_helpers() {
        let z = Complex::new(3.0f64, -4.0);
        assert_eq!(z.modulus(), 5.0);
        assert_eq!(z.abs1(), 7.0);
        assert_eq!(Scalar::conj(z), Complex::new(3.0, 4.0));
        assert_eq!((-2.0f64).modulus(), 2.0);
    }
}
