//! Double-double arithmetic.
//!
//! A [`DoubleDouble`] is the unevaluated sum `hi + lo` of two `f64` values with
//! `|lo| <= ulp(hi) / 2`, giving a 106-bit significand (unit roundoff about
//! `4.9e-32`) and the exponent range of `f64`. The basic operations follow
//! the error-free transformations of Dekker and Knuth as used by the QD
//! library; the transcendental functions use argument reduction followed by
//! Taylor series evaluated entirely in double-double.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{
    Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign,
};

use num_traits::{Num, One, Zero};

#[derive(Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Requires `|a| >= |b|`.
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[cfg(target_feature = "fma")]
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[cfg(not(target_feature = "fma"))]
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    #[inline]
    fn split(a: f64) -> (f64, f64) {
        const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
        let t = SPLITTER * a;
        let hi = t - (t - a);
        (hi, a - hi)
    }
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, e)
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    pub const PI: Self = Self {
        hi: 3.141_592_653_589_793_116e0,
        lo: 1.224_646_799_147_353_207e-16,
    };
    pub const FRAC_PI_2: Self = Self {
        hi: 1.570_796_326_794_896_558e0,
        lo: 6.123_233_995_736_766_036e-17,
    };
    pub const LN_2: Self = Self {
        hi: 6.931_471_805_599_452_862e-1,
        lo: 2.319_046_813_846_299_558e-17,
    };
    /// 2^-104.
    pub const EPSILON: f64 = 4.930_380_657_631_324e-32;

    /// Builds a value from two components, renormalizing them.
    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        Self { hi, lo }
    }

    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn is_nan(self) -> bool {
        self.hi.is_nan() || self.lo.is_nan()
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    #[inline]
    fn add_f64(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Self { hi, lo }
    }

    #[inline]
    fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Self { hi, lo }
    }

    #[inline]
    fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let (p, e) = two_prod(q1, b);
        let (s, f) = two_sum(self.hi, -p);
        let q2 = (s + (f - e + self.lo)) / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo }
    }

    /// Exact multiplication by a power of two.
    #[inline]
    fn ldexp(self, k: i32) -> Self {
        let f = 2f64.powi(k);
        Self {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    #[inline]
    pub fn sqr(self) -> Self {
        let (p, e) = two_prod(self.hi, self.hi);
        let e = e + 2.0 * self.hi * self.lo + self.lo * self.lo;
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }

    pub fn sqrt(self) -> Self {
        if self.hi == 0.0 {
            return Self::ZERO;
        }
        if self.hi < 0.0 {
            return Self::from_f64(f64::NAN);
        }
        if !self.hi.is_finite() {
            return self;
        }
        // Karp's trick: one Newton step on the f64 reciprocal square root.
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let corr = (self - Self::from_f64(ax).sqr()).hi * (x * 0.5);
        let (hi, lo) = two_sum(ax, corr);
        Self { hi, lo }
    }

    /// Largest integer not greater than `self`.
    pub fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            let lo = self.lo.floor();
            let (hi, lo) = quick_two_sum(hi, lo);
            Self { hi, lo }
        } else {
            Self { hi, lo: 0.0 }
        }
    }

    pub fn trunc(self) -> Self {
        if self.hi >= 0.0 {
            self.floor()
        } else {
            -(-self).floor()
        }
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.8 {
            return Self::from_f64(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return Self::ZERO;
        }
        if self.hi == 0.0 {
            return Self::ONE;
        }
        let k = (self.hi / Self::LN_2.hi).round();
        let r = (self - Self::LN_2.mul_f64(k)).ldexp(-9);
        // exp(r) - 1 by Taylor series, then undo the 2^-9 scaling by squaring.
        let mut term = r;
        let mut sum = r;
        let mut n = 1.0;
        loop {
            n += 1.0;
            term = (term * r).div_f64(n);
            sum += term;
            if term.hi.abs() <= 1e-34 * sum.hi.abs() {
                break;
            }
        }
        for _ in 0..9 {
            sum = sum.mul_f64(2.0) + sum.sqr();
        }
        (sum + Self::ONE).ldexp(k as i32)
    }

    fn sin_taylor(r: Self) -> Self {
        if r.hi == 0.0 {
            return Self::ZERO;
        }
        let r2 = -r.sqr();
        let mut term = r;
        let mut sum = r;
        let mut n = 1.0;
        loop {
            term = (term * r2).div_f64((n + 1.0) * (n + 2.0));
            n += 2.0;
            sum += term;
            if term.hi.abs() <= 1e-34 * sum.hi.abs() {
                break;
            }
        }
        sum
    }

    fn cos_taylor(r: Self) -> Self {
        let r2 = -r.sqr();
        let mut term = Self::ONE;
        let mut sum = Self::ONE;
        let mut n = 0.0;
        loop {
            term = (term * r2).div_f64((n + 1.0) * (n + 2.0));
            n += 2.0;
            sum += term;
            if term.hi.abs() <= 1e-34 {
                break;
            }
        }
        sum
    }

    /// Reduces `self` modulo pi/2, returning the quadrant and remainder.
    fn reduce_half_pi(self) -> (i64, Self) {
        let k = (self.hi / Self::FRAC_PI_2.hi).round();
        let r = self - Self::FRAC_PI_2.mul_f64(k);
        (k as i64, r)
    }

    pub fn sin(self) -> Self {
        let (k, r) = self.reduce_half_pi();
        match k.rem_euclid(4) {
            0 => Self::sin_taylor(r),
            1 => Self::cos_taylor(r),
            2 => -Self::sin_taylor(r),
            _ => -Self::cos_taylor(r),
        }
    }

    pub fn cos(self) -> Self {
        let (k, r) = self.reduce_half_pi();
        match k.rem_euclid(4) {
            0 => Self::cos_taylor(r),
            1 => -Self::sin_taylor(r),
            2 => -Self::cos_taylor(r),
            _ => Self::sin_taylor(r),
        }
    }

    pub fn cosh(self) -> Self {
        let e = self.abs().exp();
        if !e.is_finite() {
            return e;
        }
        (e + e.recip()).ldexp(-1)
    }

    pub fn tanh(self) -> Self {
        let a = self.abs();
        if a.hi > 40.0 {
            return if self.hi > 0.0 { Self::ONE } else { -Self::ONE };
        }
        let t = if a.hi < 0.5 {
            // sinh by series avoids cancellation in exp(a) - exp(-a).
            let a2 = a.sqr();
            let mut term = a;
            let mut sinh = a;
            let mut n = 1.0;
            loop {
                term = (term * a2).div_f64((n + 1.0) * (n + 2.0));
                n += 2.0;
                sinh += term;
                if term.hi.abs() <= 1e-34 * sinh.hi.abs() {
                    break;
                }
            }
            let cosh = (Self::ONE + sinh.sqr()).sqrt();
            sinh / cosh
        } else {
            let e = (-a.ldexp(1)).exp();
            (Self::ONE - e) / (Self::ONE + e)
        };
        if self.hi < 0.0 {
            -t
        } else {
            t
        }
    }

    #[inline]
    pub fn recip(self) -> Self {
        Self::ONE / self
    }

    pub fn hypot(self, other: Self) -> Self {
        let a = self.abs();
        let b = other.abs();
        let (big, small) = if a >= b { (a, b) } else { (b, a) };
        if big.hi == 0.0 {
            return Self::ZERO;
        }
        if !big.is_finite() {
            return big;
        }
        let r = small / big;
        big * (Self::ONE + r.sqr()).sqrt()
    }

    /// Decimal rendering with `digits` significant digits in scientific
    /// notation, e.g. `1.2345e-3`.
    pub fn to_sci_string(self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.is_nan() {
            return "NaN".into();
        }
        if !self.is_finite() {
            return if self.hi > 0.0 { "inf".into() } else { "-inf".into() };
        }
        if self.hi == 0.0 {
            return format!("{:.*}e0", digits - 1, 0.0);
        }
        let neg = self.hi < 0.0;
        let mut x = self.abs();
        let mut exp10 = x.hi.log10().floor() as i32;
        x = if exp10 >= 0 {
            x / Self::pow10(exp10)
        } else {
            x * Self::pow10(-exp10)
        };
        while x.hi >= 10.0 {
            x = x.div_f64(10.0);
            exp10 += 1;
        }
        while x.hi < 1.0 {
            x = x.mul_f64(10.0);
            exp10 -= 1;
        }
        let mut ds: Vec<u8> = Vec::with_capacity(digits + 1);
        for _ in 0..=digits {
            let d = x.floor();
            let dv = d.hi.clamp(0.0, 9.0);
            ds.push(dv as u8);
            x = (x - Self::from_f64(dv)).mul_f64(10.0);
        }
        // Round on the extra digit and propagate the carry.
        let last = ds.pop().unwrap_or(0);
        if last >= 5 {
            let mut i = ds.len();
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    ds.pop();
                    exp10 += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
        let mut s = String::with_capacity(digits + 8);
        if neg {
            s.push('-');
        }
        s.push((b'0' + ds[0]) as char);
        if ds.len() > 1 {
            s.push('.');
            for d in &ds[1..] {
                s.push((b'0' + d) as char);
            }
        }
        s.push('e');
        s.push_str(&exp10.to_string());
        s
    }

    fn pow10(n: i32) -> Self {
        let mut result = Self::ONE;
        let mut base = Self::from_f64(10.0);
        let mut n = n.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                result *= base;
            }
            base = base.sqr();
            n >>= 1;
        }
        result
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl From<DoubleDouble> for f64 {
    fn from(x: DoubleDouble) -> f64 {
        x.hi + x.lo
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DoubleDouble({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().map(|p| p + 1).unwrap_or(32);
        f.write_str(&self.to_sci_string(digits))
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            ord => Some(ord),
        }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    #[inline]
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        if !q1.is_finite() || !b.hi.is_finite() {
            return Self::from_f64(q1);
        }
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Self { hi: q1, lo: q2 }.add_f64(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, b: Self) -> Self {
        self - b * (self / b).trunc()
    }
}

macro_rules! assign_ops {
    ($($tr:ident $m:ident $op:tt),*) => {$(
        impl $tr for DoubleDouble {
            #[inline]
            fn $m(&mut self, rhs: Self) {
                *self = *self $op rhs;
            }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /, RemAssign rem_assign %);

impl Sum for DoubleDouble {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        Self::ONE
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = std::num::ParseFloatError;

    /// Parses through `f64`; only radix 10 is meaningful.
    fn from_str_radix(s: &str, _radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        s.trim().parse::<f64>().map(Self::from_f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type DD = DoubleDouble;

    fn close(a: DD, b: DD, rel: f64) -> bool {
        let d = (a - b).abs();
        d.hi <= rel * b.abs().hi.max(1e-300)
    }

    #[test]
    fn one_third_times_three() {
        let third = DD::ONE / DD::from(3.0);
        let back = third * DD::from(3.0);
        assert!((back - DD::ONE).abs().hi < 1e-31);
        // 1/3 is not representable in f64; the low word must carry the tail.
        assert!(third.lo() != 0.0);
    }

    #[test]
    fn sqrt_two_squared() {
        let s = DD::from(2.0).sqrt();
        assert!((s.sqr() - DD::from(2.0)).abs().hi < 1e-31);
        assert_eq!(DD::ZERO.sqrt(), DD::ZERO);
        assert!(DD::from(-1.0).sqrt().is_nan());
    }

    #[test]
    fn exp_of_ln2_is_two() {
        let e = DD::LN_2.exp();
        assert!(close(e, DD::from(2.0), 1e-31), "{e:?}");
        let e1 = DD::ONE.exp();
        // e = 2.718281828459045235360287471352662...
        let e_ref = DD::new(2.718_281_828_459_045_1, 1.445_646_891_729_250_2e-16);
        assert!(close(e1, e_ref, 1e-30), "{e1:?}");
        assert!(close((-DD::from(3.0)).exp() * DD::from(3.0).exp(), DD::ONE, 1e-30));
    }

    #[test]
    fn trig_identities() {
        for &x in &[0.1, 0.7, 1.3, 2.9, -2.2, 3.0] {
            let x = DD::from(x) / DD::from(1.1);
            let s = x.sin();
            let c = x.cos();
            assert!(((s.sqr() + c.sqr()) - DD::ONE).abs().hi < 1e-30);
            assert!((s.hi - x.hi.sin()).abs() < 1e-15);
            assert!((c.hi - x.hi.cos()).abs() < 1e-15);
        }
        assert!(DD::PI.sin().abs().hi < 1e-31);
        assert!(close((DD::PI / DD::from(3.0)).cos(), DD::from(0.5), 1e-30));
        // cos(pi/4)^2 = 1/2
        let c = (DD::PI / DD::from(4.0)).cos();
        assert!(close(c.sqr(), DD::from(0.5), 1e-30));
    }

    #[test]
    fn hyperbolic() {
        for &x in &[0.05, 0.3, 0.8814, 2.0, 12.0, -7.5] {
            let d = DD::from(x);
            let t = d.tanh();
            let c = d.cosh();
            assert!((t.hi - x.tanh()).abs() < 1e-15);
            assert!((c.hi - x.cosh()).abs() <= 1e-15 * x.cosh());
            // 1 - tanh^2 = sech^2; cancellation on the left limits this to
            // an absolute comparison.
            let lhs = DD::ONE - t.sqr();
            let rhs = c.recip().sqr();
            assert!((lhs - rhs).abs().hi < 1e-30, "x={x}");
        }
        assert_eq!(DD::from(100.0).tanh(), DD::ONE);
        assert!(DD::from(800.0).cosh().recip().hi == 0.0);
    }

    #[test]
    fn ordering_and_formatting() {
        let a = DD::new(1.0, 1e-20);
        let b = DD::from(1.0);
        assert!(a > b);
        assert_eq!(DD::from(0.25).to_sci_string(3), "2.50e-1");
        assert_eq!(DD::from(-1234.5).to_sci_string(5), "-1.2345e3");
        assert_eq!(DD::from(9.9999).to_sci_string(3), "1.00e1");
        let third = DD::ONE / DD::from(3.0);
        assert_eq!(third.to_sci_string(30), format!("3.{}e-1", "3".repeat(29)));
    }

    #[test]
    fn remainder_and_floor() {
        assert_eq!(DD::from(7.0) % DD::from(3.0), DD::ONE);
        assert_eq!(DD::from(-2.5).floor(), DD::from(-3.0));
        assert_eq!(DD::new(3.0, -1e-20).floor(), DD::from(2.0));
    }
}
