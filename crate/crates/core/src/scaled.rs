//! Complex numbers with an explicit binary exponent.
//!
//! Binomial-type sums at N in the hundreds leave the `f64` range even though
//! the weighted kernels they feed are O(1). `Scaled` keeps the mantissa near
//! unit magnitude and carries the exponent separately.

use crate::scalar::{Cx, Real};
use num_complex::Complex;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled<T: Real> {
    pub m: Cx<T>,
    pub e: i64,
}

fn pow2<T: Real>(k: i64) -> T {
    let two = T::c(2.0);
    if k > T::MAX_EXP2 as i64 {
        T::infinity()
    } else if k < T::MIN_EXP2 as i64 {
        let h = k / 2;
        two.powi(h as i32) * two.powi((k - h) as i32)
    } else {
        two.powi(k as i32)
    }
}

impl<T: Real> Scaled<T> {
    pub fn zero() -> Self {
        Scaled { m: Complex::new(T::zero(), T::zero()), e: 0 }
    }

    pub fn one() -> Self {
        Scaled { m: Complex::new(T::one(), T::zero()), e: 0 }
    }

    fn normalized(m: Cx<T>, e: i64) -> Self {
        let a = m.re.abs().max(m.im.abs());
        if a == T::zero() {
            return Self::zero();
        }
        if !a.is_finite() {
            return Scaled { m, e };
        }
        let k = a.log2().floor().to_i64().unwrap_or(0);
        Scaled { m: m * pow2::<T>(-k), e: e + k }
    }

    pub fn from_c(z: Cx<T>) -> Self {
        Self::normalized(z, 0)
    }

    pub fn from_re(x: T) -> Self {
        Self::normalized(Complex::new(x, T::zero()), 0)
    }

    /// `exp(ln_abs + i*phase)`.
    pub fn from_log(ln_abs: T, phase: T) -> Self {
        if ln_abs == T::neg_infinity() {
            return Self::zero();
        }
        let k = (ln_abs / T::LN_2()).floor();
        let r = ln_abs - k * T::LN_2();
        let m = Complex::from_polar(r.exp(), phase);
        Self::normalized(m, k.to_i64().unwrap_or(0))
    }

    /// `exp(z)` for complex `z`.
    pub fn exp_c(z: Cx<T>) -> Self {
        Self::from_log(z.re, z.im)
    }

    pub fn is_zero(&self) -> bool {
        self.m.re == T::zero() && self.m.im == T::zero()
    }

    pub fn is_finite(&self) -> bool {
        self.m.re.is_finite() && self.m.im.is_finite()
    }

    /// Plain complex value, `None` when it would overflow.
    pub fn to_c(&self) -> Option<Cx<T>> {
        if !self.is_finite() {
            return None;
        }
        if self.is_zero() {
            return Some(self.m);
        }
        if self.e > T::MAX_EXP2 as i64 - 1 {
            return None;
        }
        Some(self.m * pow2::<T>(self.e))
    }

    /// Natural log, principal branch. `-inf` real part at zero.
    pub fn ln(&self) -> Cx<T> {
        if self.is_zero() {
            return Complex::new(T::neg_infinity(), T::zero());
        }
        let l = self.m.ln();
        Complex::new(l.re + T::from_i64(self.e).unwrap() * T::LN_2(), l.im)
    }

    /// Approximate log2 of the modulus.
    pub fn log2_abs(&self) -> T {
        if self.is_zero() {
            return T::neg_infinity();
        }
        self.m.norm().log2() + T::from_i64(self.e).unwrap()
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return *self;
        }
        let l = self.ln();
        Self::from_log(l.re * T::c(0.5), l.im * T::c(0.5))
    }

    pub fn conj(&self) -> Self {
        Scaled { m: self.m.conj(), e: self.e }
    }

    pub fn scale_c(&self, z: Cx<T>) -> Self {
        Self::normalized(self.m * z, self.e)
    }

    pub fn powi(&self, k: i32) -> Self {
        let mut out = Self::one();
        let mut base = if k < 0 { Self::one() / *self } else { *self };
        let mut p = k.unsigned_abs();
        while p > 0 {
            if p & 1 == 1 {
                out = out * base;
            }
            base = base * base;
            p >>= 1;
        }
        out
    }
}

impl<T: Real> Mul for Scaled<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::normalized(self.m * o.m, self.e + o.e)
    }
}

impl<T: Real> Div for Scaled<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        Self::normalized(self.m / o.m, self.e - o.e)
    }
}

impl<T: Real> Add for Scaled<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        let (big, small) = if self.e >= o.e { (self, o) } else { (o, self) };
        let d = big.e - small.e;
        if d > 200 {
            return big;
        }
        Self::normalized(big.m + small.m * pow2::<T>(-d), big.e)
    }
}

impl<T: Real> Neg for Scaled<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Scaled { m: -self.m, e: self.e }
    }
}

impl<T: Real> Sub for Scaled<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_arithmetic() {
        let a = Scaled::from_c(Complex::new(3.0f64, -4.0));
        assert_eq!(a.to_c().unwrap(), Complex::new(3.0, -4.0));
        let big = Scaled::<f64>::from_log(2000.0, 0.3);
        let back = (big * Scaled::from_log(-1999.0, -0.3)).to_c().unwrap();
        assert!((back - Complex::new(1f64.exp(), 0.0)).norm() < 1e-12);
        assert!(big.to_c().is_none());
        let s = (Scaled::from_re(1.5f64) + Scaled::from_re(2.25)).to_c().unwrap();
        assert_eq!(s.re, 3.75);
        let p = Scaled::from_re(1.1f64).powi(50).to_c().unwrap().re;
        assert!((p / 1.1f64.powi(50) - 1.0).abs() < 1e-13);
        assert!((big.ln().re - 2000.0).abs() < 1e-10);
    }
}
