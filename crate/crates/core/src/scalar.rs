//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All operators are written once against [`Real`] and instantiated for
//! `f32` and `f64`. Method names that would collide with `num_traits`
//! (`from_f64`, `to_f64`) are exposed as [`Real::lit`] and [`Real::as_f64`].

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst};
use rustfft::FftNum;
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point scalar usable throughout the sensing and solver code.
pub trait Real:
    Float
    + FloatConst
    + FftNum
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this scalar type.
    fn lit(x: f64) -> Self;

    /// Widens (or keeps) the value as an `f64`.
    fn as_f64(self) -> f64;

    fn two_pi() -> Self {
        Self::TAU()
    }
}

impl Real for f64 {
    #[inline]
    fn lit(x: f64) -> Self {
        x
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

impl Real for f32 {
    #[inline]
    fn lit(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}

/// `exp(i·theta)` with an exactly unit-modulus construction from `cos`/`sin`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    let (s, c) = theta.sin_cos();
    Complex::new(c, s)
}

#[inline]
pub fn abs<T: Real>(x: T) -> T {
    Float::abs(x)
}

pub fn norm2<T: Real>(v: &[T]) -> T {
    v.iter().map(|&x| x * x).sum::<T>().sqrt()
}

pub fn norm1<T: Real>(v: &[T]) -> T {
    v.iter().map(|&x| abs(x)).sum()
}

pub fn norm_inf<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, &x| m.max(abs(x)))
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn complex_norm2<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cis_is_unit_modulus() {
        for k in 0..64 {
            let z = cis(k as f64 * 0.37);
            assert!((z.norm() - 1.0).abs() < 4.0 * f64::EPSILON);
        }
    }

    #[test]
    fn norms_agree_for_f32_and_f64() {
        let v64 = [3.0_f64, -4.0, 0.0];
        let v32 = [3.0_f32, -4.0, 0.0];
        assert_eq!(norm2(&v64), 5.0);
        assert_eq!(norm2(&v32), 5.0);
        assert_eq!(norm1(&v64), 7.0);
        assert_eq!(norm_inf(&v32), 4.0);
    }
}
