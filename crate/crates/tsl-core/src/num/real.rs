//! Scalar abstraction over `f64` and the double-double type [`crate::num::Dd`].
//!
//! The quadrature kernel, the spherical-cap areas and the profile integrands
//! are generic over this trait so that the same code path serves both the
//! fast `f64` solves and the extended-precision certificate evaluations.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Real scalar with the elementary functions the integrands need.
pub trait Real:
    Copy
    + PartialOrd
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn pi() -> Self;
    /// Machine epsilon of the representation (used for convergence cutoffs).
    fn eps() -> f64;

    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    /// `ln(1 + self)`, accurate for small arguments.
    fn ln_1p(self) -> Self;
    /// `exp(self) - 1`, accurate for small arguments.
    fn exp_m1(self) -> Self;
    /// Integer power by repeated squaring.
    fn powi(self, n: i32) -> Self;
    /// Real power `self^e` for `self > 0`.
    fn powr(self, e: Self) -> Self;
    /// `asin(self)` for `self` in [-1, 1].
    fn asin(self) -> Self;

    fn is_finite(self) -> bool;

    /// Scale by an exact `f64` factor.
    fn scale(self, c: f64) -> Self {
        self * Self::from_f64(c)
    }

    fn max(self, other: Self) -> Self {
        if self > other {
            self
        } else {
            other
        }
    }

    fn min(self, other: Self) -> Self {
        if self < other {
            self
        } else {
            other
        }
    }
}

impl Real for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn eps() -> f64 {
        f64::EPSILON
    }

    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn ln_1p(self) -> Self {
        f64::ln_1p(self)
    }
    fn exp_m1(self) -> Self {
        f64::exp_m1(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn powr(self, e: Self) -> Self {
        f64::powf(self, e)
    }
    fn asin(self) -> Self {
        f64::asin(self)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}
