//! Double-double arithmetic: an unevaluated sum of two `f64`s giving about
//! 31 significant decimal digits.
//!
//! Needed because one certificate (the transport identity at large trace
//! values) equates a tiny quantity to the difference of two huge ones; the
//! intrinsic cancellation there exceeds what any `f64` evaluation can
//! resolve. Only the certificate integrals run in this type; all solving
//! happens in `f64`.
//!
//! The error-free transforms use Dekker splitting rather than FMA so results
//! are bitwise identical on any target.

use super::real::Real;
use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Double-double scalar: value = `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // requires |a| >= |b|
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ahi, alo) = split(a);
    let (bhi, blo) = split(b);
    let err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo;
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    /// pi to double-double precision.
    pub const PI: Dd = Dd { hi: 3.141592653589793, lo: 1.2246467991473532e-16 };
    /// ln(2) to double-double precision.
    pub const LN2: Dd = Dd { hi: 0.6931471805599453, lo: 2.3190468138462996e-17 };

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Dd {
        let (s, e) = quick_two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact sum of two `f64`s as a double-double.
    #[inline]
    pub fn from_sum(a: f64, b: f64) -> Dd {
        let (s, e) = two_sum(a, b);
        Dd { hi: s, lo: e }
    }

    /// Exact product of two `f64`s as a double-double.
    #[inline]
    pub fn from_prod(a: f64, b: f64) -> Dd {
        let (p, e) = two_prod(a, b);
        Dd { hi: p, lo: e }
    }

    pub fn from_ratio(num: i64, den: i64) -> Dd {
        Dd::from_f64(num as f64) / Dd::from_f64(den as f64)
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn recip(self) -> Dd {
        Dd::ONE / self
    }

    pub fn sqr(self) -> Dd {
        let (p, mut e) = two_prod(self.hi, self.hi);
        e += 2.0 * self.hi * self.lo;
        e += self.lo * self.lo;
        Dd::new(p, e)
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ZERO;
        }
        debug_assert!(self.hi > 0.0, "sqrt of negative double-double");
        // one Newton step on y = sqrt(a) from the f64 seed
        let y0 = Dd::from_f64(self.hi.sqrt());
        (y0 + self / y0).scale(0.5)
    }

    /// Multiply by 2^k exactly.
    #[inline]
    pub fn ldexp(self, k: i32) -> Dd {
        let f = f64::powi(2.0, k);
        Dd { hi: self.hi * f, lo: self.lo * f }
    }

    pub fn powi(self, n: i32) -> Dd {
        if n == 0 {
            return Dd::ONE;
        }
        let mut base = if n < 0 { self.recip() } else { self };
        let mut k = n.unsigned_abs();
        let mut acc = Dd::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base.sqr();
            k >>= 1;
        }
        acc
    }

    /// exp(self) via range reduction x = k ln2 + 512 t and a short Taylor sum.
    pub fn exp(self) -> Dd {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / std::f64::consts::LN_2).round();
        let r = self - Dd::LN2.scale(k);
        // |r| <= ln2/2; scale down by 2^9 so the Taylor sum converges fast
        let t = r.ldexp(-9);
        let mut term = t;
        let mut sum = Dd::ONE + t;
        for j in 2..=12 {
            term = term * t / Dd::from_f64(j as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-35 {
                break;
            }
        }
        // undo the scaling: square 9 times, then multiply by 2^k
        for _ in 0..9 {
            sum = sum.sqr();
        }
        sum.ldexp(k as i32)
    }

    /// Natural log via Newton refinement of the f64 seed.
    pub fn ln(self) -> Dd {
        debug_assert!(self.hi > 0.0, "ln of non-positive double-double");
        let mut y = Dd::from_f64(self.hi.ln());
        // y <- y + (a e^{-y} - 1), applied twice
        for _ in 0..2 {
            let r = self * (-y).exp() - Dd::ONE;
            y = y + r;
        }
        y
    }

    /// ln(1 + x) with full relative accuracy for small x, via
    /// 2 atanh(x / (2 + x)).
    pub fn ln_1p(self) -> Dd {
        if self.hi.abs() > 0.25 {
            return (Dd::ONE + self).ln();
        }
        let z = self / (Dd::from_f64(2.0) + self);
        let z2 = z.sqr();
        let mut term = z;
        let mut sum = z;
        for j in 1..=20 {
            term = term * z2;
            let add = term / Dd::from_f64((2 * j + 1) as f64);
            sum = sum + add;
            if add.hi.abs() < 1e-35 * sum.hi.abs() {
                break;
            }
        }
        sum.ldexp(1)
    }

    /// exp(x) - 1 with full relative accuracy for small x.
    pub fn exp_m1(self) -> Dd {
        if self.hi.abs() > 0.25 {
            return self.exp() - Dd::ONE;
        }
        let mut term = self;
        let mut sum = self;
        for j in 2..=26 {
            term = term * self / Dd::from_f64(j as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-35 * sum.hi.abs() {
                break;
            }
        }
        sum
    }

    /// x^e for x > 0 (or x == 0 with e > 0).
    pub fn powr(self, e: Dd) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ZERO;
        }
        (e * self.ln()).exp()
    }

    /// sin for |x| <= pi/2, by Taylor series (enough for asin refinement).
    fn sin_taylor(self) -> Dd {
        let x2 = self.sqr();
        let mut term = self;
        let mut sum = self;
        for j in 1..=24 {
            let d = (2 * j) * (2 * j + 1);
            term = -term * x2 / Dd::from_f64(d as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-35 * sum.hi.abs().max(1e-300) {
                break;
            }
        }
        sum
    }

    /// asin for |x| <= 1, Newton-refined from the f64 seed.
    pub fn asin(self) -> Dd {
        if self.hi.abs() >= 1.0 {
            let half_pi = Dd::PI.ldexp(-1);
            return if self.hi > 0.0 { half_pi } else { -half_pi };
        }
        let mut a = Dd::from_f64(self.hi.asin());
        let cos_a = self.hi.asin().cos();
        if cos_a < 1e-8 {
            return a; // seed is at the edge; Newton step would be unstable
        }
        for _ in 0..2 {
            let delta = (self - a.sin_taylor()).scale(1.0 / cos_a);
            a = a + delta;
        }
        a
    }

    #[inline]
    fn scale(self, c: f64) -> Dd {
        let (p1, mut p2) = two_prod(self.hi, c);
        p2 += self.lo * c;
        Dd::new(p1, p2)
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, rhs: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (s1, s2) = quick_two_sum(s1, s2 + t2);
        Dd { hi: s1, lo: s2 }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, rhs: Dd) -> Dd {
        let (p1, mut p2) = two_prod(self.hi, rhs.hi);
        p2 += self.hi * rhs.lo + self.lo * rhs.hi;
        Dd::new(p1, p2)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs.scale(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs.scale(q2);
        let q3 = r.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd::new(s, e + q3)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl Real for Dd {
    fn zero() -> Self {
        Dd::ZERO
    }
    fn one() -> Self {
        Dd::ONE
    }
    fn from_f64(x: f64) -> Self {
        Dd::from_f64(x)
    }
    fn to_f64(self) -> f64 {
        Dd::to_f64(self)
    }
    fn pi() -> Self {
        Dd::PI
    }
    fn eps() -> f64 {
        1e-31
    }

    fn abs(self) -> Self {
        Dd::abs(self)
    }
    fn sqrt(self) -> Self {
        Dd::sqrt(self)
    }
    fn exp(self) -> Self {
        Dd::exp(self)
    }
    fn ln(self) -> Self {
        Dd::ln(self)
    }
    fn ln_1p(self) -> Self {
        Dd::ln_1p(self)
    }
    fn exp_m1(self) -> Self {
        Dd::exp_m1(self)
    }
    fn powi(self, n: i32) -> Self {
        Dd::powi(self, n)
    }
    fn powr(self, e: Self) -> Self {
        Dd::powr(self, e)
    }
    fn asin(self) -> Self {
        Dd::asin(self)
    }
    fn is_finite(self) -> bool {
        self.hi.is_finite()
    }
    fn scale(self, c: f64) -> Self {
        Dd::scale(self, c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_dd_eq(x: Dd, hi: f64, lo: f64, tol: f64) {
        let err = ((x.hi - hi) + (x.lo - lo)).abs();
        let scale = hi.abs().max(1e-300);
        assert!(
            err / scale < tol,
            "got ({:e}, {:e}), want ({:e}, {:e}), rel err {:e}",
            x.hi,
            x.lo,
            hi,
            lo,
            err / scale
        );
    }

    // Reference decompositions computed with mpmath at 40 digits.

    #[test]
    fn exp_matches_reference() {
        assert_dd_eq(Dd::from_f64(0.5).exp(), 1.6487212707001282, -4.731568479435833e-17, 1e-29);
        assert_dd_eq(
            Dd::from_f64(-13.25).exp(),
            1.7603463121561693e-06,
            -4.4477459694426395e-23,
            1e-29,
        );
        assert_dd_eq(Dd::from_f64(42.0).exp(), 1.739274941520501e+18, 55.394681303611236, 1e-29);
    }

    #[test]
    fn ln_matches_reference() {
        assert_dd_eq(Dd::from_f64(3.5).ln(), 1.252762968495368, -6.097690852192957e-17, 1e-29);
        assert_dd_eq(Dd::from_f64(1e-9).ln(), -20.72326583694641, -6.485730665985714e-16, 1e-29);
        assert_dd_eq(Dd::from_f64(7e40).ln(), 94.04931386881714, 3.581231735714561e-15, 1e-29);
    }

    #[test]
    fn pow_matches_reference() {
        let x = Dd::from_f64(1.7).powr(Dd::from_f64(-2.6));
        assert_dd_eq(x, 0.25167078538633003, 6.733325873382466e-18, 1e-28);
        let y = Dd::from_f64(0.0317).powr(Dd::from_f64(4.25));
        assert_dd_eq(y, 4.2609051278468087e-07, -1.7183972876465122e-23, 1e-28);
    }

    #[test]
    fn sqrt_matches_reference() {
        assert_dd_eq(Dd::from_f64(2.0).sqrt(), 1.4142135623730951, -9.667293313452913e-17, 1e-31);
        assert_dd_eq(Dd::PI.sqrt(), 1.772453850905516, -7.666586499825799e-17, 1e-30);
    }

    #[test]
    fn asin_matches_reference() {
        // acos(0.3) = pi/2 - asin(0.3)
        let acos03 = Dd::PI.ldexp(-1) - Dd::from_f64(0.3).asin();
        assert_dd_eq(acos03, 1.2661036727794992, -7.78313736852488e-17, 1e-28);
        let acos_m085 = Dd::PI.ldexp(-1) - Dd::from_f64(-0.85).asin();
        assert_dd_eq(acos_m085, 2.5867816206097216, 9.794929373910419e-17, 1e-28);
        assert_dd_eq(Dd::from_f64(0.7).sin_taylor(), 0.644217687237691, 2.8740567927338755e-18, 1e-29);
    }

    #[test]
    fn expm1_ln1p_keep_relative_accuracy_for_tiny_arguments() {
        // (1 + 2.2e-13)^2 - 1, reference from mpmath
        let x = Dd::from_f64(2.2e-13);
        let v = (x.ln_1p() * Dd::from_f64(2.0)).exp_m1();
        assert_dd_eq(v, 4.400000000000484e-13, -1.712691884482207e-29, 1e-28);
    }

    #[test]
    fn field_arithmetic_identities() {
        let a = Dd::from_f64(1.0) / Dd::from_f64(3.0);
        let three_thirds = a + a + a;
        assert!((three_thirds - Dd::ONE).to_f64().abs() < 1e-31);
        let b = Dd::from_f64(0.1) + Dd::from_f64(0.2);
        // hi rounds to the f64 sum, lo keeps the residual
        assert!((b.to_f64() - 0.3).abs() < 1e-16);
        assert!((b - Dd::from_f64(0.3)).to_f64().abs() > 0.0); // 0.1+0.2 != 0.3 exactly
    }

    #[test]
    fn powi_matches_powr() {
        let x = Dd::from_f64(1.37);
        let a = x.powi(7);
        let b = x.powr(Dd::from_f64(7.0));
        assert!(((a - b) / a).to_f64().abs() < 1e-28);
    }
}
