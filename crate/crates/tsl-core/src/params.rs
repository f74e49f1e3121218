//! Dimension/exponent bookkeeping.

use crate::num::{Dd, Real};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Dimension `n >= 2` and gradient exponent `p` in `(1, n)`, with the two
/// critical exponents they determine: the bulk exponent `p* = np/(n-p)` and
/// the trace exponent `p# = (n-1)p/(n-p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    n: u32,
    p: f64,
}

impl Params {
    pub fn new(n: u32, p: f64) -> Result<Params> {
        if n < 2 {
            return Err(Error::Invalid(format!("dimension n = {n} must be >= 2")));
        }
        if !(p > 1.0 && p < n as f64) {
            return Err(Error::Invalid(format!("exponent p = {p} must lie in (1, n) = (1, {n})")));
        }
        Ok(Params { n, p })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Bulk critical exponent p* = np/(n-p).
    pub fn p_star(&self) -> f64 {
        self.nf() * self.p / (self.nf() - self.p)
    }

    /// Trace critical exponent p# = (n-1)p/(n-p).
    pub fn p_sharp(&self) -> f64 {
        (self.nf() - 1.0) * self.p / (self.nf() - self.p)
    }

    /// Dual exponent q = p/(p-1) appearing in the profile formulas.
    pub fn q(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    /// The exponents in a scalar type; in double-double they are derived
    /// from the exact integer `n` and the exact `f64` value of `p`.
    pub fn exponents<R: Real>(&self) -> Exponents<R> {
        let n = R::from_f64(self.nf());
        let p = R::from_f64(self.p);
        let one = R::one();
        let n_minus_p = n - p;
        Exponents {
            n,
            p,
            p_star: n * p / n_minus_p,
            p_sharp: (n - one) * p / n_minus_p,
            q: p / (p - one),
            // (p - n)/p and (p - n)/(p - 1): profile value exponents
            value_pow_bulk: (p - n) / p,
            value_pow_escobar: (p - n) / (p - one),
            grad_coeff: n_minus_p / (p - one),
        }
    }

    pub fn exponents_dd(&self) -> Exponents<Dd> {
        self.exponents::<Dd>()
    }
}

/// Derived exponents in a scalar type `R`.
#[derive(Debug, Clone, Copy)]
pub struct Exponents<R> {
    pub n: R,
    pub p: R,
    pub p_star: R,
    pub p_sharp: R,
    pub q: R,
    /// (p - n)/p, the outer power of the bulk-regime and hyperbolic profiles.
    pub value_pow_bulk: R,
    /// (p - n)/(p - 1), the power of the boundary-trace profile.
    pub value_pow_escobar: R,
    /// (n - p)/(p - 1), the common gradient prefactor of all three families.
    pub grad_coeff: R,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_exponents() {
        let p32 = Params::new(3, 2.0).unwrap();
        assert_eq!(p32.p_star(), 6.0);
        assert_eq!(p32.p_sharp(), 4.0);
        assert_eq!(p32.q(), 2.0);
        let p215 = Params::new(2, 1.5).unwrap();
        assert_eq!(p215.p_star(), 6.0);
        assert_eq!(p215.p_sharp(), 3.0);
        assert_eq!(p215.q(), 3.0);
    }

    #[test]
    fn exponent_ordering_invariant() {
        for (n, p) in [(2u32, 1.5f64), (3, 2.0), (4, 2.5), (5, 3.0), (7, 1.2)] {
            let prm = Params::new(n, p).unwrap();
            assert!(prm.p() < prm.p_sharp());
            assert!(prm.p_sharp() < prm.p_star());
            let ratio = prm.p_sharp() / prm.p_star();
            assert!((ratio - (n as f64 - 1.0) / n as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(Params::new(1, 0.5).is_err());
        assert!(Params::new(3, 1.0).is_err());
        assert!(Params::new(3, 3.0).is_err());
        assert!(Params::new(3, 3.5).is_err());
    }
}
