//! Bracketed scalar root finding: bisection with a secant acceleration step,
//! falling back to bisection whenever the secant step fails to contract.

use crate::{Error, Result};

/// A bracketing interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Bracket> {
        if !(lo < hi) {
            return Err(Error::Invalid(format!("bracket needs lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Bracket { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Find a root of `g` inside `bracket`, assuming a sign change.
///
/// Deterministic for fixed inputs. The returned point has bracket width
/// at most `tol` around it (or an exact zero was hit).
pub fn find_root_bracketed(g: impl Fn(f64) -> f64, bracket: Bracket, tol: f64) -> Result<f64> {
    let mut lo = bracket.lo;
    let mut hi = bracket.hi;
    let mut f_lo = g(lo);
    let mut f_hi = g(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::BracketSign { lo, hi, f_lo, f_hi });
    }
    let tol = tol.max(f64::EPSILON);

    for _ in 0..200 {
        let width = hi - lo;
        if width <= tol {
            // midpoint of the final bracket
            return Ok(0.5 * (lo + hi));
        }
        // secant candidate from the bracket endpoints
        let secant = lo - f_lo * width / (f_hi - f_lo);
        // accept if strictly interior and contracting; otherwise bisect
        let interior = secant > lo + 0.01 * width && secant < hi - 0.01 * width;
        let x = if interior { secant } else { 0.5 * (lo + hi) };
        let fx = g(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == f_lo.signum() {
            // root in [x, hi]; if the secant barely moved, force a bisection
            if x - lo < 0.25 * width && interior {
                let m = 0.5 * (x + hi);
                let fm = g(m);
                if fm == 0.0 {
                    return Ok(m);
                }
                if fm.signum() == f_lo.signum() {
                    lo = m;
                    f_lo = fm;
                } else {
                    lo = x;
                    f_lo = fx;
                    hi = m;
                    f_hi = fm;
                }
            } else {
                lo = x;
                f_lo = fx;
            }
        } else if hi - x < 0.25 * width && interior {
            let m = 0.5 * (lo + x);
            let fm = g(m);
            if fm == 0.0 {
                return Ok(m);
            }
            if fm.signum() == f_lo.signum() {
                lo = m;
                f_lo = fm;
                hi = x;
                f_hi = fx;
            } else {
                hi = m;
                f_hi = fm;
            }
        } else {
            hi = x;
            f_hi = fx;
        }
    }
    Err(Error::NonConvergence(format!(
        "root refinement stalled on [{lo:e}, {hi:e}] (width {:e}, tol {tol:e})",
        hi - lo
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_root() {
        let x = find_root_bracketed(|s| s - 2.0, Bracket::new(0.0, 5.0).unwrap(), 1e-12).unwrap();
        assert!((x - 2.0).abs() < 1e-11);
    }

    #[test]
    fn cube_root_of_five() {
        let x = find_root_bracketed(|s| s * s * s - 5.0, Bracket::new(0.0, 3.0).unwrap(), 1e-13).unwrap();
        assert!((x - 5f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn same_sign_bracket_reports_both_endpoint_values() {
        let err = find_root_bracketed(|s| s * s + 1.0, Bracket::new(-1.0, 1.0).unwrap(), 1e-10)
            .unwrap_err();
        match err {
            Error::BracketSign { f_lo, f_hi, .. } => {
                assert_eq!(f_lo, 2.0);
                assert_eq!(f_hi, 2.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn halving_tol_moves_root_less_than_tol() {
        let g = |s: f64| (s * 1.3).tanh() - 0.42;
        let b = Bracket::new(0.0, 2.0).unwrap();
        let tol = 1e-8;
        let a = find_root_bracketed(g, b, tol).unwrap();
        let b2 = find_root_bracketed(g, b, tol / 2.0).unwrap();
        assert!((a - b2).abs() <= tol);
        // residual smallness relative to endpoint values
        assert!(g(a).abs() <= g(0.0).abs() + g(2.0).abs());
    }

    #[test]
    fn deterministic() {
        let g = |s: f64| s.exp() - 3.0;
        let b = Bracket::new(0.0, 2.0).unwrap();
        let a = find_root_bracketed(g, b, 1e-14).unwrap();
        let c = find_root_bracketed(g, b, 1e-14).unwrap();
        assert_eq!(a.to_bits(), c.to_bits());
    }
}
