//! Derivative-free scalar minimisation by golden-section search.

use super::root::Bracket;
use crate::Result;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Refine a local minimiser of `h` on the bracket to width `tol`.
///
/// For unimodal `h` this is the global minimiser on the bracket.
pub fn minimize_scalar(h: impl Fn(f64) -> f64, bracket: Bracket, tol: f64) -> Result<(f64, f64)> {
    let mut a = bracket.lo;
    let mut b = bracket.hi;
    let tol = tol.max(1e-15 * (a.abs().max(b.abs()).max(1.0)));

    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = h(c);
    let mut fd = h(d);

    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = h(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = h(d);
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, h(x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let (x, v) = minimize_scalar(|x| (x - 1.0).powi(2), Bracket::new(0.0, 3.0).unwrap(), 1e-10)
            .unwrap();
        assert!((x - 1.0).abs() < 1e-7);
        assert!(v < 1e-13);
    }

    #[test]
    fn quartic_double_well_on_positive_branch() {
        // x^4 - 2x^2 has minimum (1, -1) on [0, 2]
        let (x, v) =
            minimize_scalar(|x| x.powi(4) - 2.0 * x * x, Bracket::new(0.0, 2.0).unwrap(), 1e-10)
                .unwrap();
        assert!((x - 1.0).abs() < 1e-6);
        assert!((v + 1.0).abs() < 1e-10);
    }

    #[test]
    fn deterministic() {
        let h = |x: f64| x.cos() + 0.1 * x;
        let b = Bracket::new(1.0, 6.0).unwrap();
        let (x1, _) = minimize_scalar(h, b, 1e-12).unwrap();
        let (x2, _) = minimize_scalar(h, b, 1e-12).unwrap();
        assert_eq!(x1.to_bits(), x2.to_bits());
    }
}
