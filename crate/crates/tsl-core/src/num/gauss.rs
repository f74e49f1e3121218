//! Gauss-Legendre nodes and weights, computed at startup by Newton
//! refinement of the classical cosine seeds rather than from tables, so the
//! `f64` and double-double rules share one code path.

use super::dd::Dd;
use super::real::Real;
use std::sync::OnceLock;

/// Order of the fixed panel rule used by the adaptive integrator.
pub const GL_ORDER: usize = 16;

/// Legendre P_n(x) and its derivative by the three-term recurrence.
fn legendre<R: Real>(n: usize, x: R) -> (R, R) {
    let mut p_prev = R::one();
    let mut p = x;
    for k in 1..n {
        let kf = k as f64;
        // coefficients as exact integer ratios in R
        let kp1 = R::from_f64(kf + 1.0);
        let p_next = (R::from_f64(2.0 * kf + 1.0) * x * p - R::from_f64(kf) * p_prev) / kp1;
        p_prev = p;
        p = p_next;
    }
    // P'_n = n (x P_n - P_{n-1}) / (x^2 - 1)
    let nf = R::from_f64(n as f64);
    let dp = nf * (x * p - p_prev) / (x * x - R::one());
    (p, dp)
}

/// Positive half of the order-`n` rule as (node, weight) pairs.
fn compute_half_nodes<R: Real>(n: usize) -> Vec<(R, R)> {
    assert!(n % 2 == 0);
    let mut out = Vec::with_capacity(n / 2);
    for i in 1..=n / 2 {
        // seed, then Newton in f64, then Newton in R
        let mut x64 = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        for _ in 0..20 {
            let (p, dp) = legendre::<f64>(n, x64);
            let step = p / dp;
            x64 -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let mut x = R::from_f64(x64);
        for _ in 0..3 {
            let (p, dp) = legendre::<R>(n, x);
            x = x - p / dp;
        }
        let (_, dp) = legendre::<R>(n, x);
        let w = R::from_f64(2.0) / ((R::one() - x * x) * dp * dp);
        out.push((x, w));
    }
    out
}

/// Access to the cached order-16 rule for a scalar type.
pub trait GlNodes: Real + Sized + 'static {
    /// Positive-half (node, weight) pairs of the 16-point rule.
    fn gl_half_nodes() -> &'static [(Self, Self)];
}

impl GlNodes for f64 {
    fn gl_half_nodes() -> &'static [(f64, f64)] {
        static CELL: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
        CELL.get_or_init(|| compute_half_nodes::<f64>(GL_ORDER))
    }
}

impl GlNodes for Dd {
    fn gl_half_nodes() -> &'static [(Dd, Dd)] {
        static CELL: OnceLock<Vec<(Dd, Dd)>> = OnceLock::new();
        CELL.get_or_init(|| compute_half_nodes::<Dd>(GL_ORDER))
    }
}

/// One panel of the 16-point rule on [a, b].
///
/// The affine map is evaluated in `R` so that adjacent panels tile the
/// interval to the precision of `R`, not merely of `f64`.
pub fn gl_panel<R: GlNodes>(f: &impl Fn(R) -> R, a: f64, b: f64) -> R {
    let center = (R::from_f64(a) + R::from_f64(b)).scale(0.5);
    let half = (R::from_f64(b) - R::from_f64(a)).scale(0.5);
    let mut sum = R::zero();
    for &(x, w) in R::gl_half_nodes() {
        let dx = half * x;
        sum = sum + w * (f(center + dx) + f(center - dx));
    }
    sum * half
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_match_published_values() {
        // Last entries of the standard 16-point table.
        let nodes = f64::gl_half_nodes();
        let smallest = nodes.iter().map(|&(x, _)| x).fold(f64::INFINITY, f64::min);
        let largest = nodes.iter().map(|&(x, _)| x).fold(0.0, f64::max);
        assert!((smallest - 0.0950125098376374).abs() < 1e-14);
        assert!((largest - 0.9894009349916499).abs() < 1e-14);
        let wsum: f64 = 2.0 * nodes.iter().map(|&(_, w)| w).sum::<f64>();
        assert!((wsum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn dd_nodes_sum_to_two() {
        let nodes = Dd::gl_half_nodes();
        let mut wsum = Dd::ZERO;
        for &(_, w) in nodes {
            wsum = wsum + w;
        }
        let wsum = wsum.ldexp(1);
        assert!((wsum - Dd::ONE.ldexp(1)).to_f64().abs() < 1e-30);
    }

    #[test]
    fn panel_integrates_polynomials_exactly() {
        // order 16 is exact through degree 31
        let f = |x: f64| x.powi(10) - 3.0 * x.powi(7) + x;
        let got = gl_panel(&f, 0.0, 2.0);
        let want = 2.0f64.powi(11) / 11.0 - 3.0 * 2.0f64.powi(8) / 8.0 + 2.0;
        assert!((got - want).abs() < 1e-12 * want.abs());
    }
}
