//! Spherical-cap area fractions.
//!
//! `cap_area_fraction(n, theta)` is the fraction of the unit sphere
//! `S^{n-1}` within angle `theta` of the pole. Half-space integrals of
//! profiles radial about a point on the `e1`-axis reduce to 1-D radial
//! integrals against this fraction evaluated at `cos(theta) = -s/r`.
//!
//! The fraction is the regularized incomplete Beta `I_x((n-1)/2, 1/2)/2`
//! with `x = sin^2(theta)`; dimensions 2 through 5 use the elementary closed
//! forms, higher dimensions the continued fraction. All entry points take
//! `1 - cos(theta)` so that thin caps (the hyperbolic boundary layer) lose
//! no precision.

use super::real::Real;
use crate::{Error, Result};

/// Surface area of the unit sphere S^k in R^{k+1}.
///
/// Computed from sigma_k = 2 pi^{(k+1)/2} / Gamma((k+1)/2) with the Gamma
/// factor unwound as exact integer/half-integer recursions.
pub fn sphere_surface<R: Real>(k: u32) -> R {
    let two = R::from_f64(2.0);
    let pi = R::pi();
    // Gamma((k+1)/2) by the recursion from Gamma(1/2) = sqrt(pi) or Gamma(1)
    let twice_arg = k + 1;
    let mut gamma = if twice_arg % 2 == 0 { R::one() } else { pi.sqrt() };
    let mut m = if twice_arg % 2 == 0 { 2 } else { 1 };
    while m + 2 <= twice_arg {
        gamma = gamma * R::from_f64(m as f64 / 2.0);
        m += 2;
    }
    // pi^{(k+1)/2} as integer power times optional sqrt
    let mut pi_pow = pi.powi((twice_arg / 2) as i32);
    if twice_arg % 2 == 1 {
        pi_pow = pi_pow * pi.sqrt();
    }
    two * pi_pow / gamma
}

/// ln of nothing needed: B((n-1)/2, 1/2) as an exact rational times
/// (optionally) pi, avoiding any Gamma evaluation.
fn beta_half<R: Real>(n: u32) -> R {
    if n % 2 == 1 {
        // a = (n-1)/2 integer k: B(k, 1/2) = (k-1)! 4^k k! / (2k)!
        let k = ((n - 1) / 2) as u64;
        let mut num = R::one();
        for j in 1..k {
            num = num * R::from_f64(j as f64);
        }
        for j in 1..=k {
            num = num * R::from_f64(j as f64);
        }
        let mut den = R::one();
        for j in 1..=2 * k {
            den = den * R::from_f64(j as f64);
        }
        num.scale(4f64.powi(k as i32)) / den
    } else {
        // a = m + 1/2: B(m + 1/2, 1/2) = pi (2m)! / (4^m m!^2)
        let m = ((n - 2) / 2) as u64;
        let mut num = R::pi();
        for j in 1..=2 * m {
            num = num * R::from_f64(j as f64);
        }
        let mut den = R::from_f64(4f64.powi(m as i32));
        for j in 1..=m {
            den = den * R::from_f64((j * j) as f64);
        }
        num / den
    }
}

/// Regularized incomplete Beta I_x(a, b) by the continued fraction
/// (modified Lentz), with the symmetry swap for fast convergence.
/// `beta_ab` must be B(a, b); prefactor x^a (1-x)^b is formed with powr.
fn betainc_cf<R: Real>(a: f64, b: f64, x: R, beta_ab: R) -> R {
    let one = R::one();
    if x <= R::zero() {
        return R::zero();
    }
    if x >= one {
        return one;
    }
    if x.to_f64() > (a + 1.0) / (a + b + 2.0) {
        return one - betainc_cf(b, a, one - x, beta_ab);
    }
    let tiny = R::from_f64(1e-290);
    let prefix = x.powr(R::from_f64(a)) * (one - x).powr(R::from_f64(b)) / (beta_ab.scale(a));

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = one;
    let mut d = one - x.scale(qab) / R::from_f64(qap);
    if d.abs() < tiny {
        d = tiny;
    }
    d = one / d;
    let mut h = d;
    for m in 1..=400 {
        let mf = m as f64;
        let m2 = 2.0 * mf;
        let aa = x.scale(mf * (b - mf)) / R::from_f64((qam + m2) * (a + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        h = h * d * c;
        let aa = -x.scale((a + mf) * (qab + mf)) / R::from_f64((a + m2) * (qap + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        let delta = d * c;
        h = h * delta;
        if (delta - one).abs().to_f64() < R::eps() {
            break;
        }
    }
    prefix * h
}

/// theta - sin(theta) cos(theta), stable for small theta.
fn theta_minus_sin_cos<R: Real>(theta: R, sin_t: R, cos_t: R) -> R {
    if theta.to_f64() > 0.7 {
        return theta - sin_t * cos_t;
    }
    // series of theta - sin(2 theta)/2 in u = 2 theta
    let u = theta.scale(2.0);
    let u2 = u * u;
    // sum_{k>=1} (-1)^{k+1} u^{2k+1} / (2 (2k+1)!)
    let mut term = u * u2 / R::from_f64(12.0); // k = 1 term: u^3/12
    let mut sum = term;
    for k in 2..=16 {
        let denom = (2 * k) as f64 * (2 * k + 1) as f64;
        term = -term * u2 / R::from_f64(denom);
        sum = sum + term;
        if term.abs().to_f64() < 1e-35 * sum.abs().to_f64() {
            break;
        }
    }
    sum
}

/// Cap fraction from `omc = 1 - cos(theta)`, valid for omc in [0, 2].
pub fn cap_fraction_from_omc<R: Real>(n: u32, omc: R) -> R {
    debug_assert!(n >= 2);
    let zero = R::zero();
    let one = R::one();
    let two = R::from_f64(2.0);
    if omc <= zero {
        return zero;
    }
    if omc >= two {
        return one;
    }
    if omc > one {
        // reflection: frac(theta) = 1 - frac(pi - theta)
        return one - cap_fraction_from_omc(n, two - omc);
    }
    // theta <= pi/2 here; x = sin^2 theta = omc (2 - omc)
    let x = omc * (two - omc);
    match n {
        2 => {
            // arc fraction theta / pi with theta = 2 asin(sqrt(omc/2))
            let theta = (omc.scale(0.5)).sqrt().asin().scale(2.0);
            theta / R::pi()
        }
        3 => omc.scale(0.5),
        4 => {
            let theta = (omc.scale(0.5)).sqrt().asin().scale(2.0);
            let sin_t = x.sqrt();
            let cos_t = one - omc;
            theta_minus_sin_cos(theta, sin_t, cos_t) / R::pi()
        }
        5 => omc * omc * (R::from_f64(3.0) - omc).scale(0.25),
        _ => {
            let a = (n - 1) as f64 / 2.0;
            betainc_cf(a, 0.5, x, beta_half::<R>(n)).scale(0.5)
        }
    }
}

/// Fraction of S^{n-1} surface within angle `theta_max` of the pole.
pub fn cap_area_fraction(n: u32, theta_max: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Invalid(format!("dimension n = {n} must be >= 2")));
    }
    if !(0.0..=std::f64::consts::PI).contains(&theta_max) {
        return Err(Error::Invalid(format!("thetaMax = {theta_max} outside [0, pi]")));
    }
    // 1 - cos(theta) = 2 sin^2(theta/2), stable for small theta
    let half_sin = (0.5 * theta_max).sin();
    Ok(cap_fraction_from_omc(n, 2.0 * half_sin * half_sin))
}
