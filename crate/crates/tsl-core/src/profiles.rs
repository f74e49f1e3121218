//! The three explicit extremal families and the half-space norms of their
//! translates along the normal axis.
//!
//! Every profile is radial about its center `s e1`, so each half-space
//! integral reduces to a 1-D radial integral against a spherical-cap
//! fraction, and each boundary integral to a 1-D integral over the
//! tangential radius. Above the trace point the family is singular on the
//! unit sphere about its center; translates are parametrised by the gap
//! `delta = -1 - s > 0` between that sphere and the boundary hyperplane,
//! because at large trace values the gap drops below the `f64` resolution
//! of `s` itself while remaining perfectly representable on its own.

use crate::num::quad::integrate_pieces_relative;
use crate::num::sphere::{cap_fraction_from_omc, sphere_surface};
use crate::num::{Dd, GlNodes, QuadratureConfig, Real};
use crate::params::{Exponents, Params};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// The three explicit extremal families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileFamily {
    /// `U(r) = (1 + r^{p/(p-1)})^{(p-n)/p}`: extremal of the bulk Sobolev
    /// inequality, selects trace values below the trace point.
    Sobolev,
    /// `U(r) = r^{(p-n)/(p-1)}`: extremal of the boundary trace inequality,
    /// the scale-invariant seam between the regimes.
    Escobar,
    /// `U(r) = (r^{p/(p-1)} - 1)^{(p-n)/p}` for `r > 1`: the family above
    /// the trace point.
    Hyperbolic,
}

/// A profile translated by `s` along the inward normal `e1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslatedProfile {
    pub family: ProfileFamily,
    /// Translation: the radial center sits at `s e1`.
    s: f64,
    /// For the hyperbolic family, the exact gap `-1 - s > 0`.
    gap: f64,
    pub params: Params,
}

impl TranslatedProfile {
    pub fn new(family: ProfileFamily, s: f64, params: Params) -> Result<Self> {
        match family {
            ProfileFamily::Sobolev => Ok(Self { family, s, gap: 0.0, params }),
            ProfileFamily::Escobar => {
                if s >= 0.0 {
                    return Err(Error::Invalid(format!(
                        "the trace-extremal family needs s < 0 so its singular point avoids the closed half-space; got s = {s}"
                    )));
                }
                Ok(Self { family, s, gap: 0.0, params })
            }
            ProfileFamily::Hyperbolic => {
                if s >= -1.0 {
                    return Err(Error::Invalid(format!(
                        "the hyperbolic family needs s < -1 so its singular sphere avoids the closed half-space; got s = {s}"
                    )));
                }
                Ok(Self { family, s, gap: -1.0 - s, params })
            }
        }
    }

    pub fn sobolev(s: f64, params: Params) -> Self {
        Self { family: ProfileFamily::Sobolev, s, gap: 0.0, params }
    }

    pub fn escobar(s: f64, params: Params) -> Result<Self> {
        Self::new(ProfileFamily::Escobar, s, params)
    }

    /// Hyperbolic translate from the exact boundary gap `delta = -1 - s`.
    pub fn hyperbolic_from_gap(gap: f64, params: Params) -> Result<Self> {
        if !(gap > 0.0) {
            return Err(Error::Invalid(format!("boundary gap must be positive, got {gap:e}")));
        }
        Ok(Self { family: ProfileFamily::Hyperbolic, s: -(1.0 + gap), gap, params })
    }

    /// Translation parameter (for the hyperbolic family this is the rounded
    /// `-(1 + gap)`; the gap itself is exact).
    pub fn s(&self) -> f64 {
        self.s
    }

    /// Exact boundary gap for the hyperbolic family, 0 otherwise.
    pub fn gap(&self) -> f64 {
        self.gap
    }

    /// Smallest center-distance reachable inside the closed half-space.
    pub fn r_min(&self) -> f64 {
        match self.family {
            ProfileFamily::Sobolev => (-self.s).max(0.0),
            ProfileFamily::Escobar => -self.s,
            ProfileFamily::Hyperbolic => 1.0 + self.gap,
        }
    }
}

/// Pointwise evaluation of a family member.
///
/// Returns the profile value and the magnitude of its radial derivative,
/// from the closed forms. The radius is measured from the profile center.
pub fn eval_profile(family: ProfileFamily, r: f64, params: &Params) -> Result<(f64, f64)> {
    if !(r > 0.0) {
        return Err(Error::Invalid(format!("radius must be positive, got {r}")));
    }
    if family == ProfileFamily::Hyperbolic && r <= 1.0 {
        return Err(Error::Invalid(format!(
            "hyperbolic profile evaluated at r = {r} inside its singular sphere"
        )));
    }
    let e = params.exponents::<f64>();
    let q = e.q;
    let c = e.grad_coeff;
    Ok(match family {
        ProfileFamily::Sobolev => {
            let rq = (q * r.ln()).exp();
            let l = rq.ln_1p(); // ln(1 + r^q)
            let value = (e.value_pow_bulk * l).exp();
            let grad = c * ((-e.n / e.p) * l).exp() * r.powf(q - 1.0);
            (value, grad)
        }
        ProfileFamily::Escobar => {
            let value = (e.value_pow_escobar * r.ln()).exp();
            let grad = c * ((e.value_pow_escobar - 1.0) * r.ln()).exp();
            (value, grad)
        }
        ProfileFamily::Hyperbolic => {
            let x = (q * r.ln()).exp_m1(); // r^q - 1, stable near r = 1
            let l = x.ln();
            let value = (e.value_pow_bulk * l).exp();
            let grad = c * ((-e.n / e.p) * l).exp() * r.powf(q - 1.0);
            (value, grad)
        }
    })
}

/// Value, gradient magnitude and radius of the raw profile at offset
/// `u = r - r_min` from the smallest reachable center distance.
///
/// The offset form keeps full relative precision inside the boundary layer
/// of hyperbolic translates, where `r` itself cannot represent the gap.
pub fn eval_at_offset(tp: &TranslatedProfile, u: f64) -> (f64, f64, f64) {
    let e = tp.params.exponents::<f64>();
    let (l, r) = ln_base(tp.family, &e, tp.gap, tp.r_min(), u);
    match tp.family {
        ProfileFamily::Escobar => {
            let value = (e.value_pow_escobar * l).exp();
            let grad = e.grad_coeff * ((e.value_pow_escobar - 1.0) * l).exp();
            (value, grad, r)
        }
        _ => {
            let value = (e.value_pow_bulk * l).exp();
            let grad = e.grad_coeff * ((-e.n / e.p) * l).exp() * ((e.q - 1.0) * r.ln()).exp();
            (value, grad, r)
        }
    }
}

/// Raw (un-normalized) half-space norms of a translate.
#[derive(Debug, Clone, Copy)]
pub struct HalfspaceNorms<R> {
    /// `int_H U^{p*} dx`
    pub lp_star_mass: R,
    /// `int_{dH} U^{p#} dH^{n-1}`
    pub trace_mass: R,
    /// `int_H |grad U|^p dx`
    pub grad_energy: R,
    /// `int_H U^{p*} r^{p/(p-1)} dx` with `r = |x - s e1|`
    pub y_moment: R,
    /// `int_H U^{p#} dx`, the extra norm the transport identity needs.
    pub psharp_mass: Option<R>,
    /// Largest relative quadrature error bound among the computed fields.
    pub rel_err: f64,
}

/// Which bulk integrand a radial pass computes.
#[derive(Clone, Copy)]
enum BulkKind {
    MassPStar,
    MassPSharp,
    GradEnergy,
    YMoment,
}

/// ln(base(r)) for the family, from the offset `u = r - r_min`.
///
/// `gap` is exact for the hyperbolic family. Returns `(ln_base, r)`.
fn ln_base<R: Real>(family: ProfileFamily, e: &Exponents<R>, gap: f64, r_min: f64, u: R) -> (R, R) {
    match family {
        ProfileFamily::Sobolev => {
            let r = R::from_f64(r_min) + u;
            let rq = (e.q * r.ln()).exp();
            (rq.ln_1p(), r)
        }
        ProfileFamily::Escobar => {
            let r = R::from_f64(r_min) + u;
            (r.ln(), r)
        }
        ProfileFamily::Hyperbolic => {
            // r = 1 + (gap + u); r^q - 1 keeps full relative accuracy
            let x_arg = R::from_f64(gap) + u;
            let x = (e.q * x_arg.ln_1p()).exp_m1();
            (x.ln(), R::one() + x_arg)
        }
    }
}

/// One bulk radial pass: `sigma_{n-1} int integrand(r) capfrac(r, s) r^{n-1} dr`.
fn bulk_integral<R: GlNodes>(
    tp: &TranslatedProfile,
    kind: BulkKind,
    cfg: &QuadratureConfig,
) -> Result<crate::num::QuadResult<R>> {
    let e = tp.params.exponents::<R>();
    let n = tp.params.n();
    let family = tp.family;
    let gap = tp.gap;
    let r_min = tp.r_min();
    let s = tp.s;
    let sigma = sphere_surface::<R>(n - 1);
    let n_minus_1 = (n - 1) as i32;
    // |grad U|^p = grad_coeff^p exp(-n ln_base) r^q for the bulk families;
    // for the trace family it is grad_coeff^p r^{(1-n)q}
    let grad_pref = e.grad_coeff.powr(e.p);

    let integrand = move |u: R| {
        let (l, r) = ln_base(family, &e, gap, r_min, u);
        let omc = if s < 0.0 {
            u / r // (r - |s|)/r
        } else {
            R::one() + R::from_f64(s) / r
        };
        let frac = cap_fraction_from_omc(n, omc);
        let rq = (e.q * r.ln()).exp();
        let core = match (kind, family) {
            (BulkKind::MassPStar, ProfileFamily::Escobar) => (e.p_star * e.value_pow_escobar * l).exp(),
            (BulkKind::MassPStar, _) => (e.p_star * e.value_pow_bulk * l).exp(),
            (BulkKind::MassPSharp, ProfileFamily::Escobar) => (e.p_sharp * e.value_pow_escobar * l).exp(),
            (BulkKind::MassPSharp, _) => (e.p_sharp * e.value_pow_bulk * l).exp(),
            (BulkKind::GradEnergy, ProfileFamily::Escobar) => {
                grad_pref * (((e.value_pow_escobar - R::one()) * e.p) * l).exp()
            }
            (BulkKind::GradEnergy, _) => grad_pref * (-e.n * l).exp() * rq,
            (BulkKind::YMoment, ProfileFamily::Escobar) => {
                (e.p_star * e.value_pow_escobar * l).exp() * rq
            }
            (BulkKind::YMoment, _) => (e.p_star * e.value_pow_bulk * l).exp() * rq,
        };
        sigma * core * frac * r.powi(n_minus_1)
    };

    let breaks = bulk_breakpoints(tp);
    integrate_pieces_relative(integrand, &breaks, true, cfg)
}

/// Sort, deduplicate and return a strictly increasing breakpoint list.
fn finish_breakpoints(mut breaks: Vec<f64>) -> Vec<f64> {
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| *a <= *b * (1.0 + 1e-12) + 1e-300);
    breaks
}

/// Offset-variable breakpoints for bulk passes: resolve the boundary layer
/// of the hyperbolic family and the cap kink of interior translates.
fn bulk_breakpoints(tp: &TranslatedProfile) -> Vec<f64> {
    let mut breaks = vec![0.0, 1.0];
    if tp.family == ProfileFamily::Hyperbolic {
        // geometric ladder from the gap scale up to O(1)
        let mut b = tp.gap;
        while b < 0.5 {
            breaks.push(b);
            b *= 8.0;
        }
        if tp.gap > 1.0 {
            // far translate: the mass sits at offsets comparable to the gap
            breaks.push(tp.gap / 8.0);
            breaks.push(tp.gap);
            breaks.push(8.0 * tp.gap);
        }
    }
    if tp.family != ProfileFamily::Hyperbolic && tp.s < -1.0 {
        // far boundary-side translates: same scale consideration
        breaks.push(-tp.s / 8.0);
        breaks.push(-tp.s);
        breaks.push(-8.0 * tp.s);
    }
    if tp.s > 0.0 {
        // the cap fraction saturates at r = s with a kink
        breaks.push(tp.s);
        breaks.push(2.0 * tp.s);
    }
    let top = breaks.iter().cloned().fold(0.0, f64::max);
    breaks.push((4.0 * top).max(8.0));
    finish_breakpoints(breaks)
}

/// Boundary-trace pass: `sigma_{n-2} int U(sqrt(s^2 + rho^2))^{p#} rho^{n-2} drho`.
fn trace_integral<R: GlNodes>(
    tp: &TranslatedProfile,
    cfg: &QuadratureConfig,
) -> Result<crate::num::QuadResult<R>> {
    let e = tp.params.exponents::<R>();
    let n = tp.params.n();
    let family = tp.family;
    let gap = tp.gap;
    let s = tp.s;
    let sigma = sphere_surface::<R>(n - 2);
    let n_minus_2 = (n - 2) as i32;
    // eps0 = s^2 - 1 = gap (2 + gap), exact for the hyperbolic family
    let eps0 = R::from_f64(gap) * (R::from_f64(2.0) + R::from_f64(gap));

    let integrand = move |rho: R| {
        let rho2 = rho * rho;
        let value_psharp = match family {
            ProfileFamily::Sobolev => {
                let r2 = R::from_f64(s * s) + rho2;
                let rq = (e.q.scale(0.5) * r2.ln()).exp();
                (e.p_sharp * e.value_pow_bulk * rq.ln_1p()).exp()
            }
            ProfileFamily::Escobar => {
                let r2 = R::from_f64(s * s) + rho2;
                (e.p_sharp * e.value_pow_escobar * r2.ln().scale(0.5)).exp()
            }
            ProfileFamily::Hyperbolic => {
                // r^2 = 1 + (eps0 + rho^2); r^q - 1 from ln_1p of the excess
                let y = eps0 + rho2;
                let x = (e.q.scale(0.5) * y.ln_1p()).exp_m1();
                (e.p_sharp * e.value_pow_bulk * x.ln()).exp()
            }
        };
        sigma * value_psharp * rho.powi(n_minus_2)
    };

    let mut breaks = vec![0.0, 1.0];
    if tp.family == ProfileFamily::Hyperbolic {
        // integrand varies on the scale rho ~ sqrt(eps0)
        let mut b = eps0.to_f64().sqrt();
        while b < 0.5 {
            breaks.push(b);
            b *= 8.0;
        }
    }
    let smax = s.abs().max(1.0);
    if smax > 1.0 {
        breaks.push(smax / 8.0);
        breaks.push(smax);
    }
    breaks.push((2.0 * smax).max(8.0));
    integrate_pieces_relative(integrand, &finish_breakpoints(breaks), true, cfg)
}

/// All half-space norms of a translate; `with_psharp` adds the bulk `p#`
/// integral needed by the transport identity.
pub fn halfspace_norms_in<R: GlNodes>(
    tp: &TranslatedProfile,
    with_psharp: bool,
    cfg: &QuadratureConfig,
) -> Result<HalfspaceNorms<R>> {
    let mass = bulk_integral::<R>(tp, BulkKind::MassPStar, cfg)?;
    let grad = bulk_integral::<R>(tp, BulkKind::GradEnergy, cfg)?;
    let y = bulk_integral::<R>(tp, BulkKind::YMoment, cfg)?;
    let trace = trace_integral::<R>(tp, cfg)?;
    let psharp = if with_psharp {
        Some(bulk_integral::<R>(tp, BulkKind::MassPSharp, cfg)?)
    } else {
        None
    };

    let rel = |q: &crate::num::QuadResult<R>| q.error_bound / q.value.to_f64().abs().max(1e-300);
    let mut rel_err = rel(&mass).max(rel(&grad)).max(rel(&y)).max(rel(&trace));
    if let Some(p) = &psharp {
        rel_err = rel_err.max(rel(p));
    }

    Ok(HalfspaceNorms {
        lp_star_mass: mass.value,
        trace_mass: trace.value,
        grad_energy: grad.value,
        y_moment: y.value,
        psharp_mass: psharp.map(|q| q.value),
        rel_err,
    })
}

/// f64 entry point for the raw half-space norms.
pub fn halfspace_norms(tp: &TranslatedProfile, cfg: &QuadratureConfig) -> Result<HalfspaceNorms<f64>> {
    halfspace_norms_in::<f64>(tp, false, cfg)
}

/// A translate rescaled to unit `L^{p*}(H)` mass, with its trace value,
/// gradient norm and transport moment.
#[derive(Debug, Clone, Copy)]
pub struct NormalizedExtremal {
    pub base: TranslatedProfile,
    /// `||tau_s U||_{L^{p*}(H)}`, the normalizer.
    pub lp_star_normalizer: f64,
    /// Trace value `T` of the normalized profile.
    pub t: f64,
    /// Gradient norm of the normalized profile.
    pub phi: f64,
    /// Transport moment `Y_T` of the normalized profile.
    pub y_t: f64,
    /// Relative quadrature error carried by the norms.
    pub rel_err: f64,
}

impl TranslatedProfile {
    /// Spherical-cap fraction of the sphere of radius `r` about the center
    /// that lies inside the half-space, from the offset `u = r - r_min`.
    pub fn cap_fraction_at(&self, u: f64, r: f64) -> f64 {
        let omc = if self.s < 0.0 { u / r } else { 1.0 + self.s / r };
        cap_fraction_from_omc(self.params.n(), omc)
    }
}

impl NormalizedExtremal {
    /// Value and gradient magnitude of the unit-mass profile at offset `u`,
    /// together with the center distance `r`.
    pub fn value_grad_at_offset(&self, u: f64) -> (f64, f64, f64) {
        let (v, g, r) = eval_at_offset(&self.base, u);
        (v / self.lp_star_normalizer, g / self.lp_star_normalizer, r)
    }
}

/// Normalize a translate to unit bulk mass.
pub fn normalize(tp: &TranslatedProfile, cfg: &QuadratureConfig) -> Result<NormalizedExtremal> {
    let norms = halfspace_norms_in::<f64>(tp, false, cfg)?;
    let p = tp.params.p();
    let p_star = tp.params.p_star();
    let p_sharp = tp.params.p_sharp();
    let normalizer = norms.lp_star_mass.powf(1.0 / p_star);
    Ok(NormalizedExtremal {
        base: *tp,
        lp_star_normalizer: normalizer,
        t: norms.trace_mass.powf(1.0 / p_sharp) / normalizer,
        phi: norms.grad_energy.powf(1.0 / p) / normalizer,
        y_t: (norms.y_moment / norms.lp_star_mass).powf((p - 1.0) / p),
        rel_err: norms.rel_err,
    })
}

/// Trace value of the unit-mass normalized translate.
pub fn trace_ratio(tp: &TranslatedProfile, cfg: &QuadratureConfig) -> Result<f64> {
    let mass = bulk_integral::<f64>(tp, BulkKind::MassPStar, cfg)?;
    let trace = trace_integral::<f64>(tp, cfg)?;
    Ok(trace.value.powf(1.0 / tp.params.p_sharp()) / mass.value.powf(1.0 / tp.params.p_star()))
}

/// Normalized quantities in extended precision (certificate path).
#[derive(Debug, Clone, Copy)]
pub struct CertifiedPoint {
    pub t: Dd,
    pub phi: Dd,
    pub y_t: Dd,
    /// Unit-mass bulk p# integral `int_H U_T^{p#} dx`.
    pub psharp_mass: Dd,
    pub rel_err: f64,
}

/// Extended-precision normalized quantities, including the bulk `p#` norm.
pub fn certified_point(tp: &TranslatedProfile, cfg: &QuadratureConfig) -> Result<CertifiedPoint> {
    let norms = halfspace_norms_in::<Dd>(tp, true, cfg)?;
    let e = tp.params.exponents::<Dd>();
    let one = Dd::ONE;
    let normalizer = norms.lp_star_mass.powr(one / e.p_star);
    let t = norms.trace_mass.powr(one / e.p_sharp) / normalizer;
    let phi = norms.grad_energy.powr(one / e.p) / normalizer;
    let y_t = (norms.y_moment / norms.lp_star_mass).powr((e.p - one) / e.p);
    let psharp_mass = norms.psharp_mass.unwrap() / norms.lp_star_mass.powr(e.p_sharp / e.p_star);
    Ok(CertifiedPoint { t, phi, y_t, psharp_mass, rel_err: norms.rel_err })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn p32() -> Params {
        Params::new(3, 2.0).unwrap()
    }

    #[test]
    fn profile_values_at_reference_points() {
        let prm = p32();
        // U_S(0+) -> 1
        let (v, _) = eval_profile(ProfileFamily::Sobolev, 1e-12, &prm).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
        // U_E(1) = 1 for any (n, p)
        let (v, _) = eval_profile(ProfileFamily::Escobar, 1.0, &prm).unwrap();
        assert_eq!(v, 1.0);
        let (v, _) =
            eval_profile(ProfileFamily::Escobar, 1.0, &Params::new(5, 3.0).unwrap()).unwrap();
        assert_eq!(v, 1.0);
        // U_S(1) = 2^{-1/2} for n = 3, p = 2
        let (v, _) = eval_profile(ProfileFamily::Sobolev, 1.0, &prm).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn eval_rejects_singular_points() {
        let prm = p32();
        assert!(eval_profile(ProfileFamily::Hyperbolic, 1.0, &prm).is_err());
        assert!(eval_profile(ProfileFamily::Hyperbolic, 0.5, &prm).is_err());
        assert!(eval_profile(ProfileFamily::Sobolev, 0.0, &prm).is_err());
    }

    #[test]
    fn gradient_matches_centered_difference() {
        let prm = Params::new(4, 2.5).unwrap();
        for family in [ProfileFamily::Sobolev, ProfileFamily::Escobar, ProfileFamily::Hyperbolic] {
            for &r in &[1.25f64, 2.0, 3.7] {
                let h = 1e-5;
                let (_, g) = eval_profile(family, r, &prm).unwrap();
                let (vp, _) = eval_profile(family, r + h, &prm).unwrap();
                let (vm, _) = eval_profile(family, r - h, &prm).unwrap();
                let fd = (vp - vm) / (2.0 * h);
                assert!(
                    (g - fd.abs()).abs() < 1e-8 * g.max(1.0),
                    "{family:?} r={r}: closed {g} vs fd {fd}"
                );
            }
        }
    }

    #[test]
    fn escobar_norms_match_closed_forms_3_2() {
        // at s = -1, n = 3, p = 2 the raw norms are exactly
        // mass = pi/6, trace = pi, grad = pi, psharp bulk = pi, y = pi
        let tp = TranslatedProfile::escobar(-1.0, p32()).unwrap();
        let norms = halfspace_norms_in::<f64>(&tp, true, &cfg()).unwrap();
        assert!((norms.lp_star_mass - PI / 6.0).abs() < 1e-10);
        assert!((norms.trace_mass - PI).abs() < 1e-9);
        assert!((norms.grad_energy - PI).abs() < 1e-9);
        assert!((norms.psharp_mass.unwrap() - PI).abs() < 1e-9);
        assert!((norms.y_moment - PI).abs() < 1e-9);
    }

    #[test]
    fn escobar_norms_match_closed_forms_2_15() {
        // at s = -1, n = 2, p = 3/2: mass = 3 pi/32, trace = 2, grad = 2
        let prm = Params::new(2, 1.5).unwrap();
        let tp = TranslatedProfile::escobar(-1.0, prm).unwrap();
        let norms = halfspace_norms_in::<f64>(&tp, true, &cfg()).unwrap();
        assert!((norms.lp_star_mass - 3.0 * PI / 32.0).abs() < 1e-11);
        assert!((norms.trace_mass - 2.0).abs() < 1e-9);
        assert!((norms.grad_energy - 2.0).abs() < 1e-9);
    }

    #[test]
    fn reflection_identity_at_s_zero() {
        // a profile centered on the boundary puts exactly half its bulk
        // mass in the half-space: full-space mass of U_S^6 is pi^2/4 at (3,2)
        let tp = TranslatedProfile::sobolev(0.0, p32());
        let norms = halfspace_norms(&tp, &cfg()).unwrap();
        assert!((norms.lp_star_mass - PI * PI / 8.0).abs() < 1e-10);
        assert!((norms.grad_energy - 3.0 * PI * PI / 8.0).abs() < 1e-9);
        assert!((norms.trace_mass - PI).abs() < 1e-9);
    }

    #[test]
    fn deep_interior_translate_loses_its_trace() {
        // trace ratio T -> 0 as the center moves deep into the half-space
        let tp = TranslatedProfile::sobolev(50.0, p32());
        let norms = halfspace_norms(&tp, &cfg()).unwrap();
        let ratio = norms.trace_mass / norms.lp_star_mass.powf(4.0 / 6.0);
        assert!(ratio < 1e-3, "ratio {ratio}");
    }

    #[test]
    fn escobar_translates_are_dilates_of_each_other() {
        // (T, phi) of the normalized translate is the same at s = -1, -2
        let prm = p32();
        let a = normalize(&TranslatedProfile::escobar(-1.0, prm).unwrap(), &cfg()).unwrap();
        let b = normalize(&TranslatedProfile::escobar(-2.0, prm).unwrap(), &cfg()).unwrap();
        assert!((a.t - b.t).abs() < 1e-8 * a.t);
        assert!((a.phi - b.phi).abs() < 1e-8 * a.phi);
    }

    #[test]
    fn normalizing_gives_unit_mass() {
        let prm = p32();
        for tp in [
            TranslatedProfile::sobolev(0.7, prm),
            TranslatedProfile::escobar(-1.3, prm).unwrap(),
            TranslatedProfile::hyperbolic_from_gap(0.25, prm).unwrap(),
        ] {
            let nz = normalize(&tp, &cfg()).unwrap();
            let norms = halfspace_norms(&tp, &cfg()).unwrap();
            let unit = norms.lp_star_mass / nz.lp_star_normalizer.powi(6);
            assert!((unit - 1.0).abs() < 1e-10, "{tp:?}: {unit}");
        }
    }

    #[test]
    fn trace_ratio_decreases_in_s_for_the_bulk_family() {
        let prm = p32();
        let mut prev = f64::INFINITY;
        for k in 0..=16 {
            let s = -4.0 + k as f64 * 0.5;
            let t = trace_ratio(&TranslatedProfile::sobolev(s, prm), &cfg()).unwrap();
            assert!(t < prev, "T(s) not decreasing at s = {s}: {t} vs {prev}");
            prev = t;
        }
    }

    #[test]
    fn hyperbolic_gap_parametrisation_reaches_extreme_trace_values() {
        // the trace value grows as the gap shrinks, far below f64 ulp of s
        let prm = p32();
        let t_moderate =
            trace_ratio(&TranslatedProfile::hyperbolic_from_gap(1e-6, prm).unwrap(), &cfg()).unwrap();
        let t_tiny =
            trace_ratio(&TranslatedProfile::hyperbolic_from_gap(1e-18, prm).unwrap(), &cfg()).unwrap();
        assert!(t_tiny > 2.0 * t_moderate, "{t_tiny} vs {t_moderate}");
        assert!(t_tiny.is_finite());
    }

    #[test]
    fn dd_norms_agree_with_f64() {
        let tp = TranslatedProfile::sobolev(0.4, p32());
        let f = halfspace_norms_in::<f64>(&tp, true, &cfg()).unwrap();
        let d = halfspace_norms_in::<Dd>(&tp, true, &QuadratureConfig::certificate()).unwrap();
        assert!((f.lp_star_mass - d.lp_star_mass.to_f64()).abs() < 1e-9 * f.lp_star_mass);
        assert!((f.grad_energy - d.grad_energy.to_f64()).abs() < 1e-9 * f.grad_energy);
        assert!((f.trace_mass - d.trace_mass.to_f64()).abs() < 1e-9 * f.trace_mass);
    }
}
