//! Pointwise-evaluable test functions on the half-space, and the 2-D
//! quadrature that measures their norms.
//!
//! Everything here is axisymmetric about the `e1`-axis (for `n >= 3`) or
//! lives on the full plane (for `n = 2`, where tangentially separated bumps
//! break axisymmetry). A point is `(x1, t)`: normal coordinate `x1 >= 0`
//! and signed tangential coordinate `t`; for the axisymmetric case `t` is
//! the tangential radius and integrals carry the weight
//! `sigma_{n-2} t^{n-2}`.

use crate::binding::SplitConstruction;
use crate::num::quad::integrate_pieces_relative;
use crate::num::sphere::sphere_surface;
use crate::num::QuadratureConfig;
use crate::profiles::NormalizedExtremal;
use crate::{Error, Params, Result};

/// Quintic smoothstep: C^2 monotone ramp from (0,0) to (1,1).
pub fn smootherstep(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        x * x * x * (10.0 - 15.0 * x + 6.0 * x * x)
    }
}

/// Derivative of [`smootherstep`].
pub fn smootherstep_deriv(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        30.0 * x * x * (1.0 - x) * (1.0 - x)
    }
}

/// Radial cutoff: 1 on `[0, half]`, 0 beyond `r_max = 2 half`, quintic ramp
/// between. Returns (eta, eta').
pub fn radial_cutoff(r: f64, r_max: f64) -> (f64, f64) {
    let half = 0.5 * r_max;
    if r <= half {
        (1.0, 0.0)
    } else if r >= r_max {
        (0.0, 0.0)
    } else {
        let x = (r - half) / half;
        (1.0 - smootherstep(x), -smootherstep_deriv(x) / half)
    }
}

/// Compactly supported radial bump: 1 at the center, 0 at `radius`, C^2.
/// Returns (phi, phi').
pub fn radial_bump(r: f64, radius: f64) -> (f64, f64) {
    if r >= radius {
        return (0.0, 0.0);
    }
    let x = r / radius;
    (1.0 - smootherstep(x), -smootherstep_deriv(x) / radius)
}

/// A pointwise-evaluable scalar field on the half-space with an analytic
/// gradient in the `(x1, t)` plane.
pub trait Field: Sync {
    /// Value and gradient `(d/dx1, d/dt)` at `(x1, t)`.
    fn eval(&self, x1: f64, t: f64) -> (f64, f64, f64);
    /// A bounding box `(x1_max, |t|_max)` outside which the field is
    /// negligible (or exactly zero).
    fn extent(&self) -> (f64, f64);
    /// Whether the field is symmetric under `t -> -t`.
    fn tangential_symmetric(&self) -> bool;
}

/// One translated, optionally dilated and cut-off extremal bump.
#[derive(Debug, Clone)]
pub struct ExtremalPiece {
    pub extremal: NormalizedExtremal,
    /// Scalar multiplier.
    pub amplitude: f64,
    /// Mass-preserving dilation factor (1 = none), about the boundary
    /// point below the profile center.
    pub dilation: f64,
    /// Tangential position of the center.
    pub tangential_offset: f64,
    /// Optional radial cutoff (1 inside half the radius, 0 outside it).
    pub cutoff_radius: Option<f64>,
}

impl ExtremalPiece {
    pub fn plain(extremal: NormalizedExtremal) -> Self {
        ExtremalPiece {
            extremal,
            amplitude: 1.0,
            dilation: 1.0,
            tangential_offset: 0.0,
            cutoff_radius: None,
        }
    }

    /// Value and planar gradient at `(x1, t)`.
    fn eval(&self, x1: f64, t: f64) -> (f64, f64, f64) {
        let prm = self.extremal.base.params;
        let a = self.dilation;
        // mass-preserving dilation: v(x) = a^{-n/p*} U(x/a)
        let amp = self.amplitude * a.powf(-prm.nf() / prm.p_star());
        let s = self.extremal.base.s();
        let (x1d, td) = (x1 / a, (t - self.tangential_offset) / a);
        let dx1 = x1d - s;
        let dt = td;
        let r = (dx1 * dx1 + dt * dt).sqrt();
        let u = (r - self.extremal.base.r_min()).max(0.0);
        if r < 1e-14 {
            // at the center of the bulk family the value is finite, grad 0
            let (v, _, _) = self.extremal.value_grad_at_offset(0.0);
            return (amp * v, 0.0, 0.0);
        }
        let (v, g, _) = self.extremal.value_grad_at_offset(u);
        let (eta, deta) = match self.cutoff_radius {
            Some(rc) => radial_cutoff(r, rc),
            None => (1.0, 0.0),
        };
        let radial_slope = (-g * eta + v * deta) / a; // signed d/dr, both terms <= 0
        let value = amp * v * eta;
        (value, amp * radial_slope * dx1 / r, amp * radial_slope * dt / r)
    }

    fn extent(&self) -> (f64, f64) {
        let reach = match self.cutoff_radius {
            Some(rc) => rc + self.extremal.base.s().abs(),
            // heavy polynomial tails: pick a radius capturing the mass
            None => 40.0 + 8.0 * self.extremal.base.s().abs(),
        };
        let reach = reach * self.dilation;
        (reach, reach + self.tangential_offset.abs())
    }
}

/// A smooth compact bump piece, optionally squashed along the normal axis
/// (aspect < 1 makes a boundary-hugging pancake whose bulk mass shrinks
/// linearly while its trace stays put).
#[derive(Debug, Clone)]
pub struct BumpPiece {
    pub amplitude: f64,
    pub radius: f64,
    /// Normal-axis scale factor of the ellipsoidal support.
    pub aspect: f64,
    pub center_normal: f64,
    pub center_tangential: f64,
}

impl BumpPiece {
    fn eval(&self, x1: f64, t: f64) -> (f64, f64, f64) {
        let dx1 = (x1 - self.center_normal) / self.aspect;
        let dt = t - self.center_tangential;
        let xi = (dx1 * dx1 + dt * dt).sqrt();
        if xi >= self.radius {
            return (0.0, 0.0, 0.0);
        }
        let (phi, dphi) = radial_bump(xi, self.radius);
        if xi < 1e-14 {
            return (self.amplitude * phi, 0.0, 0.0);
        }
        (
            self.amplitude * phi,
            self.amplitude * dphi * dx1 / (xi * self.aspect),
            self.amplitude * dphi * dt / xi,
        )
    }
}

/// A sum of extremal pieces and compact bumps.
#[derive(Debug, Clone, Default)]
pub struct CompositeField {
    pub extremals: Vec<ExtremalPiece>,
    pub bumps: Vec<BumpPiece>,
}

impl CompositeField {
    pub fn scaled(mut self, c: f64) -> Self {
        for p in &mut self.extremals {
            p.amplitude *= c;
        }
        for b in &mut self.bumps {
            b.amplitude *= c;
        }
        self
    }

    /// The two-bump competitor of a split construction as a field
    /// (tangential direction carries the separation).
    pub fn from_split(sc: &SplitConstruction) -> Self {
        let mut f = CompositeField::default();
        let half_sep = 0.5 * sc.sep;
        for (i, bump) in sc.bumps.iter().enumerate() {
            let sign = if i == 0 { 1.0 } else { -1.0 };
            f.extremals.push(ExtremalPiece {
                extremal: bump.extremal,
                amplitude: bump.amplitude,
                dilation: 1.0,
                tangential_offset: sign * half_sep,
                cutoff_radius: Some(sc.r_cutoff),
            });
        }
        for c in &sc.corrections {
            if c.amplitude > 0.0 {
                f.bumps.push(BumpPiece {
                    amplitude: c.amplitude,
                    radius: c.radius,
                    aspect: c.aspect,
                    center_normal: c.center_normal,
                    center_tangential: c.center_tangential,
                });
            }
        }
        f
    }
}

impl Field for CompositeField {
    fn eval(&self, x1: f64, t: f64) -> (f64, f64, f64) {
        let mut v = 0.0;
        let mut g1 = 0.0;
        let mut gt = 0.0;
        for p in &self.extremals {
            let (pv, p1, pt) = p.eval(x1, t);
            v += pv;
            g1 += p1;
            gt += pt;
        }
        for b in &self.bumps {
            let (bv, b1, bt) = b.eval(x1, t);
            v += bv;
            g1 += b1;
            gt += bt;
        }
        (v, g1, gt)
    }

    fn extent(&self) -> (f64, f64) {
        let mut e1 = 1.0f64;
        let mut et = 1.0f64;
        for p in &self.extremals {
            let (a, b) = p.extent();
            e1 = e1.max(a);
            et = et.max(b);
        }
        for b in &self.bumps {
            e1 = e1.max(b.center_normal + b.radius * b.aspect);
            et = et.max(b.center_tangential.abs() + b.radius);
        }
        (e1, et)
    }

    fn tangential_symmetric(&self) -> bool {
        self.extremals.iter().all(|p| p.tangential_offset == 0.0)
            && self.bumps.iter().all(|b| b.center_tangential == 0.0)
    }
}

/// Norms of a field over the half-space.
#[derive(Debug, Clone, Copy)]
pub struct FieldNorms {
    pub lp_star_mass: f64,
    pub trace_mass: f64,
    pub grad_energy: f64,
}

/// Integrate `g(x1, t)` over the half-(x1, t) domain with the dimension's
/// tangential weight: `sigma_{n-2} |t|^{n-2}` on `t > 0` doubled when the
/// field is symmetric, or both signs of `t` for `n = 2`.
pub(crate) fn integrate_plane(
    g: &(impl Fn(f64, f64) -> f64 + Sync),
    params: &Params,
    extent: (f64, f64),
    symmetric: bool,
    inner_marks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let n = params.n();
    if n > 2 && !symmetric {
        return Err(Error::Invalid(
            "tangentially asymmetric fields are only supported in the plane (n = 2)".into(),
        ));
    }
    // n >= 3: sigma_{n-2} rho^{n-2} over rho > 0 covers the tangential
    // space once; n = 2: integrate both signs of t with no sphere factor
    let sigma = if n == 2 { 1.0 } else { sphere_surface::<f64>(n - 2) };
    let weight_pow = (n - 2) as i32;
    let (x1_max, t_max) = extent;

    // outer integral over x1, inner over the tangential coordinate; both
    // run to infinity (profile tails decay polynomially, never truncate)
    let mut outer_breaks = vec![0.0, 0.25 * x1_max, x1_max];
    outer_breaks.dedup_by(|a, b| *a <= *b + 1e-12);
    let mut inner_breaks: Vec<f64> = vec![0.0, 0.25 * t_max, t_max];
    for &m in inner_marks {
        if m > 0.0 && m < t_max {
            inner_breaks.push(m);
        }
    }
    inner_breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    inner_breaks.dedup_by(|a, b| *a <= *b + 1e-12);

    let inner = |x1: f64| -> f64 {
        let h = |t: f64| g(x1, t) * t.abs().powi(weight_pow);
        let pos = integrate_pieces_relative(h, &inner_breaks, true, cfg)
            .map(|r| r.value)
            .unwrap_or(f64::NAN);
        if n > 2 {
            pos
        } else if symmetric {
            2.0 * pos
        } else {
            let hneg = |t: f64| g(x1, -t) * t.abs().powi(weight_pow);
            let neg = integrate_pieces_relative(hneg, &inner_breaks, true, cfg)
                .map(|r| r.value)
                .unwrap_or(f64::NAN);
            pos + neg
        }
    };
    let outer = integrate_pieces_relative(inner, &outer_breaks, true, cfg)?;
    if !outer.value.is_finite() {
        return Err(Error::NonConvergence("inner tangential quadrature failed".into()));
    }
    Ok(sigma * outer.value)
}

/// Fast path: a composite whose extremal pieces are all centered at the
/// origin (boundary-centered profiles, any dilations) with no compact
/// bumps is radial about the origin, so all three norms reduce to 1-D
/// radial integrals with constant cap fraction one half.
pub fn radial_norms_at_origin(
    field: &CompositeField,
    params: &Params,
    cfg: &QuadratureConfig,
) -> Option<Result<FieldNorms>> {
    let radial = field.bumps.is_empty()
        && field.extremals.iter().all(|p| {
            // solved boundary-centered translates carry |s| at the solver
            // tolerance; treating them as exactly centered costs O(|s|)
            p.tangential_offset == 0.0
                && p.extremal.base.s().abs() < 1e-7
                && p.cutoff_radius.is_none()
        });
    if !radial {
        return None;
    }
    let n = params.n();
    let sigma_bulk = sphere_surface::<f64>(n - 1);
    let sigma_trace = sphere_surface::<f64>(n - 2);
    let nm1 = (n - 1) as i32;
    let nm2 = (n - 2) as i32;
    let p = params.p();
    let p_star = params.p_star();
    let p_sharp = params.p_sharp();
    // evaluate along the tangential axis: value and signed radial slope
    let value_slope = |r: f64| {
        let (v, _, gt) = field.eval(0.0, r);
        (v, gt)
    };
    let breaks = [0.0, 1.0, 8.0];
    let run = || -> Result<FieldNorms> {
        let mass = integrate_pieces_relative(
            |r: f64| {
                let (v, _) = value_slope(r);
                0.5 * sigma_bulk * v.abs().powf(p_star) * r.powi(nm1)
            },
            &breaks,
            true,
            cfg,
        )?
        .value;
        let grad = integrate_pieces_relative(
            |r: f64| {
                let (_, slope) = value_slope(r);
                0.5 * sigma_bulk * slope.abs().powf(p) * r.powi(nm1)
            },
            &breaks,
            true,
            cfg,
        )?
        .value;
        let trace = integrate_pieces_relative(
            |rho: f64| {
                let (v, _) = value_slope(rho);
                sigma_trace * v.abs().powf(p_sharp) * rho.powi(nm2)
            },
            &breaks,
            true,
            cfg,
        )?
        .value;
        Ok(FieldNorms { lp_star_mass: mass, trace_mass: trace, grad_energy: grad })
    };
    Some(run())
}

/// Gradient energy alone, with an absolute tolerance floor.
///
/// Difference fields (competitor minus extremal) have near-cancelling
/// integrands whose relative accuracy is meaningless; the floor anchors
/// the tolerance to the scale of the fields being subtracted.
pub fn grad_energy_with_floor(
    field: &CompositeField,
    params: &Params,
    cfg: &QuadratureConfig,
    abs_floor: f64,
) -> Result<f64> {
    let floored = QuadratureConfig {
        abs_tol: abs_floor.max(1e-300),
        max_depth: cfg.max_depth.min(48),
        ..*cfg
    };
    let p = params.p();
    let n = params.n();
    let eligible = field.bumps.is_empty()
        && field.extremals.iter().all(|q| {
            q.tangential_offset == 0.0
                && q.extremal.base.s().abs() < 1e-7
                && q.cutoff_radius.is_none()
        });
    if eligible {
        let sigma = sphere_surface::<f64>(n - 1);
        let nm1 = (n - 1) as i32;
        let v = crate::num::quad::integrate_pieces(
            |r: f64| {
                let (_, _, gt) = field.eval(0.0, r);
                0.5 * sigma * gt.abs().powf(p) * r.powi(nm1)
            },
            &[0.0, 1.0, 8.0],
            true,
            &floored,
        )?;
        return Ok(v.value);
    }
    let extent = field.extent();
    let symmetric = field.tangential_symmetric();
    integrate_plane_abs(
        &|x1, t| {
            let (_, g1, gt) = field.eval(x1, t);
            (g1 * g1 + gt * gt).sqrt().powf(p)
        },
        params,
        extent,
        symmetric,
        &floored,
    )
}

/// Absolute-tolerance variant of the plane integral (difference fields).
fn integrate_plane_abs(
    g: &(impl Fn(f64, f64) -> f64 + Sync),
    params: &Params,
    extent: (f64, f64),
    symmetric: bool,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let n = params.n();
    if n > 2 && !symmetric {
        return Err(Error::Invalid(
            "tangentially asymmetric fields are only supported in the plane (n = 2)".into(),
        ));
    }
    let sigma = if n == 2 { 1.0 } else { sphere_surface::<f64>(n - 2) };
    let weight_pow = (n - 2) as i32;
    let (x1_max, t_max) = extent;
    let outer_breaks = [0.0, 0.25 * x1_max, x1_max];
    let inner_breaks = [0.0, 0.25 * t_max, t_max];
    let inner = |x1: f64| -> f64 {
        let h = |t: f64| g(x1, t) * t.abs().powi(weight_pow);
        let pos = crate::num::quad::integrate_pieces(h, &inner_breaks, true, cfg)
            .map(|r| r.value)
            .unwrap_or(f64::NAN);
        if n > 2 {
            pos
        } else if symmetric {
            2.0 * pos
        } else {
            let hneg = |t: f64| g(x1, -t) * t.abs().powi(weight_pow);
            pos + crate::num::quad::integrate_pieces(hneg, &inner_breaks, true, cfg)
                .map(|r| r.value)
                .unwrap_or(f64::NAN)
        }
    };
    let outer = crate::num::quad::integrate_pieces(inner, &outer_breaks, true, cfg)?;
    if !outer.value.is_finite() {
        return Err(Error::NonConvergence("inner tangential quadrature failed".into()));
    }
    Ok(sigma * outer.value)
}

/// All three norms of a field by 2-D quadrature.
///
/// `inner_marks` are tangential positions worth pre-splitting at (bump
/// centers and support edges).
pub fn field_norms(
    field: &impl Field,
    params: &Params,
    inner_marks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<FieldNorms> {
    let extent = field.extent();
    let symmetric = field.tangential_symmetric();
    let p_star = params.p_star();
    let p = params.p();
    let p_sharp = params.p_sharp();

    let mass = integrate_plane(
        &|x1, t| field.eval(x1, t).0.abs().powf(p_star),
        params,
        extent,
        symmetric,
        inner_marks,
        cfg,
    )?;
    let grad = integrate_plane(
        &|x1, t| {
            let (_, g1, gt) = field.eval(x1, t);
            (g1 * g1 + gt * gt).sqrt().powf(p)
        },
        params,
        extent,
        symmetric,
        inner_marks,
        cfg,
    )?;

    // trace: 1-D in the tangential coordinate at x1 = 0
    let n = params.n();
    let sigma = if n == 2 { 1.0 } else { sphere_surface::<f64>(n - 2) };
    let weight_pow = (n - 2) as i32;
    let t_max = extent.1;
    let mut breaks: Vec<f64> = vec![0.0, 0.25 * t_max, t_max];
    for &m in inner_marks {
        if m > 0.0 && m < t_max {
            breaks.push(m);
        }
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| *a <= *b + 1e-12);
    let htr = |t: f64| field.eval(0.0, t).0.abs().powf(p_sharp) * t.abs().powi(weight_pow);
    let tr_pos = integrate_pieces_relative(htr, &breaks, true, cfg)?.value;
    let trace = if n > 2 {
        sigma * tr_pos
    } else if symmetric {
        2.0 * tr_pos
    } else {
        let htr_neg = |t: f64| field.eval(0.0, -t).0.abs().powf(p_sharp) * t.abs().powi(weight_pow);
        tr_pos + integrate_pieces_relative(htr_neg, &breaks, true, cfg)?.value
    };

    Ok(FieldNorms { lp_star_mass: mass, trace_mass: trace, grad_energy: grad })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::QuadratureConfig;
    use crate::profiles::{normalize, TranslatedProfile};

    fn cfg() -> QuadratureConfig {
        // 2-D quadrature budget: keep the inner tolerance moderate
        QuadratureConfig { rel_tol: 1e-9, abs_tol: 1e-13, ..QuadratureConfig::default() }
    }

    #[test]
    fn shape_functions_are_smooth_ramps() {
        assert_eq!(smootherstep(0.0), 0.0);
        assert_eq!(smootherstep(1.0), 1.0);
        assert!((smootherstep(0.5) - 0.5).abs() < 1e-15);
        assert_eq!(smootherstep_deriv(0.0), 0.0);
        assert_eq!(smootherstep_deriv(1.0), 0.0);
        let h = 1e-6;
        for &x in &[0.2, 0.5, 0.8] {
            let fd = (smootherstep(x + h) - smootherstep(x - h)) / (2.0 * h);
            assert!((fd - smootherstep_deriv(x)).abs() < 1e-8);
        }
    }

    #[test]
    fn plain_extremal_field_norms_match_radial_reduction() {
        // n = 3: axisymmetric quadrature must reproduce the 1-D radial norms
        let prm = Params::new(3, 2.0).unwrap();
        let nz = normalize(&TranslatedProfile::sobolev(0.0, prm), &cfg()).unwrap();
        let field = CompositeField { extremals: vec![ExtremalPiece::plain(nz)], bumps: vec![] };
        let norms = field_norms(&field, &prm, &[], &cfg()).unwrap();
        assert!((norms.lp_star_mass - 1.0).abs() < 2e-3, "mass {}", norms.lp_star_mass);
        let t_meas = norms.trace_mass.powf(1.0 / prm.p_sharp());
        assert!((t_meas - nz.t).abs() < 2e-3 * nz.t, "T {} vs {}", t_meas, nz.t);
        let phi_meas = norms.grad_energy.powf(1.0 / prm.p());
        assert!((phi_meas - nz.phi).abs() < 2e-3 * nz.phi, "phi {} vs {}", phi_meas, nz.phi);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let prm = Params::new(2, 1.5).unwrap();
        let nz = normalize(&TranslatedProfile::escobar(-1.5, prm).unwrap(), &cfg()).unwrap();
        let field = CompositeField {
            extremals: vec![ExtremalPiece {
                extremal: nz,
                amplitude: 0.8,
                dilation: 1.3,
                tangential_offset: 2.0,
                cutoff_radius: Some(6.0),
            }],
            bumps: vec![BumpPiece {
                amplitude: 0.3,
                radius: 1.0,
                aspect: 0.5,
                center_normal: 0.5,
                center_tangential: -1.0,
            }],
        };
        let h = 1e-6;
        for &(x1, t) in &[(0.4, 1.7), (1.2, -1.1), (2.5, 2.2), (0.9, 4.9)] {
            let (_, g1, gt) = field.eval(x1, t);
            let fd1 = (field.eval(x1 + h, t).0 - field.eval(x1 - h, t).0) / (2.0 * h);
            let fdt = (field.eval(x1, t + h).0 - field.eval(x1, t - h).0) / (2.0 * h);
            assert!((g1 - fd1).abs() < 1e-6 + 1e-6 * g1.abs(), "at ({x1},{t}): {g1} vs {fd1}");
            assert!((gt - fdt).abs() < 1e-6 + 1e-6 * gt.abs(), "at ({x1},{t}): {gt} vs {fdt}");
        }
    }
}
