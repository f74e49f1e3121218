//! Deficits, distances to the extremal family, parametric perturbation
//! scans, and the annulus trace lemma check.
//!
//! The deficit of a competitor is measured at its own trace value: test
//! functions are normalized to unit bulk mass, their trace value `T` is
//! measured, and `delta = ||grad u||_p^p - Phi(T)^p`. The distance is the
//! infimal gradient-norm distance to the solved extremal's orbit under
//! dilations (and sign), with tangential translations pinned to zero for
//! axisymmetric competitors.

use crate::curve::{phi_of_t, PhiPoint};
use crate::field::{
    field_norms, radial_norms_at_origin, BumpPiece, CompositeField, ExtremalPiece, Field,
    FieldNorms,
};
use crate::num::quad::integrate_pieces_relative;
use crate::num::sphere::sphere_surface;
use crate::num::{minimize_scalar, Bracket, QuadratureConfig};
use crate::profiles::normalize;
use crate::{curve, Error, Params, Result};
use serde::{Deserialize, Serialize};

/// Norms of a composite, taking the radial fast path when eligible.
pub fn composite_norms(
    u: &CompositeField,
    params: &Params,
    cfg: &QuadratureConfig,
) -> Result<FieldNorms> {
    if let Some(r) = radial_norms_at_origin(u, params, cfg) {
        return r;
    }
    let marks: Vec<f64> = u
        .extremals
        .iter()
        .map(|p| p.tangential_offset.abs())
        .chain(u.bumps.iter().map(|b| b.center_tangential.abs()))
        .collect();
    field_norms(u, params, &marks, cfg)
}

/// Scale a composite so its bulk mass is exactly one; returns the scaled
/// field and its (rescaled) norms.
pub fn normalize_composite(
    u: CompositeField,
    params: &Params,
    cfg: &QuadratureConfig,
) -> Result<(CompositeField, FieldNorms)> {
    let norms = composite_norms(&u, params, cfg)?;
    if !(norms.lp_star_mass > 0.0) {
        return Err(Error::Invalid("degenerate test function: zero bulk mass".into()));
    }
    let c = norms.lp_star_mass.powf(-1.0 / params.p_star());
    let scaled = u.scaled(c);
    Ok((
        scaled,
        FieldNorms {
            lp_star_mass: 1.0,
            trace_mass: norms.trace_mass * c.powf(params.p_sharp()),
            grad_energy: norms.grad_energy * c.powf(params.p()),
        },
    ))
}

/// A deficit measurement.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DeficitReport {
    /// Measured trace value after unit-mass normalization.
    pub t: f64,
    /// `||grad u||_p^p - Phi(T)^p`.
    pub delta: f64,
    /// Distance to the extremal orbit (when computed).
    pub distance: Option<f64>,
    /// `delta / distance^2` (when the distance is positive).
    pub ratio: Option<f64>,
    /// The curve point at the measured trace value.
    pub curve_point: PhiPoint,
}

/// Deficit of a test function (normalized internally).
pub fn deficit(u: &CompositeField, params: &Params, cfg: &QuadratureConfig) -> Result<DeficitReport> {
    let (_, norms) = normalize_composite(u.clone(), params, cfg)?;
    let t = norms.trace_mass.powf(1.0 / params.p_sharp());
    let point = phi_of_t(t, params, cfg)?;
    let delta = norms.grad_energy - point.phi.powf(params.p());
    Ok(DeficitReport { t, delta, distance: None, ratio: None, curve_point: point })
}

/// Gradient energy of a composite (radial fast path when eligible).
fn grad_energy(u: &CompositeField, params: &Params, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(composite_norms(u, params, cfg)?.grad_energy)
}

/// Second bulk moment `int |u|^{p*} |x|^2 dx`, seeding the dilation search.
fn second_moment(u: &CompositeField, params: &Params, cfg: &QuadratureConfig) -> Result<f64> {
    let radial = u.bumps.is_empty()
        && u.extremals.iter().all(|p| {
            p.tangential_offset == 0.0
                && p.extremal.base.s().abs() < 1e-7
                && p.cutoff_radius.is_none()
        });
    let n = params.n();
    let p_star = params.p_star();
    if radial {
        let sigma = sphere_surface::<f64>(n - 1);
        let nm1 = (n - 1) as i32;
        let v = integrate_pieces_relative(
            |r: f64| {
                let (val, _, _) = u.eval(0.0, r);
                0.5 * sigma * val.abs().powf(p_star) * r * r * r.powi(nm1)
            },
            &[0.0, 1.0, 8.0],
            true,
            cfg,
        )?;
        return Ok(v.value);
    }
    crate::field::integrate_plane(
        &|x1, t| {
            let (v, _, _) = u.eval(x1, t);
            v.abs().powf(p_star) * (x1 * x1 + t * t)
        },
        params,
        u.extent(),
        u.tangential_symmetric(),
        &[],
        cfg,
    )
}

/// Result of a distance search.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DistanceResult {
    pub distance: f64,
    pub best_dilation: f64,
    pub best_sign: f64,
    pub converged: bool,
}

/// Distance from `u` (unit mass) to the orbit of the extremal at trace
/// value `t`: minimize `||grad(u - sign a^{-n/p*} U_T(./a))||_p` over the
/// dilation `a` and sign. Tangential translations are pinned to zero
/// (axisymmetric competitors); plane probes cover the pinning separately.
pub fn distance_to_extremals(
    u: &CompositeField,
    t: f64,
    params: &Params,
    cfg: &QuadratureConfig,
) -> Result<DistanceResult> {
    distance_with_offset(u, t, 0.0, params, cfg)
}

/// As [`distance_to_extremals`] with the extremal's center translated
/// tangentially by `offset` (plane-probe check of the pinned translation).
pub fn distance_with_offset(
    u: &CompositeField,
    t: f64,
    offset: f64,
    params: &Params,
    cfg: &QuadratureConfig,
) -> Result<DistanceResult> {
    let tp = curve::solve_s_for_t(t, params, cfg)?;
    let nz = normalize(&tp, cfg)?;
    let p = params.p();

    // seed the dilation from second-moment matching
    let base = CompositeField { extremals: vec![ExtremalPiece::plain(nz)], bumps: vec![] };
    let m2_u = second_moment(u, params, cfg)?;
    let m2_v = second_moment(&base, params, cfg)?;
    let seed = (m2_u / m2_v).sqrt().clamp(0.05, 20.0);

    // tolerance floors at the scale of the fields being subtracted:
    // cancellation noise makes tighter tolerances meaningless. The search
    // runs loose; the reported distance is re-evaluated tight at the end.
    let u_grad = grad_energy(u, params, cfg)?;
    let v_grad = nz.phi.powf(p);
    let scale = u_grad + v_grad;
    let search_cfg = QuadratureConfig { rel_tol: cfg.rel_tol.max(1e-7), ..*cfg };

    let eval_energy = |alpha: f64, sign: f64, floor: f64, qcfg: &QuadratureConfig| -> f64 {
        let mut diff = u.clone();
        diff.extremals.push(ExtremalPiece {
            extremal: nz,
            amplitude: -sign,
            dilation: alpha,
            tangential_offset: offset,
            cutoff_radius: None,
        });
        let energy = match crate::field::grad_energy_with_floor(&diff, params, qcfg, floor) {
            Ok(g) => g,
            // noise-limited panels: the partial estimate is still accurate
            // to the floor scale
            Err(Error::QuadratureNonConvergence { estimate, .. }) => estimate,
            Err(_) => return f64::INFINITY,
        };
        energy.max(0.0).powf(1.0 / p)
    };
    let objective = |alpha: f64, sign: f64| eval_energy(alpha, sign, 1e-7 * scale, &search_cfg);

    // sign: nonnegative competitors never prefer the flipped extremal,
    // but measure rather than assume
    let plus = objective(seed, 1.0);
    let minus = objective(seed, -1.0);
    let sign = if plus <= minus { 1.0 } else { -1.0 };

    // bracket the dilation multiplicatively around the seed, then refine
    let h = |x: f64| objective(seed * x.exp(), sign);
    let mut lo = -1.2f64;
    let mut hi = 1.2f64;
    let mut f_lo = h(lo);
    let mut f_hi = h(hi);
    let f_mid = h(0.0);
    let mut expand = 0;
    while (f_lo < f_mid || f_hi < f_mid) && expand < 8 {
        if f_lo < f_mid {
            lo -= 1.0;
            f_lo = h(lo);
        }
        if f_hi < f_mid {
            hi += 1.0;
            f_hi = h(hi);
        }
        expand += 1;
    }
    let converged = expand < 8;
    let (x_best, _) = minimize_scalar(h, Bracket::new(lo, hi)?, 1e-4)?;
    // tight re-evaluation at the found minimiser
    let value = eval_energy(seed * x_best.exp(), sign, 1e-12 * scale, cfg);
    Ok(DistanceResult {
        distance: value,
        best_dilation: seed * x_best.exp(),
        best_sign: sign,
        converged,
    })
}

/// Perturbation families for the stability experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationMode {
    /// Blend with a mass-preserving dilation of the same extremal.
    DilationBlend,
    /// Blend with the extremal of a different trace value.
    ProfileBlend,
    /// Add a small compact bump near the boundary.
    BoundaryBump,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub base_t: f64,
    pub mode: PerturbationMode,
    pub epsilon: f64,
}

/// Build the perturbed test function (renormalized to unit mass).
pub fn perturbation_family(
    spec: &PerturbationSpec,
    params: &Params,
    cfg: &QuadratureConfig,
) -> Result<CompositeField> {
    if !(0.0..=0.5).contains(&spec.epsilon) {
        return Err(Error::Invalid(format!("epsilon = {} outside [0, 0.5]", spec.epsilon)));
    }
    let tp = curve::solve_s_for_t(spec.base_t, params, cfg)?;
    let nz = normalize(&tp, cfg)?;
    let eps = spec.epsilon;
    let raw = match spec.mode {
        PerturbationMode::DilationBlend => CompositeField {
            extremals: vec![
                ExtremalPiece { amplitude: 1.0 - eps, ..ExtremalPiece::plain(nz) },
                ExtremalPiece { amplitude: eps, dilation: 2.0, ..ExtremalPiece::plain(nz) },
            ],
            bumps: vec![],
        },
        PerturbationMode::ProfileBlend => {
            let other = curve::solve_s_for_t(1.3 * spec.base_t, params, cfg)?;
            let nz_other = normalize(&other, cfg)?;
            CompositeField {
                extremals: vec![
                    ExtremalPiece { amplitude: 1.0 - eps, ..ExtremalPiece::plain(nz) },
                    ExtremalPiece { amplitude: eps, ..ExtremalPiece::plain(nz_other) },
                ],
                bumps: vec![],
            }
        }
        PerturbationMode::BoundaryBump => CompositeField {
            extremals: vec![ExtremalPiece::plain(nz)],
            bumps: if eps == 0.0 {
                vec![]
            } else {
                vec![BumpPiece {
                    amplitude: eps,
                    radius: 0.75,
                    aspect: 1.0,
                    center_normal: 0.25,
                    center_tangential: 0.0,
                }]
            },
        },
    };
    let (scaled, _) = normalize_composite(raw, params, cfg)?;
    Ok(scaled)
}

/// One row of a stability scan.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StabilityRow {
    pub epsilon: f64,
    pub t: f64,
    pub delta: f64,
    pub distance: f64,
    /// `delta / distance^2`; undefined at epsilon = 0.
    pub ratio: Option<f64>,
}

/// Scan deficit and distance along an epsilon grid for one family.
pub fn stability_ratio_scan(
    base_t: f64,
    eps_grid: &[f64],
    mode: PerturbationMode,
    params: &Params,
    cfg: &QuadratureConfig,
) -> Result<Vec<StabilityRow>> {
    use rayon::prelude::*;
    eps_grid
        .par_iter()
        .map(|&epsilon| {
            if epsilon == 0.0 {
                return Ok(StabilityRow { epsilon, t: base_t, delta: 0.0, distance: 0.0, ratio: None });
            }
            let u = perturbation_family(&PerturbationSpec { base_t, mode, epsilon }, params, cfg)?;
            let report = deficit(&u, params, cfg)?;
            let dist = distance_to_extremals(&u, report.t, params, cfg)?;
            let ratio =
                (dist.distance > 0.0).then(|| report.delta / (dist.distance * dist.distance));
            Ok(StabilityRow { epsilon, t: report.t, delta: report.delta, distance: dist.distance, ratio })
        })
        .collect()
}

/// Least-squares slope of `log delta` against `log epsilon`.
pub fn log_log_slope(rows: &[StabilityRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.epsilon > 0.0 && r.delta > 0.0)
        .map(|r| (r.epsilon.ln(), r.delta.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

/// The annulus trace check.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AnnulusCheck {
    /// Trace mass on the boundary annulus `2R <= |x| <= 7R`.
    pub lhs: f64,
    /// The reconstructed right-hand side.
    pub rhs: f64,
    /// Measured bulk mass on `R <= |x| <= 8R`.
    pub annulus_mass: f64,
    /// Whether the precondition `annulus_mass <= epsilon_mass` held.
    pub applicable: bool,
    pub pass: bool,
}

/// `||grad psi||_{L^n(H)}` for the fixed annulus cutoff (1 on `B7 - B2`,
/// 0 inside `B1` and outside `B8`, quintic ramps).
fn annulus_cutoff_grad_ln(params: &Params, cfg: &QuadratureConfig) -> Result<f64> {
    let n = params.n();
    let sigma = sphere_surface::<f64>(n - 1);
    let nm1 = (n - 1) as i32;
    let nf = params.nf();
    let val = integrate_pieces_relative(
        |r: f64| {
            let d = if r > 1.0 && r < 2.0 {
                crate::field::smootherstep_deriv(r - 1.0)
            } else if r > 7.0 && r < 8.0 {
                crate::field::smootherstep_deriv(r - 7.0)
            } else {
                0.0
            };
            0.5 * sigma * d.powf(nf) * r.powi(nm1)
        },
        &[1.0, 2.0, 7.0, 8.0],
        false,
        cfg,
    )?;
    Ok(val.value.powf(1.0 / nf))
}

/// Bulk mass of `|u|^{power}` on the spherical shell `r_in <= |x| <= r_out`.
fn shell_mass(
    u: &CompositeField,
    params: &Params,
    r_in: f64,
    r_out: f64,
    power: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let n = params.n();
    let symmetric = u.tangential_symmetric();
    if n > 2 && !symmetric {
        return Err(Error::Invalid("asymmetric shells only in the plane".into()));
    }
    let sigma = if n == 2 { 1.0 } else { sphere_surface::<f64>(n - 2) };
    let wp = (n - 2) as i32;
    let outer = integrate_pieces_relative(
        |x1: f64| {
            let t_hi = (r_out * r_out - x1 * x1).max(0.0).sqrt();
            let t_lo = (r_in * r_in - x1 * x1).max(0.0).sqrt();
            if t_hi <= t_lo {
                return 0.0;
            }
            let breaks = [t_lo, 0.5 * (t_lo + t_hi), t_hi];
            let pos = integrate_pieces_relative(
                |t: f64| u.eval(x1, t).0.abs().powf(power) * t.abs().powi(wp),
                &breaks,
                false,
                cfg,
            )
            .map(|r| r.value)
            .unwrap_or(f64::NAN);
            if n > 2 {
                pos
            } else if symmetric {
                2.0 * pos
            } else {
                pos + integrate_pieces_relative(
                    |t: f64| u.eval(x1, -t).0.abs().powf(power) * t.abs().powi(wp),
                    &breaks,
                    false,
                    cfg,
                )
                .map(|r| r.value)
                .unwrap_or(f64::NAN)
            }
        },
        &[0.0, 0.5 * r_out, r_out],
        false,
        cfg,
    )?;
    if !outer.value.is_finite() {
        return Err(Error::NonConvergence("shell quadrature failed".into()));
    }
    Ok(sigma * outer.value)
}

/// Boundary trace of `|u|^{p#}` on the annulus `t_in <= |t| <= t_out`.
fn boundary_annulus_trace(
    u: &CompositeField,
    params: &Params,
    t_in: f64,
    t_out: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let n = params.n();
    let p_sharp = params.p_sharp();
    let sigma = if n == 2 { 1.0 } else { sphere_surface::<f64>(n - 2) };
    let wp = (n - 2) as i32;
    let breaks = [t_in, 0.5 * (t_in + t_out), t_out];
    let pos = integrate_pieces_relative(
        |t: f64| u.eval(0.0, t).0.abs().powf(p_sharp) * t.abs().powi(wp),
        &breaks,
        false,
        cfg,
    )?
    .value;
    if n > 2 {
        return Ok(sigma * pos);
    }
    if u.tangential_symmetric() {
        return Ok(2.0 * pos);
    }
    let neg = integrate_pieces_relative(
        |t: f64| u.eval(0.0, -t).0.abs().powf(p_sharp) * t.abs().powi(wp),
        &breaks,
        false,
        cfg,
    )?
    .value;
    Ok(pos + neg)
}

/// Check the annulus trace bound for a unit-mass test function:
/// the boundary trace mass on `B_{7R} - B_{2R}` is at most
/// `C (eps^{1/p*} + ||grad u||_p) eps^{(p#-1)/p*}` once the bulk mass on
/// the shell `B_{8R} - B_R` is below `eps`.
pub fn annulus_trace_check(
    u: &CompositeField,
    r: f64,
    epsilon_mass: f64,
    params: &Params,
    cfg: &QuadratureConfig,
) -> Result<AnnulusCheck> {
    let p_star = params.p_star();
    let p_sharp = params.p_sharp();
    let annulus_mass = shell_mass(u, params, r, 8.0 * r, p_star, cfg)?;
    let applicable = annulus_mass <= epsilon_mass;
    let lhs = boundary_annulus_trace(u, params, 2.0 * r, 7.0 * r, cfg)?;
    let grad_norm = grad_energy(u, params, cfg)?.powf(1.0 / params.p());
    let c_psi = annulus_cutoff_grad_ln(params, cfg)?;
    let c = p_sharp * c_psi.max(1.0);
    let eps = epsilon_mass;
    let rhs = c * (eps.powf(1.0 / p_star) + grad_norm) * eps.powf((p_sharp - 1.0) / p_star);
    Ok(AnnulusCheck { lhs, rhs, annulus_mass, applicable, pass: !applicable || lhs <= rhs })
}

/// The case-glue for the quantitative constant: given a local constant
/// `alpha_t` (supplied externally) and the small-deficit threshold
/// `delta0`, the global constant is `min(alpha_t/2, delta0/4)`. The large
/// deficit branch rests on `d^2 <= 4 ||grad u||^2`, checked here for a
/// measured pair.
pub fn glue_stability_constant(
    alpha_t: f64,
    delta0: f64,
    grad_norm: f64,
    distance: f64,
) -> (f64, bool) {
    let alpha_prime = (0.5 * alpha_t).min(0.25 * delta0);
    let large_branch_ok = distance * distance <= 4.0 * grad_norm * grad_norm + 1e-12;
    (alpha_prime, large_branch_ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::fundamental_constants;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig { rel_tol: 1e-9, abs_tol: 1e-13, ..QuadratureConfig::default() }
    }

    fn p32() -> Params {
        Params::new(3, 2.0).unwrap()
    }

    #[test]
    fn extremal_has_zero_deficit_and_distance() {
        let prm = p32();
        let c = fundamental_constants(&prm, &cfg()).unwrap();
        let u = perturbation_family(
            &PerturbationSpec { base_t: c.t_0, mode: PerturbationMode::DilationBlend, epsilon: 0.0 },
            &prm,
            &cfg(),
        )
        .unwrap();
        let rep = deficit(&u, &prm, &cfg()).unwrap();
        assert!((rep.t - c.t_0).abs() < 1e-6 * c.t_0);
        assert!(rep.delta.abs() < 1e-6, "delta {}", rep.delta);
        let d = distance_to_extremals(&u, rep.t, &prm, &cfg()).unwrap();
        assert!(d.distance < 1e-4, "distance {}", d.distance);
    }

    #[test]
    fn dilated_translate_is_still_extremal() {
        // the optimizer must find the dilation and report distance ~ 0
        let prm = p32();
        let c = fundamental_constants(&prm, &cfg()).unwrap();
        let tp = curve::solve_s_for_t(c.t_0, &prm, &cfg()).unwrap();
        let nz = normalize(&tp, &cfg()).unwrap();
        let u = CompositeField {
            extremals: vec![ExtremalPiece { dilation: 1.45, ..ExtremalPiece::plain(nz) }],
            bumps: vec![],
        };
        let rep = deficit(&u, &prm, &cfg()).unwrap();
        assert!(rep.delta.abs() < 1e-6, "delta {}", rep.delta);
        let d = distance_to_extremals(&u, rep.t, &prm, &cfg()).unwrap();
        assert!(d.distance < 1e-4, "distance {}", d.distance);
        assert!((d.best_dilation - 1.45).abs() < 0.01, "alpha {}", d.best_dilation);
    }

    #[test]
    fn dilation_blend_has_quadratic_deficit() {
        let prm = p32();
        let c = fundamental_constants(&prm, &cfg()).unwrap();
        let rows = stability_ratio_scan(
            c.t_0,
            &[0.02, 0.04, 0.08, 0.16],
            PerturbationMode::DilationBlend,
            &prm,
            &cfg(),
        )
        .unwrap();
        for r in &rows {
            assert!(r.delta > 0.0, "delta must be positive at eps {}", r.epsilon);
            assert!(r.distance > 0.0);
        }
        let slope = log_log_slope(&rows).unwrap();
        assert!((slope - 2.0).abs() < 0.2, "slope {slope}");
        let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
        let max = ratios.iter().cloned().fold(0.0, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min > 0.0 && max / min < 3.0, "ratios {ratios:?}");
    }

    #[test]
    fn boundary_bump_stays_nonnegative_and_normalized() {
        let prm = p32();
        let c = fundamental_constants(&prm, &cfg()).unwrap();
        let u = perturbation_family(
            &PerturbationSpec { base_t: c.t_0, mode: PerturbationMode::BoundaryBump, epsilon: 0.1 },
            &prm,
            &cfg(),
        )
        .unwrap();
        let norms = composite_norms(&u, &prm, &cfg()).unwrap();
        assert!((norms.lp_star_mass - 1.0).abs() < 1e-6, "mass {}", norms.lp_star_mass);
        for &(x1, t) in &[(0.01, 0.0), (0.3, 0.2), (1.0, 1.0), (0.05, 2.0)] {
            assert!(u.eval(x1, t).0 >= 0.0);
        }
        let rep = deficit(&u, &prm, &cfg()).unwrap();
        assert!(rep.delta > 0.0);
    }

    #[test]
    fn annulus_check_on_the_centered_extremal() {
        let prm = p32();
        let c = fundamental_constants(&prm, &cfg()).unwrap();
        let u = perturbation_family(
            &PerturbationSpec { base_t: c.t_0, mode: PerturbationMode::DilationBlend, epsilon: 0.0 },
            &prm,
            &cfg(),
        )
        .unwrap();
        let check = annulus_trace_check(&u, 20.0, 1e-3, &prm, &cfg()).unwrap();
        assert!(check.applicable, "annulus mass {}", check.annulus_mass);
        assert!(check.pass, "{check:?}");
        assert!(check.lhs > 0.0);
    }

    #[test]
    fn glue_constant_combinator() {
        let (a, ok) = glue_stability_constant(0.8, 0.2, 2.0, 1.5);
        assert_eq!(a, 0.05);
        assert!(ok);
    }
}
