//! Strict binding: splitting unit bulk mass and trace mass across two
//! profiles strictly raises the minimal gradient energy.
//!
//! The gap `m1^p Phi(T1)^p + m2^p Phi(T2)^p - Phi(T)^p` is certified
//! positive over split grids, and the near-optimal two-bump competitor
//! realising the right-hand side is built explicitly: two cut-off extremal
//! bumps separated tangentially, plus two small smooth bumps with solved
//! amplitudes restoring the mass and trace constraints exactly.

use crate::curve::{fundamental_constants, phi_of_t, PhiPoint};
use crate::num::quad::integrate_pieces_relative;
use crate::num::sphere::sphere_surface;
use crate::num::QuadratureConfig;
use crate::profiles::{normalize, NormalizedExtremal};
use crate::{curve, Error, Params, Result};
use serde::{Deserialize, Serialize};

/// A mass/trace split of the unit competitor constraints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub t: f64,
    pub m1: f64,
    pub m2: f64,
    pub t1: f64,
    pub t2: f64,
}

impl SplitSpec {
    /// Per-part trace values `T_i = t_i / m_i`.
    pub fn part_traces(&self) -> (f64, f64) {
        (self.t1 / self.m1, self.t2 / self.m2)
    }

    pub fn swapped(&self) -> SplitSpec {
        SplitSpec { t: self.t, m1: self.m2, m2: self.m1, t1: self.t2, t2: self.t1 }
    }

    /// Check the two constraint identities to `tol`.
    pub fn constraints_ok(&self, params: &Params, tol: f64) -> bool {
        let p_star = params.p_star();
        let p_sharp = params.p_sharp();
        let mass = self.m1.powf(p_star) + self.m2.powf(p_star);
        let trace = self.t1.powf(p_sharp) + self.t2.powf(p_sharp);
        (mass - 1.0).abs() <= tol
            && (trace - self.t.powf(p_sharp)).abs() <= tol * self.t.powf(p_sharp)
    }
}

/// Complete a split from `(T, m1, t1)`:
/// `m2 = (1 - m1^{p*})^{1/p*}`, `t2 = (T^{p#} - t1^{p#})^{1/p#}`.
pub fn split_complement(t: f64, m1: f64, t1: f64, params: &Params) -> Result<SplitSpec> {
    if !(t > 0.0) {
        return Err(Error::Infeasible(format!("total trace value must be positive, got {t}")));
    }
    if !(m1 > 0.0 && m1 < 1.0) {
        return Err(Error::Infeasible(format!("m1 = {m1} must lie in (0, 1)")));
    }
    if t1 < 0.0 {
        return Err(Error::Infeasible(format!("t1 = {t1} must be nonnegative")));
    }
    let p_star = params.p_star();
    let p_sharp = params.p_sharp();
    let trace_rest = t.powf(p_sharp) - t1.powf(p_sharp);
    if trace_rest < 0.0 {
        return Err(Error::Infeasible(format!("t1 = {t1} exceeds the total trace budget {t}")));
    }
    let m2 = (1.0 - m1.powf(p_star)).powf(1.0 / p_star);
    let t2 = trace_rest.powf(1.0 / p_sharp);
    Ok(SplitSpec { t, m1, m2, t1, t2 })
}

/// A split walking into the degenerate corner `m2 -> 0` with the second
/// part's trace value pinned at `T` (so `t2 = m2 T`).
pub fn corner_split(t: f64, m2: f64, params: &Params) -> Result<SplitSpec> {
    let p_star = params.p_star();
    let p_sharp = params.p_sharp();
    if !(m2 > 0.0 && m2 < 1.0) {
        return Err(Error::Infeasible(format!("m2 = {m2} must lie in (0, 1)")));
    }
    let m1 = (1.0 - m2.powf(p_star)).powf(1.0 / p_star);
    let t2 = m2 * t;
    let t1 = (t.powf(p_sharp) - t2.powf(p_sharp)).powf(1.0 / p_sharp);
    Ok(SplitSpec { t, m1, m2, t1, t2 })
}

/// The binding gap at one split.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GapResult {
    pub spec: SplitSpec,
    /// `Phi(T)^p`
    pub lhs: f64,
    /// `m1^p Phi(T1)^p + m2^p Phi(T2)^p`
    pub rhs: f64,
    pub gap: f64,
    /// Propagated quadrature error bound; the gap is certified positive
    /// only when it exceeds this.
    pub err_bound: f64,
}

impl GapResult {
    pub fn certified_positive(&self) -> bool {
        self.gap > self.err_bound
    }
}

/// `Phi(T_i)^p` with the `T_i = 0` endpoint handled by the bulk constant,
/// returning the value and its relative error bound.
fn phi_pow_p(t: f64, params: &Params, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    if t == 0.0 {
        let c = fundamental_constants(params, cfg)?;
        return Ok((c.s_const.powf(params.p()), 10.0 * cfg.rel_tol));
    }
    let pt = phi_of_t(t, params, cfg)?;
    Ok((pt.phi.powf(params.p()), params.p() * pt.rel_err + 1e-13))
}

/// Evaluate the binding gap for a split.
pub fn binding_gap(spec: &SplitSpec, params: &Params, cfg: &QuadratureConfig) -> Result<GapResult> {
    if !spec.constraints_ok(params, 1e-9) {
        return Err(Error::Infeasible(format!("split violates its constraints: {spec:?}")));
    }
    let p = params.p();
    let (t1, t2) = spec.part_traces();
    let (phi_t, rel_t) = phi_pow_p(spec.t, params, cfg)?;
    let (phi_1, rel_1) = phi_pow_p(t1, params, cfg)?;
    let (phi_2, rel_2) = phi_pow_p(t2, params, cfg)?;
    let w1 = spec.m1.powf(p);
    let w2 = spec.m2.powf(p);
    let rhs = w1 * phi_1 + w2 * phi_2;
    let gap = rhs - phi_t;
    let err_bound = rel_t * phi_t + rel_1 * w1 * phi_1 + rel_2 * w2 * phi_2;
    Ok(GapResult { spec: *spec, lhs: phi_t, rhs, gap, err_bound })
}

/// Grid scan of the binding gap over `(m1, t1)` with a margin away from the
/// degenerate corners.
#[derive(Debug, Clone)]
pub struct BindingScan {
    pub rows: Vec<GapResult>,
    pub min_gap: f64,
    pub argmin: SplitSpec,
    /// Rows whose gap did not exceed its error bound.
    pub uncertified: Vec<SplitSpec>,
}

pub fn scan_binding_grid(
    t: f64,
    grid_res: usize,
    margin: f64,
    params: &Params,
    cfg: &QuadratureConfig,
) -> Result<BindingScan> {
    if grid_res < 4 {
        return Err(Error::Invalid(format!("gridRes = {grid_res} must be >= 4")));
    }
    if !(margin > 0.0 && margin < 0.5) {
        return Err(Error::Invalid(format!("margin = {margin} must lie in (0, 0.5)")));
    }
    let mut specs = Vec::with_capacity(grid_res * grid_res);
    for i in 0..grid_res {
        for j in 0..grid_res {
            let frac = |k: usize| margin + (1.0 - 2.0 * margin) * k as f64 / (grid_res - 1) as f64;
            let m1 = frac(i);
            let t1 = frac(j) * t;
            specs.push(split_complement(t, m1, t1, params)?);
        }
    }

    // solve each distinct trace value once, in parallel
    use rayon::prelude::*;
    let mut wanted: Vec<f64> = Vec::with_capacity(2 * specs.len() + 1);
    wanted.push(t);
    for s in &specs {
        let (a, b) = s.part_traces();
        wanted.push(a);
        wanted.push(b);
    }
    wanted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    wanted.dedup_by(|a, b| a.to_bits() == b.to_bits());
    let solved: Result<Vec<(u64, f64, f64)>> = wanted
        .par_iter()
        .map(|&tv| {
            let (v, rel) = phi_pow_p(tv, params, cfg)?;
            Ok((tv.to_bits(), v, rel))
        })
        .collect();
    let table: std::collections::HashMap<u64, (f64, f64)> =
        solved?.into_iter().map(|(k, v, r)| (k, (v, r))).collect();

    let p = params.p();
    let mut rows = Vec::with_capacity(specs.len());
    for spec in &specs {
        let (t1, t2) = spec.part_traces();
        let (phi_t, rel_t) = table[&spec.t.to_bits()];
        let (phi_1, rel_1) = table[&t1.to_bits()];
        let (phi_2, rel_2) = table[&t2.to_bits()];
        let w1 = spec.m1.powf(p);
        let w2 = spec.m2.powf(p);
        let rhs = w1 * phi_1 + w2 * phi_2;
        rows.push(GapResult {
            spec: *spec,
            lhs: phi_t,
            rhs,
            gap: rhs - phi_t,
            err_bound: rel_t * phi_t + rel_1 * w1 * phi_1 + rel_2 * w2 * phi_2,
        });
    }

    let mut min_gap = f64::INFINITY;
    let mut argmin = rows[0].spec;
    let mut uncertified = Vec::new();
    for row in &rows {
        if row.gap < min_gap {
            min_gap = row.gap;
            argmin = row.spec;
        }
        if !row.certified_positive() {
            uncertified.push(row.spec);
        }
    }
    Ok(BindingScan { rows, min_gap, argmin, uncertified })
}

/// The flat-cone specification used by the transport-side exclusion
/// argument: `|z_n| < slope |z'|`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConeSpec {
    pub slope: f64,
}

impl ConeSpec {
    pub fn new(slope: f64) -> Result<ConeSpec> {
        if !(slope > 0.0) {
            return Err(Error::Invalid(format!("cone slope must be positive, got {slope}")));
        }
        Ok(ConeSpec { slope })
    }
}

/// One cut-off extremal bump of the competitor.
#[derive(Debug, Clone)]
pub struct SplitBump {
    pub extremal: NormalizedExtremal,
    /// Mass amplitude `m_i`.
    pub amplitude: f64,
    /// Measured norms of the cut bump.
    pub mass: f64,
    pub trace: f64,
    pub grad_energy: f64,
}

/// One solved correction bump.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CorrectionBump {
    pub amplitude: f64,
    pub radius: f64,
    /// Normal-axis scale of the ellipsoidal support (pancake when < 1).
    pub aspect: f64,
    pub center_normal: f64,
    pub center_tangential: f64,
}

/// The assembled two-bump competitor.
#[derive(Debug, Clone)]
pub struct SplitConstruction {
    pub spec: SplitSpec,
    pub r_cutoff: f64,
    pub sep: f64,
    pub bumps: [SplitBump; 2],
    /// Interior (bulk-only) and boundary-adjacent correction bumps.
    pub corrections: [CorrectionBump; 2],
    /// Mass and trace shortfalls the corrections restore.
    pub correction_budget: (f64, f64),
    /// `int_H |grad w|^p`.
    pub w_energy: f64,
    /// Residuals of the two constraints after correction.
    pub constraint_residuals: (f64, f64),
    /// Bulk mass attributable to each side of the tangential bisector.
    pub side_masses: (f64, f64),
    /// The gap evaluation at the same split.
    pub gap: GapResult,
}

/// Norms of one cut bump by 1-D radial quadrature about its center
/// (the cutoff is radial about the same center, so reduction is exact).
fn cut_bump_norms(
    nz: &NormalizedExtremal,
    amplitude: f64,
    r_cut: f64,
    params: &Params,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64, f64)> {
    let n = params.n();
    let p = params.p();
    let p_star = params.p_star();
    let p_sharp = params.p_sharp();
    let sigma_bulk = sphere_surface::<f64>(n - 1);
    let sigma_trace = sphere_surface::<f64>(n - 2);
    let tp = nz.base;
    let r_min = tp.r_min();
    let nm1 = (n - 1) as i32;
    let nm2 = (n - 2) as i32;

    // offsets where the cutoff ramp starts and ends
    let u_half = (0.5 * r_cut - r_min).max(0.0);
    let u_full = (r_cut - r_min).max(u_half + 1e-9);
    let mut breaks = vec![0.0];
    if tp.gap() > 0.0 {
        let mut b = tp.gap();
        while b < 0.5 {
            breaks.push(b);
            b *= 8.0;
        }
    }
    breaks.push(1.0f64.min(0.5 * u_half).max(1e-6));
    breaks.push(u_half);
    breaks.push(u_full);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| *a <= *b + 1e-12);

    let mass = integrate_pieces_relative(
        |u: f64| {
            let (v, _, r) = nz.value_grad_at_offset(u);
            let (eta, _) = crate::field::radial_cutoff(r, r_cut);
            if eta == 0.0 {
                return 0.0;
            }
            sigma_bulk * (v * eta).powf(p_star) * tp.cap_fraction_at(u, r) * r.powi(nm1)
        },
        &breaks,
        false,
        cfg,
    )?
    .value
        * amplitude.powf(p_star);

    let grad = integrate_pieces_relative(
        |u: f64| {
            let (v, g, r) = nz.value_grad_at_offset(u);
            let (eta, deta) = crate::field::radial_cutoff(r, r_cut);
            let slope = g * eta + v * (-deta); // |U'| eta + U |eta'|
            if slope == 0.0 {
                return 0.0;
            }
            sigma_bulk * slope.powf(p) * tp.cap_fraction_at(u, r) * r.powi(nm1)
        },
        &breaks,
        false,
        cfg,
    )?
    .value
        * amplitude.powf(p);

    // trace: distance from the center to a boundary point is sqrt(s^2 + rho^2)
    let s = tp.s();
    let eps0 = tp.gap() * (2.0 + tp.gap());
    let rho_max_sq = r_cut * r_cut - s * s;
    if rho_max_sq <= 0.0 {
        // the cutoff ball does not reach the boundary
        return Ok((mass, 0.0, grad));
    }
    let rho_max = rho_max_sq.sqrt();
    let mut tbreaks = vec![0.0];
    if tp.gap() > 0.0 {
        let mut b = eps0.sqrt();
        while b < 0.5 {
            tbreaks.push(b);
            b *= 8.0;
        }
    }
    tbreaks.push(1.0f64.min(0.5 * rho_max));
    tbreaks.push(rho_max);
    tbreaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    tbreaks.dedup_by(|a, b| *a <= *b + 1e-12);
    let trace = integrate_pieces_relative(
        |rho: f64| {
            // u = r - r_min = rho^2/(r + r_min), stable for thin gaps
            let r_sq = s * s + rho * rho;
            let r = r_sq.sqrt();
            let u = if r_min > 0.0 {
                rho * rho / (r + r_min)
            } else {
                (r - r_min).max(0.0)
            };
            let (v, _, _) = nz.value_grad_at_offset(u);
            let (eta, _) = crate::field::radial_cutoff(r, r_cut);
            if eta == 0.0 {
                return 0.0;
            }
            sigma_trace * (v * eta).powf(p_sharp) * rho.powi(nm2)
        },
        &tbreaks,
        false,
        cfg,
    )?
    .value
        * amplitude.powf(p_sharp);

    Ok((mass, trace, grad))
}

/// Raw norms of the unit-amplitude interior bump: full-sphere mass and
/// gradient energy.
fn interior_bump_norms(radius: f64, params: &Params, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let n = params.n();
    let sigma_bulk = sphere_surface::<f64>(n - 1);
    let nm1 = (n - 1) as i32;
    let p = params.p();
    let p_star = params.p_star();
    let breaks = [0.0, 0.5 * radius, radius];

    let mass = integrate_pieces_relative(
        |r: f64| {
            let (phi, _) = crate::field::radial_bump(r, radius);
            sigma_bulk * phi.powf(p_star) * r.powi(nm1)
        },
        &breaks,
        false,
        cfg,
    )?
    .value;
    let energy = integrate_pieces_relative(
        |r: f64| {
            let (_, dphi) = crate::field::radial_bump(r, radius);
            sigma_bulk * dphi.abs().powf(p) * r.powi(nm1)
        },
        &breaks,
        false,
        cfg,
    )?
    .value;
    Ok((mass, energy))
}

/// Norms of the unit-amplitude boundary pancake: an ellipsoidal bump
/// centered on the boundary, squashed by `aspect` along the normal axis.
/// At critical exponents the bulk/trace ratio is scale-invariant, so the
/// aspect ratio is the lever that fits the bulk side into its budget.
/// Returns `(bulk mass, trace, gradient energy)`.
fn boundary_bump_norms(
    radius: f64,
    aspect: f64,
    params: &Params,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64, f64)> {
    let n = params.n();
    let sigma_bulk = sphere_surface::<f64>(n - 1);
    let sigma_trace = sphere_surface::<f64>(n - 2);
    let nm1 = (n - 1) as i32;
    let nm2 = (n - 2) as i32;
    let p = params.p();
    let p_star = params.p_star();
    let p_sharp = params.p_sharp();
    let breaks = [0.0, 0.5 * radius, radius];

    // bulk mass: exact normal-axis scaling of the isotropic half-ball
    let iso_mass = integrate_pieces_relative(
        |r: f64| {
            let (phi, _) = crate::field::radial_bump(r, radius);
            sigma_bulk * phi.powf(p_star) * r.powi(nm1)
        },
        &breaks,
        false,
        cfg,
    )?
    .value;
    let mass = 0.5 * iso_mass * aspect;

    let trace = integrate_pieces_relative(
        |rho: f64| {
            let (phi, _) = crate::field::radial_bump(rho, radius);
            sigma_trace * phi.powf(p_sharp) * rho.powi(nm2)
        },
        &breaks,
        false,
        cfg,
    )?
    .value;

    // gradient energy by iterated 2-D quadrature over the half-ellipsoid
    let outer = integrate_pieces_relative(
        |x1: f64| {
            let x1s = x1 / aspect;
            if x1s >= radius {
                return 0.0;
            }
            let rho_lim = (radius * radius - x1s * x1s).sqrt();
            let ibreaks = [0.0, 0.5 * rho_lim, rho_lim];
            integrate_pieces_relative(
                |rho: f64| {
                    let xi = (x1s * x1s + rho * rho).sqrt();
                    let (_, dphi) = crate::field::radial_bump(xi, radius);
                    if dphi == 0.0 || xi == 0.0 {
                        return 0.0;
                    }
                    let g1 = dphi * x1s / (xi * aspect);
                    let gt = dphi * rho / xi;
                    sigma_trace * (g1 * g1 + gt * gt).sqrt().powf(p) * rho.powi(nm2)
                },
                &ibreaks,
                false,
                cfg,
            )
            .map(|r| r.value)
            .unwrap_or(f64::NAN)
        },
        &[0.0, 0.5 * radius * aspect, radius * aspect],
        false,
        cfg,
    )?
    .value;
    if !outer.is_finite() {
        return Err(Error::NonConvergence("boundary bump energy quadrature failed".into()));
    }
    Ok((mass, trace, outer))
}

/// Build the two-bump competitor at a split.
///
/// `r_cut` is the cutoff radius; `sep > 2 r_cut` is the tangential
/// separation of the bump centers. Correction amplitudes are solved
/// exactly: the boundary bump restores the trace budget, the interior bump
/// the remaining bulk budget.
pub fn build_split_function(
    spec: &SplitSpec,
    r_cut: f64,
    sep: f64,
    params: &Params,
    cfg: &QuadratureConfig,
) -> Result<SplitConstruction> {
    if !(sep > 2.0 * r_cut) {
        return Err(Error::Invalid(format!(
            "separation {sep} must exceed twice the cutoff radius {r_cut}"
        )));
    }
    let (t1, t2) = spec.part_traces();
    if !(t1 > 0.0 && t2 > 0.0) {
        return Err(Error::Invalid(
            "the competitor needs both per-part trace values positive".into(),
        ));
    }
    let p = params.p();
    let p_star = params.p_star();
    let p_sharp = params.p_sharp();

    let tp1 = curve::solve_s_for_t(t1, params, cfg)?;
    let tp2 = curve::solve_s_for_t(t2, params, cfg)?;
    let nz1 = normalize(&tp1, cfg)?;
    let nz2 = normalize(&tp2, cfg)?;

    let (mass1, trace1, grad1) = cut_bump_norms(&nz1, spec.m1, r_cut, params, cfg)?;
    let (mass2, trace2, grad2) = cut_bump_norms(&nz2, spec.m2, r_cut, params, cfg)?;

    // shortfalls against the exact budgets
    let mass_shortfall = 1.0 - mass1 - mass2;
    let trace_shortfall = spec.t.powf(p_sharp) - trace1 - trace2;
    if mass_shortfall < -1e-9 || trace_shortfall < -1e-9 * spec.t.powf(p_sharp) {
        return Err(Error::Infeasible(format!(
            "cut bumps exceed their budgets: mass shortfall {mass_shortfall:e}, trace shortfall {trace_shortfall:e}"
        )));
    }
    let mass_shortfall = mass_shortfall.max(0.0);
    let trace_shortfall = trace_shortfall.max(0.0);
    if mass_shortfall > 0.1 {
        return Err(Error::Invalid(format!(
            "cutoff radius {r_cut} too small: bulk mass shortfall {mass_shortfall:.3} exceeds 10%"
        )));
    }

    // place the corrections on the second bump's side of the bisector,
    // clear of its support
    let half_sep = 0.5 * sep;
    let clearance = half_sep - r_cut;
    let r_c = (clearance / 6.0).min(1.0).max(1e-3);
    let (int_mass, int_energy) = interior_bump_norms(r_c, params, cfg)?;

    // solve the boundary amplitude from the trace budget; the bulk/trace
    // ratio is scale-invariant in the radius, so squash the bump along the
    // normal axis until its bulk mass fits inside the bulk budget
    let mut aspect = 1.0f64;
    let mut flatten = 0;
    let (bd_norms, a_int, b_bd) = loop {
        let bd = boundary_bump_norms(r_c, aspect, params, cfg)?;
        let b_bd = if trace_shortfall == 0.0 {
            0.0
        } else {
            (trace_shortfall / bd.1).powf(1.0 / p_sharp)
        };
        let bd_bulk = b_bd.powf(p_star) * bd.0;
        if bd_bulk <= mass_shortfall || trace_shortfall == 0.0 {
            let remaining = (mass_shortfall - bd_bulk).max(0.0);
            let a_int = if remaining == 0.0 {
                0.0
            } else {
                (remaining / int_mass).powf(1.0 / p_star)
            };
            break (bd, a_int, b_bd);
        }
        aspect *= 0.5;
        flatten += 1;
        if flatten > 60 {
            return Err(Error::NonConvergence(
                "could not fit the boundary correction inside the bulk budget".into(),
            ));
        }
    };
    let corrections = [
        CorrectionBump {
            amplitude: a_int,
            radius: r_c,
            aspect: 1.0,
            center_normal: 2.0 * r_c,
            center_tangential: -clearance / 3.0,
        },
        CorrectionBump {
            amplitude: b_bd,
            radius: r_c,
            aspect,
            center_normal: 0.0,
            center_tangential: -2.0 * clearance / 3.0,
        },
    ];

    let w_energy = grad1 + grad2 + a_int.powf(p) * int_energy + b_bd.powf(p) * bd_norms.2;

    // recompute the constraints from the solved pieces
    let total_mass =
        mass1 + mass2 + a_int.powf(p_star) * int_mass + b_bd.powf(p_star) * bd_norms.0;
    let total_trace = trace1 + trace2 + b_bd.powf(p_sharp) * bd_norms.1;
    let residuals = (1.0 - total_mass, spec.t.powf(p_sharp) - total_trace);

    let gap = binding_gap(spec, params, cfg)?;
    let side2 = mass2 + a_int.powf(p_star) * int_mass + b_bd.powf(p_star) * bd_norms.0;

    Ok(SplitConstruction {
        spec: *spec,
        r_cutoff: r_cut,
        sep,
        bumps: [
            SplitBump {
                extremal: nz1,
                amplitude: spec.m1,
                mass: mass1,
                trace: trace1,
                grad_energy: grad1,
            },
            SplitBump {
                extremal: nz2,
                amplitude: spec.m2,
                mass: mass2,
                trace: trace2,
                grad_energy: grad2,
            },
        ],
        corrections,
        correction_budget: (mass_shortfall, trace_shortfall),
        w_energy,
        constraint_residuals: residuals,
        side_masses: (mass1, side2),
        gap,
    })
}

/// Energy convergence of the competitor along a cutoff schedule.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub r_cut: f64,
    pub w_energy: f64,
    /// `w_energy - rhs` of the gap (the vanishing excess).
    pub excess: f64,
    /// `w_energy - Phi(T)^p` (must stay nonnegative: w is a competitor).
    pub above_infimum: f64,
}

/// Build the competitor along an increasing cutoff schedule with separation
/// `2.5 R` and record the energy excess at each scale.
pub fn split_energy_convergence(
    spec: &SplitSpec,
    r_schedule: &[f64],
    params: &Params,
    cfg: &QuadratureConfig,
) -> Result<Vec<ConvergenceRow>> {
    for w in r_schedule.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::Invalid("cutoff schedule must increase".into()));
        }
    }
    let mut rows = Vec::with_capacity(r_schedule.len());
    for &r_cut in r_schedule {
        let sc = build_split_function(spec, r_cut, 2.5 * r_cut, params, cfg)?;
        rows.push(ConvergenceRow {
            r_cut,
            w_energy: sc.w_energy,
            excess: sc.w_energy - sc.gap.rhs,
            above_infimum: sc.w_energy - sc.gap.lhs,
        });
    }
    Ok(rows)
}

/// Finite-partition energy: for parts `(m_i, t_i)` satisfying the budgets,
/// `sum_i m_i^p Phi(t_i/m_i)^p` (the countable-sum side of the binding
/// inequality; it dominates `Phi(T)^p`).
pub fn partition_energy(parts: &[(f64, f64)], params: &Params, cfg: &QuadratureConfig) -> Result<f64> {
    let p = params.p();
    let mut sum = 0.0;
    for &(m, t) in parts {
        let (phi_p, _) = phi_pow_p(t / m, params, cfg)?;
        sum += m.powf(p) * phi_p;
    }
    Ok(sum)
}

/// The symmetric split of trace value `t`.
pub fn symmetric_split(t: f64, params: &Params) -> Result<SplitSpec> {
    let m1 = 0.5f64.powf(1.0 / params.p_star());
    let t1 = 0.5f64.powf(1.0 / params.p_sharp()) * t;
    split_complement(t, m1, t1, params)
}

/// Convenience re-export for CLI reporting.
pub fn phi_point(t: f64, params: &Params, cfg: &QuadratureConfig) -> Result<PhiPoint> {
    phi_of_t(t, params, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn p32() -> Params {
        Params::new(3, 2.0).unwrap()
    }

    #[test]
    fn complement_arithmetic() {
        let prm = p32();
        // symmetric split of T = 1: m1 = 2^{-1/6}, t1 = 2^{-1/4}
        let sym = symmetric_split(1.0, &prm).unwrap();
        assert!((sym.m1 - sym.m2).abs() < 1e-15);
        assert!((sym.t1 - sym.t2).abs() < 1e-15);
        assert!(sym.constraints_ok(&prm, 1e-12));

        // hand-computed complement at m1 = 0.6, t1 = 0.3
        let s = split_complement(1.0, 0.6, 0.3, &prm).unwrap();
        assert!((s.m2 - (1.0 - 0.6f64.powi(6)).powf(1.0 / 6.0)).abs() < 1e-15);
        assert!((s.t2 - (1.0 - 0.3f64.powi(4)).powf(0.25)).abs() < 1e-15);

        // degenerate corner m1 -> 1
        let c = split_complement(1.0, 0.999999, 0.9999, &prm).unwrap();
        assert!(c.m2 < 0.2 && c.t2 < 0.5);

        assert!(split_complement(1.0, 0.5, 1.5, &prm).is_err());
    }

    #[test]
    fn symmetric_gap_is_certified_positive() {
        let prm = p32();
        let c = fundamental_constants(&prm, &cfg()).unwrap();
        let spec = symmetric_split(c.t_0, &prm).unwrap();
        let gap = binding_gap(&spec, &prm, &cfg()).unwrap();
        assert!(gap.certified_positive(), "{gap:?}");
        assert!(gap.gap > 0.1, "symmetric gap unexpectedly small: {}", gap.gap);
    }

    #[test]
    fn zero_trace_part_uses_the_bulk_constant() {
        let prm = p32();
        let c = fundamental_constants(&prm, &cfg()).unwrap();
        let spec = split_complement(c.t_0, 0.7, 0.0, &prm).unwrap();
        let gap = binding_gap(&spec, &prm, &cfg()).unwrap();
        assert!(gap.certified_positive());
        // part 1 contributes exactly m1^p S^p
        let part1 = 0.7f64.powi(2) * c.s_const.powi(2);
        assert!(gap.rhs > part1);
    }

    #[test]
    fn swap_symmetry_is_exact() {
        let prm = p32();
        let c = fundamental_constants(&prm, &cfg()).unwrap();
        let spec = split_complement(c.t_0, 0.62, 0.41 * c.t_0, &prm).unwrap();
        let a = binding_gap(&spec, &prm, &cfg()).unwrap();
        let b = binding_gap(&spec.swapped(), &prm, &cfg()).unwrap();
        assert_eq!(a.gap.to_bits(), b.gap.to_bits());
    }

    #[test]
    fn corner_path_gap_vanishes() {
        let prm = p32();
        let c = fundamental_constants(&prm, &cfg()).unwrap();
        let t = c.t_0;
        let phi_p = phi_of_t(t, &prm, &cfg()).unwrap().phi.powi(2);
        let mut prev = f64::INFINITY;
        for &m2 in &[0.5, 0.3, 0.15, 0.05] {
            let spec = corner_split(t, m2, &prm).unwrap();
            let gap = binding_gap(&spec, &prm, &cfg()).unwrap();
            assert!(gap.gap > 0.0);
            assert!(gap.gap < prev, "gap not shrinking along the corner path");
            prev = gap.gap;
        }
        let tiny = binding_gap(&corner_split(t, 0.02, &prm).unwrap(), &prm, &cfg()).unwrap();
        assert!(tiny.gap < 0.01 * phi_p, "corner gap {} vs scale {}", tiny.gap, 0.01 * phi_p);
    }

    #[test]
    fn coarse_grid_all_positive() {
        let prm = p32();
        let c = fundamental_constants(&prm, &cfg()).unwrap();
        let scan = scan_binding_grid(c.t_0, 4, 0.1, &prm, &cfg()).unwrap();
        assert_eq!(scan.rows.len(), 16);
        assert!(scan.uncertified.is_empty());
        assert!(scan.min_gap > 0.0);
    }

    #[test]
    fn construction_constraints_restore_exactly() {
        let prm = p32();
        let c = fundamental_constants(&prm, &cfg()).unwrap();
        let spec = symmetric_split(3.0 * c.t_e, &prm).unwrap();
        let sc = build_split_function(&spec, 8.0, 20.0, &prm, &cfg()).unwrap();
        assert!(
            sc.constraint_residuals.0.abs() < 1e-10,
            "mass residual {:e}",
            sc.constraint_residuals.0
        );
        assert!(
            sc.constraint_residuals.1.abs() < 1e-10 * spec.t.powf(prm.p_sharp()),
            "trace residual {:e}",
            sc.constraint_residuals.1
        );
        // per-bump masses stay within their budgets
        assert!(sc.bumps[0].mass <= spec.m1.powf(6.0) + 1e-12);
        assert!(sc.bumps[1].mass <= spec.m2.powf(6.0) + 1e-12);
        // symmetric split: equal bump energies
        assert!((sc.bumps[0].grad_energy - sc.bumps[1].grad_energy).abs() < 1e-8);
        // the competitor never beats the infimum
        assert!(sc.w_energy >= sc.gap.lhs - 1e-6);
        // mass on the second bump's side is at least one half
        assert!(sc.side_masses.1 >= 0.5 - 1e-9);
    }

    #[test]
    fn energy_excess_shrinks_with_the_cutoff() {
        let prm = p32();
        let c = fundamental_constants(&prm, &cfg()).unwrap();
        let spec = symmetric_split(3.0 * c.t_e, &prm).unwrap();
        let rows = split_energy_convergence(&spec, &[4.0, 8.0, 16.0], &prm, &cfg()).unwrap();
        for w in rows.windows(2) {
            assert!(
                w[1].excess < w[0].excess,
                "excess not decreasing: {} -> {}",
                w[0].excess,
                w[1].excess
            );
        }
        for row in &rows {
            assert!(row.above_infimum >= -1e-6, "competitor beat the infimum: {row:?}");
            assert!(row.excess > 0.0, "negative excess at R = {}", row.r_cut);
        }
    }
}
