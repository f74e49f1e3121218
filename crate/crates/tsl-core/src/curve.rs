//! The solved curve `T -> Phi_H(T)`: fundamental constants, per-point
//! solves across the three regimes, the transport identity certificate and
//! shape certificates over a grid.
//!
//! Solving runs in `f64`; each solved point is then re-evaluated in
//! double-double so certificates with razor-thin margins (the far tail of
//! the curve, the transport identity) rest on error bounds far below them.

use crate::num::quad::integrate_pieces;
use crate::num::sphere::sphere_surface;
use crate::num::{find_root_bracketed, Bracket, Dd, QuadratureConfig, Real};
use crate::params::Params;
use crate::profiles::{
    certified_point, normalize, trace_ratio, CertifiedPoint, ProfileFamily, TranslatedProfile,
};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Fundamental constants of the curve for one `(n, p)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FundamentalConstants {
    /// Sharp bulk Sobolev constant `S_{n,p} = Phi_H(0+)`.
    pub s_const: f64,
    /// Sharp trace (Escobar) constant `E_{n,p}`.
    pub e_const: f64,
    /// The unique trace value where the linear lower bound `E T` is attained.
    pub t_e: f64,
    /// Trace value of the boundary-centered bulk extremal (`s = 0`).
    pub t_0: f64,
    /// Global minimum value of the curve, `S / 2^{1/n}`, attained at `t_0`.
    pub sobolev_floor: f64,
    /// Estimated abscissa of the inflection below `t_0` (grid estimate).
    pub t_star_estimate: f64,
    /// Grid resolution of the inflection estimate.
    pub t_star_error: f64,
}

fn constants_cache() -> &'static Mutex<HashMap<(u32, u64, u64), FundamentalConstants>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u64, u64), FundamentalConstants>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Full-space norms of the bulk extremal (no cap fraction).
fn full_space_sobolev_constant(params: &Params, cfg: &QuadratureConfig) -> Result<f64> {
    let e = params.exponents::<f64>();
    let n = params.n();
    let sigma = sphere_surface::<f64>(n - 1);
    let nm1 = (n - 1) as i32;
    let grad_pref = e.grad_coeff.powr(e.p);
    let mass = integrate_pieces(
        |r: f64| {
            let l = (e.q * r.ln()).exp().ln_1p();
            sigma * (e.p_star * e.value_pow_bulk * l).exp() * r.powi(nm1)
        },
        &[0.0, 1.0, 8.0],
        true,
        cfg,
    )?;
    let grad = integrate_pieces(
        |r: f64| {
            let l = (e.q * r.ln()).exp().ln_1p();
            let rq = (e.q * r.ln()).exp();
            sigma * grad_pref * (-e.n * l).exp() * rq * r.powi(nm1)
        },
        &[0.0, 1.0, 8.0],
        true,
        cfg,
    )?;
    Ok(grad.value.powf(1.0 / params.p()) / mass.value.powf(1.0 / params.p_star()))
}

/// Compute (and cache) the fundamental constants.
pub fn fundamental_constants(params: &Params, cfg: &QuadratureConfig) -> Result<FundamentalConstants> {
    let key = (params.n(), params.p().to_bits(), cfg.rel_tol.to_bits());
    if let Some(c) = constants_cache().lock().unwrap().get(&key) {
        return Ok(*c);
    }

    let s_const = full_space_sobolev_constant(params, cfg)?;
    let escobar = normalize(&TranslatedProfile::escobar(-1.0, *params)?, cfg)?;
    let e_const = escobar.phi / escobar.t;
    let t_e = escobar.t;
    let center = normalize(&TranslatedProfile::sobolev(0.0, *params), cfg)?;
    let t_0 = center.t;
    let sobolev_floor = s_const / 2f64.powf(1.0 / params.nf());

    // Inflection estimate below t_0: walk the bulk family outward (s > 0)
    // so the trace value sweeps (0, t_0), and find the sign change of the
    // second divided difference of phi(T).
    let mut pts: Vec<(f64, f64)> = Vec::new();
    let mut s = 0.0;
    while pts.is_empty() || pts.last().unwrap().0 > 0.05 * t_0 {
        let nz = normalize(&TranslatedProfile::sobolev(s, *params), cfg)?;
        pts.push((nz.t, nz.phi));
        s = if s == 0.0 { 0.25 } else { s * 1.35 };
        if pts.len() > 60 {
            break;
        }
    }
    pts.reverse(); // increasing T
    let mut t_star_estimate = f64::NAN;
    let mut t_star_error = f64::NAN;
    for w in pts.windows(3) {
        let (t0, f0) = w[0];
        let (t1, f1) = w[1];
        let (t2, f2) = w[2];
        let d2 = 2.0 * ((f2 - f1) / (t2 - t1) - (f1 - f0) / (t1 - t0)) / (t2 - t0);
        if d2 <= 0.0 {
            // first concave triple walking up in T marks the inflection
            t_star_estimate = t1;
            t_star_error = t2 - t0;
            break;
        }
    }

    let constants = FundamentalConstants {
        s_const,
        e_const,
        t_e,
        t_0,
        sobolev_floor,
        t_star_estimate,
        t_star_error,
    };
    constants_cache().lock().unwrap().insert(key, constants);
    Ok(constants)
}

/// Relative half-width of the seam around `t_e` dispatched to the trace
/// (scale-invariant) family.
pub const REGIME_BAND: f64 = 1e-9;

/// Solve for the translate whose normalized trace value is `t`.
///
/// Returns the translate; its family is the regime. The solver treats the
/// empirically monotone trace-vs-translation map as monotone and reports a
/// hard diagnostic error if an evaluation sequence contradicts that.
pub fn solve_s_for_t(t: f64, params: &Params, cfg: &QuadratureConfig) -> Result<TranslatedProfile> {
    solve_s_with_seed(t, params, cfg, None)
}

/// As [`solve_s_for_t`] with a warm-start seed from a neighbouring solve:
/// `(family, x)` where `x` is `s` below the seam and `ln(gap)` above it.
pub fn solve_s_with_seed(
    t: f64,
    params: &Params,
    cfg: &QuadratureConfig,
    seed: Option<(ProfileFamily, f64)>,
) -> Result<TranslatedProfile> {
    if !(t > 0.0) {
        return Err(Error::Invalid(format!("trace value must be positive, got {t}")));
    }
    let constants = fundamental_constants(params, cfg)?;
    let t_e = constants.t_e;
    if (t - t_e).abs() <= REGIME_BAND * t_e {
        return TranslatedProfile::escobar(-1.0, *params);
    }

    let prm = *params;
    if t < t_e {
        // bulk regime: T(s) decreases from t_e (s -> -inf) to 0 (s -> +inf)
        let g = move |s: f64| -> Result<f64> {
            Ok(trace_ratio(&TranslatedProfile::sobolev(s, prm), cfg)? - t)
        };
        let (lo, hi) = match seed {
            Some((ProfileFamily::Sobolev, s0)) => (s0 - 0.5, s0 + 0.5),
            _ => (-2.0, 2.0),
        };
        let (lo, hi) = expand_decreasing(&g, lo, hi, 1e7, t)?;
        let s = find_root_bracketed(|s| g(s).unwrap_or(f64::NAN), Bracket::new(lo, hi)?, 1e-12 * (1.0 + hi.abs().max(lo.abs())))?;
        Ok(TranslatedProfile::sobolev(s, prm))
    } else {
        // hyperbolic regime, solved in lambda = ln(gap):
        // T(gap) decreases from +inf (gap -> 0) to t_e (gap -> inf)
        let g = move |lam: f64| -> Result<f64> {
            let tp = TranslatedProfile::hyperbolic_from_gap(lam.exp(), prm)?;
            Ok(trace_ratio(&tp, cfg)? - t)
        };
        let (lo, hi) = match seed {
            Some((ProfileFamily::Hyperbolic, l0)) => (l0 - 0.75, l0 + 0.75),
            _ => (-9.0, 2.0),
        };
        let (lo, hi) = expand_decreasing(&g, lo, hi, 750.0, t)?;
        let lam =
            find_root_bracketed(|l| g(l).unwrap_or(f64::NAN), Bracket::new(lo, hi)?, 1e-12 * (1.0 + hi.abs().max(lo.abs())))?;
        TranslatedProfile::hyperbolic_from_gap(lam.exp(), prm)
    }
}

/// Expand a bracket for a decreasing function until it straddles zero.
/// Also watches the evaluations for monotonicity violations.
fn expand_decreasing(
    g: &impl Fn(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    limit: f64,
    target: f64,
) -> Result<(f64, f64)> {
    let mut evals: Vec<(f64, f64)> = Vec::new();
    let check = |x: f64, gx: f64, evals: &mut Vec<(f64, f64)>| -> Result<()> {
        for &(x0, g0) in evals.iter() {
            let widened = 1e-9 * (g0.abs() + gx.abs() + 1e-12);
            if (x > x0 && gx > g0 + widened) || (x < x0 && gx < g0 - widened) {
                return Err(Error::NonMonotone {
                    s: x,
                    detail: format!("g({x0:e}) = {g0:e} vs g({x:e}) = {gx:e} while expanding"),
                });
            }
        }
        evals.push((x, gx));
        Ok(())
    };

    let mut g_lo = g(lo)?;
    check(lo, g_lo, &mut evals)?;
    let mut g_hi = g(hi)?;
    check(hi, g_hi, &mut evals)?;
    let mut steps = 0;
    while g_lo < 0.0 {
        let width = (hi - lo).max(1.0);
        hi = lo;
        g_hi = g_lo;
        lo -= 2.0 * width;
        if lo < -limit || steps > 60 {
            return Err(Error::BracketExpansion { target, lo, hi });
        }
        g_lo = g(lo)?;
        check(lo, g_lo, &mut evals)?;
        steps += 1;
    }
    while g_hi > 0.0 {
        let width = (hi - lo).max(1.0);
        lo = hi;
        hi += 2.0 * width;
        if hi > limit || steps > 60 {
            return Err(Error::BracketExpansion { target, lo, hi });
        }
        g_hi = g(hi)?;
        check(hi, g_hi, &mut evals)?;
        steps += 1;
    }
    Ok((lo, hi))
}

/// One solved point of the curve.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PhiPoint {
    /// Trace value actually measured for the solved translate.
    #[serde(rename = "T")]
    pub t: f64,
    pub regime: ProfileFamily,
    /// Translation parameter of the solved translate.
    pub s: f64,
    /// Curve value `Phi_H(T)`.
    pub phi: f64,
    /// Transport moment of the normalized extremal.
    #[serde(rename = "yT")]
    pub y_t: f64,
    /// Relative error carried by the quadratures behind this point.
    #[serde(skip)]
    pub rel_err: f64,
    /// Boundary gap for the hyperbolic regime (exact parametrisation).
    #[serde(skip)]
    pub gap: f64,
}

/// Solve the curve at `t` (f64 quadratures throughout).
pub fn phi_of_t(t: f64, params: &Params, cfg: &QuadratureConfig) -> Result<PhiPoint> {
    let tp = solve_s_for_t(t, params, cfg)?;
    point_from_translate(&tp, cfg)
}

fn point_from_translate(tp: &TranslatedProfile, cfg: &QuadratureConfig) -> Result<PhiPoint> {
    let nz = normalize(tp, cfg)?;
    Ok(PhiPoint {
        t: nz.t,
        regime: tp.family,
        s: tp.s(),
        phi: nz.phi,
        y_t: nz.y_t,
        rel_err: nz.rel_err,
        gap: tp.gap(),
    })
}

/// A curve point with its extended-precision evaluation.
#[derive(Debug, Clone, Copy)]
pub struct CertifiedPhiPoint {
    pub point: PhiPoint,
    pub dd: CertifiedPoint,
}

/// Solve at `t`, then re-evaluate the solved translate in double-double.
pub fn phi_of_t_certified(t: f64, params: &Params, cfg: &QuadratureConfig) -> Result<CertifiedPhiPoint> {
    let tp = solve_s_for_t(t, params, cfg)?;
    certify_translate(&tp)
}

fn certify_translate(tp: &TranslatedProfile) -> Result<CertifiedPhiPoint> {
    let dd_cfg = QuadratureConfig::certificate();
    let dd = certified_point(tp, &dd_cfg)?;
    let point = PhiPoint {
        t: dd.t.to_f64(),
        regime: tp.family,
        s: tp.s(),
        phi: dd.phi.to_f64(),
        y_t: dd.y_t.to_f64(),
        rel_err: dd.rel_err.max(1e-16),
        gap: tp.gap(),
    };
    Ok(CertifiedPhiPoint { point, dd })
}

/// Residual of the transport identity
/// `p# Phi Y_T + s T^{p#} = n int_H U_T^{p#}` at the solved point,
/// relative to the right-hand side.
///
/// Above the trace point the two left-hand terms cancel to many orders
/// against a tiny right-hand side, so the whole combination is evaluated in
/// double-double.
pub fn verify_transport_identity(t: f64, params: &Params, cfg: &QuadratureConfig) -> Result<f64> {
    let tp = solve_s_for_t(t, params, cfg)?;
    transport_identity_residual(&tp, params)
}

/// Identity residual for a given translate (any valid translate satisfies it).
pub fn transport_identity_residual(tp: &TranslatedProfile, params: &Params) -> Result<f64> {
    let dd_cfg = QuadratureConfig::certificate();
    let c = certified_point(tp, &dd_cfg)?;
    let e = params.exponents_dd();
    let s_dd = match tp.family {
        ProfileFamily::Hyperbolic => -(Dd::ONE + Dd::from_f64(tp.gap())),
        _ => Dd::from_f64(tp.s()),
    };
    let lhs = e.p_sharp * c.phi * c.y_t + s_dd * c.t.powr(e.p_sharp);
    let rhs = e.n * c.psharp_mass;
    Ok(((lhs - rhs) / rhs).to_f64().abs())
}

/// Shape certificates over a scanned grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShapeReport {
    /// Strict decrease on grid points at or below `t_0`.
    pub decreasing_below_t0: bool,
    /// Strict increase on grid points at or above `t_0`.
    pub increasing_above_t0: bool,
    /// Nonnegative second divided differences above `t_0`.
    pub convex_above_t0: bool,
    /// `phi > T^{p#}/p#` with margin exceeding the evaluation error.
    pub above_asymptote: bool,
    /// `phi >= max(E T, floor)` up to evaluation error.
    pub above_lower_bounds: bool,
    /// Tail ratio `phi / (T^{p#}/p#)` decreasing on points at or above `t_e`.
    pub tail_ratio_decreasing: bool,
    /// Final tail ratio minus one (should be small and nonnegative).
    pub tail_ratio_final_minus_one: f64,
    /// Human-readable description of each certificate failure.
    pub failures: Vec<String>,
}

impl ShapeReport {
    pub fn all_pass(&self) -> bool {
        self.decreasing_below_t0
            && self.increasing_above_t0
            && self.convex_above_t0
            && self.above_asymptote
            && self.above_lower_bounds
            && self.tail_ratio_decreasing
    }
}

/// A scanned stretch of the curve with its certificates.
#[derive(Debug, Clone)]
pub struct CurveScan {
    pub points: Vec<PhiPoint>,
    pub constants: FundamentalConstants,
    pub shape: ShapeReport,
    /// Extended-precision values backing the certificates.
    pub certified: Vec<CertifiedPoint>,
}

/// Scan the curve over a strictly increasing positive grid and certify its
/// shape. Solves run sequentially with warm-started brackets; the
/// extended-precision refinements run in parallel.
pub fn scan_curve(t_grid: &[f64], params: &Params, cfg: &QuadratureConfig) -> Result<CurveScan> {
    if t_grid.is_empty() {
        return Err(Error::Invalid("empty grid".into()));
    }
    for w in t_grid.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::Invalid(format!("grid not increasing: {} >= {}", w[0], w[1])));
        }
    }
    if t_grid[0] <= 0.0 {
        return Err(Error::Invalid("grid values must be positive".into()));
    }
    let constants = fundamental_constants(params, cfg)?;

    // warm-started sequential solves
    let mut translates = Vec::with_capacity(t_grid.len());
    let mut seed: Option<(ProfileFamily, f64)> = None;
    for &t in t_grid {
        let tp = solve_s_with_seed(t, params, cfg, seed)?;
        seed = match tp.family {
            ProfileFamily::Sobolev => Some((ProfileFamily::Sobolev, tp.s())),
            ProfileFamily::Hyperbolic => Some((ProfileFamily::Hyperbolic, tp.gap().ln())),
            ProfileFamily::Escobar => None,
        };
        translates.push(tp);
    }

    // parallel certification
    use rayon::prelude::*;
    let certified: Result<Vec<CertifiedPhiPoint>> =
        translates.par_iter().map(certify_translate).collect();
    let certified = certified?;

    let points: Vec<PhiPoint> = certified.iter().map(|c| c.point).collect();
    let dd: Vec<CertifiedPoint> = certified.iter().map(|c| c.dd).collect();
    let shape = certify_shape(&points, &dd, &constants, params);
    Ok(CurveScan { points, constants, shape, certified: dd })
}

fn certify_shape(
    points: &[PhiPoint],
    dd: &[CertifiedPoint],
    constants: &FundamentalConstants,
    params: &Params,
) -> ShapeReport {
    let e = params.exponents_dd();
    let mut failures = Vec::new();

    // strict monotonicity on either side of the minimum, certified when the
    // difference exceeds the evaluation noise
    let mut decreasing_below_t0 = true;
    let mut increasing_above_t0 = true;
    for w in 0..points.len().saturating_sub(1) {
        let (a, b) = (&points[w], &points[w + 1]);
        let diff = (dd[w + 1].phi - dd[w].phi).to_f64();
        let tol = 8.0 * (a.rel_err + b.rel_err) * a.phi.abs().max(b.phi.abs());
        if b.t <= constants.t_0 && diff >= -tol {
            decreasing_below_t0 = false;
            failures.push(format!("phi not strictly decreasing between T={} and T={}", a.t, b.t));
        }
        if a.t >= constants.t_0 && diff <= tol {
            increasing_above_t0 = false;
            failures.push(format!("phi not strictly increasing between T={} and T={}", a.t, b.t));
        }
    }

    // second divided differences above t_0, tolerance from the dd error
    let mut convex_above_t0 = true;
    for w in 0..points.len().saturating_sub(2) {
        let (p0, p1, p2) = (&points[w], &points[w + 1], &points[w + 2]);
        if p0.t < constants.t_0 {
            continue;
        }
        let d01 = (dd[w + 1].phi - dd[w].phi).to_f64() / (p1.t - p0.t);
        let d12 = (dd[w + 2].phi - dd[w + 1].phi).to_f64() / (p2.t - p1.t);
        let d2 = (d12 - d01) / (p2.t - p0.t);
        let tol = 64.0
            * (dd[w].rel_err + dd[w + 1].rel_err + dd[w + 2].rel_err)
            * p1.phi.abs()
            / ((p2.t - p1.t) * (p1.t - p0.t));
        if d2 < -tol {
            convex_above_t0 = false;
            failures.push(format!("second difference {d2:e} < -{tol:e} at T={}", p1.t));
        }
    }

    // pointwise lower bounds, in double-double
    let mut above_asymptote = true;
    let mut above_lower_bounds = true;
    let floor = Dd::from_f64(constants.sobolev_floor);
    let e_line = Dd::from_f64(constants.e_const);
    for (i, c) in dd.iter().enumerate() {
        let asym = c.t.powr(e.p_sharp) / e.p_sharp;
        let margin = (c.phi - asym).to_f64();
        let tol = 8.0 * c.rel_err * points[i].phi.abs();
        if margin <= tol {
            above_asymptote = false;
            failures.push(format!(
                "phi - T^p#/p# = {margin:e} not positive beyond noise {tol:e} at T={}",
                points[i].t
            ));
        }
        let lb = (e_line * c.t).max(floor);
        if (c.phi - lb).to_f64() < -tol {
            above_lower_bounds = false;
            failures.push(format!("phi below max(E T, floor) at T={}", points[i].t));
        }
    }

    // decreasing tail ratio at and above t_e
    let mut tail_ratio_decreasing = true;
    let mut prev: Option<(usize, Dd)> = None;
    let mut tail_ratio_final_minus_one = f64::NAN;
    for (i, c) in dd.iter().enumerate() {
        if points[i].t < constants.t_e * (1.0 - 1e-12) {
            continue;
        }
        let ratio = c.phi / (c.t.powr(e.p_sharp) / e.p_sharp);
        if let Some((j, prev_ratio)) = prev {
            let tol = 8.0 * (c.rel_err + dd[j].rel_err) * prev_ratio.to_f64();
            if (ratio - prev_ratio).to_f64() > tol {
                tail_ratio_decreasing = false;
                failures.push(format!("tail ratio increased at T={}", points[i].t));
            }
        }
        prev = Some((i, ratio));
        tail_ratio_final_minus_one = (ratio - Dd::ONE).to_f64();
    }

    ShapeReport {
        decreasing_below_t0,
        increasing_above_t0,
        convex_above_t0,
        above_asymptote,
        above_lower_bounds,
        tail_ratio_decreasing,
        tail_ratio_final_minus_one,
        failures,
    }
}

/// A default grid for shape certification: dense through both regimes and
/// geometric along the tail out to `mult * t_e`.
pub fn default_shape_grid(constants: &FundamentalConstants, count: usize, mult: f64) -> Vec<f64> {
    let lo = constants.t_0 / 4.0;
    let seam = 1.5 * constants.t_e;
    let hi = mult * constants.t_e;
    let n_low = count / 2;
    let n_high = count - n_low;
    let mut grid = Vec::with_capacity(count + 2);
    for i in 0..n_low {
        grid.push(lo + (seam - lo) * i as f64 / n_low as f64);
    }
    for i in 0..n_high {
        grid.push(seam * (hi / seam).powf(i as f64 / (n_high - 1) as f64));
    }
    grid.push(constants.t_0);
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * *b);
    grid
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    // frozen oracle values, computed with 40-digit quadrature (mpmath):
    // closed forms exist at (3,2) and (2,1.5) and were verified there.
    const ORACLE: &[(u32, f64, [f64; 4])] = &[
        // (n, p, [S, E, T_E, T_0])
        (2, 1.5, [2.5261839045947457, 1.2599210498948732, 1.5446252869781715, 1.2904907420478493]),
        (3, 2.0, [2.3404922750420117, 1.3313353638003897, 1.482931297468476, 1.2855407322296389]),
        (4, 2.5, [2.1182496237050294, 1.3317347180503629, 1.4028241963991696, 1.2466343009625944]),
        (5, 3.0, [1.9304015012620441, 1.3048030352273010, 1.3397170743989624, 1.2113120029680137]),
    ];

    #[test]
    fn fundamental_constants_match_oracles() {
        for &(n, p, [s, e, te, t0]) in ORACLE {
            let prm = Params::new(n, p).unwrap();
            let c = fundamental_constants(&prm, &cfg()).unwrap();
            assert!((c.s_const - s).abs() < 1e-8 * s, "S at ({n},{p}): {} vs {s}", c.s_const);
            assert!((c.e_const - e).abs() < 1e-8 * e, "E at ({n},{p}): {} vs {e}", c.e_const);
            assert!((c.t_e - te).abs() < 1e-8 * te, "T_E at ({n},{p}): {} vs {te}", c.t_e);
            assert!((c.t_0 - t0).abs() < 1e-8 * t0, "T_0 at ({n},{p}): {} vs {t0}", c.t_0);
            assert!(c.t_0 < c.t_e);
            assert!(c.sobolev_floor < c.s_const);
        }
    }

    #[test]
    fn special_point_values() {
        let prm = Params::new(3, 2.0).unwrap();
        let c = fundamental_constants(&prm, &cfg()).unwrap();
        let at_t0 = phi_of_t(c.t_0, &prm, &cfg()).unwrap();
        assert!((at_t0.phi / c.sobolev_floor - 1.0).abs() < 1e-6);
        let at_te = phi_of_t(c.t_e, &prm, &cfg()).unwrap();
        assert!((at_te.phi / (c.e_const * c.t_e) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn solve_finds_the_right_regimes() {
        let prm = Params::new(3, 2.0).unwrap();
        let c = fundamental_constants(&prm, &cfg()).unwrap();
        let tp = solve_s_for_t(c.t_0, &prm, &cfg()).unwrap();
        assert_eq!(tp.family, ProfileFamily::Sobolev);
        assert!(tp.s().abs() < 1e-8, "s at T0 was {}", tp.s());

        let tp = solve_s_for_t(c.t_e, &prm, &cfg()).unwrap();
        assert_eq!(tp.family, ProfileFamily::Escobar);
        assert_eq!(tp.s(), -1.0);

        let tp = solve_s_for_t(2.0 * c.t_e, &prm, &cfg()).unwrap();
        assert_eq!(tp.family, ProfileFamily::Hyperbolic);
        assert!(tp.s() < -1.0);
        // re-verify by recomputing the trace ratio of the solved translate
        let t_back = trace_ratio(&tp, &cfg()).unwrap();
        assert!((t_back - 2.0 * c.t_e).abs() < 1e-9 * c.t_e, "round trip {t_back}");
    }

    #[test]
    fn identity_residual_small_across_regimes() {
        let prm = Params::new(3, 2.0).unwrap();
        let c = fundamental_constants(&prm, &cfg()).unwrap();
        for t in [c.t_0, c.t_e, 3.0 * c.t_e] {
            let r = verify_transport_identity(t, &prm, &cfg()).unwrap();
            assert!(r < 1e-8, "residual {r:e} at T = {t}");
        }
    }

    #[test]
    fn phi_asymptote_window_at_10_te() {
        let prm = Params::new(3, 2.0).unwrap();
        let c = fundamental_constants(&prm, &cfg()).unwrap();
        let pt = phi_of_t_certified(10.0 * c.t_e, &prm, &cfg()).unwrap();
        let e = prm.exponents_dd();
        let ratio = (pt.dd.phi / (pt.dd.t.powr(e.p_sharp) / e.p_sharp)).to_f64();
        assert!(ratio > 1.0 && ratio < 1.2, "ratio {ratio}");
    }

    #[test]
    fn round_trip_consistency() {
        let prm = Params::new(2, 1.5).unwrap();
        let c = fundamental_constants(&prm, &cfg()).unwrap();
        for t in [0.6 * c.t_0, c.t_0, 0.5 * (c.t_0 + c.t_e), 2.5 * c.t_e] {
            let pt = phi_of_t(t, &prm, &cfg()).unwrap();
            assert!((pt.t - t).abs() < 1e-8 * t, "requested {t}, measured {}", pt.t);
            let pt2 = phi_of_t(pt.t, &prm, &cfg()).unwrap();
            assert!((pt2.phi - pt.phi).abs() < 1e-8 * pt.phi);
        }
    }

    #[test]
    fn continuity_across_the_seam() {
        let prm = Params::new(3, 2.0).unwrap();
        let c = fundamental_constants(&prm, &cfg()).unwrap();
        let below = phi_of_t(c.t_e * (1.0 - 1e-6), &prm, &cfg()).unwrap();
        let at = phi_of_t(c.t_e, &prm, &cfg()).unwrap();
        let above = phi_of_t(c.t_e * (1.0 + 1e-6), &prm, &cfg()).unwrap();
        assert_eq!(below.regime, ProfileFamily::Sobolev);
        assert_eq!(above.regime, ProfileFamily::Hyperbolic);
        assert!((below.phi - at.phi).abs() < 1e-5 * at.phi);
        assert!((above.phi - at.phi).abs() < 1e-5 * at.phi);
    }

    #[test]
    fn small_scan_certifies() {
        let prm = Params::new(3, 2.0).unwrap();
        let c = fundamental_constants(&prm, &cfg()).unwrap();
        let grid = default_shape_grid(&c, 24, 6.0);
        let scan = scan_curve(&grid, &prm, &cfg()).unwrap();
        assert!(scan.shape.all_pass(), "failures: {:?}", scan.shape.failures);
        assert!(scan.shape.tail_ratio_final_minus_one.abs() < 0.05);
    }

    #[test]
    fn single_point_grid_trivially_certifies() {
        let prm = Params::new(3, 2.0).unwrap();
        let c = fundamental_constants(&prm, &cfg()).unwrap();
        let scan = scan_curve(&[c.t_0], &prm, &cfg()).unwrap();
        assert!(scan.shape.all_pass());
    }
}
