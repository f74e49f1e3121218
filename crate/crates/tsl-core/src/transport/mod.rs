//! Exact small-instance optimal transport between discretized profile
//! densities: plans from the network simplex, cyclical-monotonicity
//! certificates, barycentric maps, the cone-exclusion statistics of the
//! two-bump argument, and the deficit Cauchy-Schwarz estimate.
//!
//! The probe plane is 2-D: points are `(x1, t)` with `x1 >= 0` the normal
//! coordinate and `t` the tangential one, so tangentially separated bumps
//! are representable without any symmetry assumption.

mod simplex;

use crate::binding::ConeSpec;
use crate::curve::PhiPoint;
use crate::field::Field;
use crate::num::Bracket;
use crate::{Error, Params, Result};
use serde::{Deserialize, Serialize};

pub use simplex::{solve_transport, TransportProblem, TransportSolution};

/// Desk-scale cap per side for the exact solver.
pub const ATOM_CAP: usize = 2000;

/// A discrete probability measure supported on the closed half-plane.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    /// `(x1, t)` coordinates, `x1 >= 0`.
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    /// Grid layout when the measure came from a cell discretization:
    /// `(nx, nt, hx, ht)` plus the cell index of each atom.
    pub grid: Option<GridInfo>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridInfo {
    pub nx: usize,
    pub nt: usize,
    pub hx: f64,
    pub ht: f64,
    pub cells: Vec<(usize, usize)>,
}

impl DiscreteMeasure {
    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::Invalid("measure has empty support".into()));
        }
        if self.points.len() != self.weights.len() {
            return Err(Error::Invalid("points/weights length mismatch".into()));
        }
        for (k, w) in self.weights.iter().enumerate() {
            if !(*w >= 0.0) {
                return Err(Error::Invalid(format!("negative weight at atom {k}")));
            }
        }
        for (k, pt) in self.points.iter().enumerate() {
            if pt[0] < -1e-12 {
                return Err(Error::Invalid(format!(
                    "atom {k} at x1 = {} outside the closed half-space",
                    pt[0]
                )));
            }
        }
        if (self.total_mass() - 1.0).abs() > 1e-12 {
            return Err(Error::Invalid(format!("total mass {} != 1", self.total_mass())));
        }
        Ok(())
    }
}

/// Rectangular grid specification for discretizing a density.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridSpec {
    pub x1_min: f64,
    pub x1_max: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub nx: usize,
    pub nt: usize,
}

/// Cell-centered atoms with 2x2 Gauss cell masses, renormalized to 1.
///
/// Returns the measure and the raw (pre-normalization) total mass, which
/// callers compare against the density's true integral.
pub fn discretize_density(
    density: &(impl Fn(f64, f64) -> f64 + ?Sized),
    grid: &GridSpec,
    keep_threshold: f64,
) -> Result<(DiscreteMeasure, f64)> {
    if grid.nx == 0 || grid.nt == 0 || !(grid.x1_min < grid.x1_max) || !(grid.t_min < grid.t_max) {
        return Err(Error::Invalid("bad grid spec".into()));
    }
    if grid.x1_min < 0.0 {
        return Err(Error::Invalid("grid must lie in the closed half-space".into()));
    }
    let hx = (grid.x1_max - grid.x1_min) / grid.nx as f64;
    let ht = (grid.t_max - grid.t_min) / grid.nt as f64;
    let g = 0.5 / 3.0f64.sqrt();
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut cells = Vec::new();
    let mut premass = 0.0;
    let mut max_w = 0.0f64;
    for i in 0..grid.nx {
        for j in 0..grid.nt {
            let cx = grid.x1_min + (i as f64 + 0.5) * hx;
            let ct = grid.t_min + (j as f64 + 0.5) * ht;
            let mut cell = 0.0;
            for &sx in &[-g, g] {
                for &st in &[-g, g] {
                    cell += density(cx + sx * hx, ct + st * ht);
                }
            }
            let w = cell * 0.25 * hx * ht;
            premass += w;
            if w > 0.0 {
                points.push([cx, ct]);
                weights.push(w);
                cells.push((i, j));
                max_w = max_w.max(w);
            }
        }
    }
    if points.is_empty() {
        return Err(Error::Invalid("density vanished on the whole grid".into()));
    }
    // drop negligible atoms, then renormalize
    let keep: Vec<usize> =
        (0..points.len()).filter(|&k| weights[k] > keep_threshold * max_w).collect();
    let points: Vec<[f64; 2]> = keep.iter().map(|&k| points[k]).collect();
    let cells: Vec<(usize, usize)> = keep.iter().map(|&k| cells[k]).collect();
    let mut weights: Vec<f64> = keep.iter().map(|&k| weights[k]).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let measure = DiscreteMeasure {
        points,
        weights,
        grid: Some(GridInfo { nx: grid.nx, nt: grid.nt, hx, ht, cells }),
    };
    Ok((measure, premass))
}

/// An exact coupling between two discrete measures.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransportPlan {
    /// (source index, target index, mass)
    pub entries: Vec<(usize, usize, f64)>,
    pub cost: f64,
}

/// Solve the exact optimal coupling for squared Euclidean cost.
pub fn solve_exact_plan(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<TransportPlan> {
    mu.validate()?;
    nu.validate()?;
    if mu.len() > ATOM_CAP || nu.len() > ATOM_CAP {
        return Err(Error::SizeCap { size: mu.len().max(nu.len()), cap: ATOM_CAP });
    }
    let m = mu.len();
    let n = nu.len();
    let mut cost = Vec::with_capacity(m * n);
    for a in &mu.points {
        for b in &nu.points {
            let dx = a[0] - b[0];
            let dt = a[1] - b[1];
            cost.push(dx * dx + dt * dt);
        }
    }
    let sol = solve_transport(&TransportProblem {
        n_sources: m,
        n_targets: n,
        cost,
        supply: mu.weights.clone(),
        demand: nu.weights.clone(),
    })?;
    Ok(TransportPlan { entries: sol.flows, cost: sol.cost })
}

/// Row/column marginals of a plan.
pub fn plan_marginals(plan: &TransportPlan, m: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut row = vec![0.0; m];
    let mut col = vec![0.0; n];
    for &(i, j, w) in &plan.entries {
        row[i] += w;
        col[j] += w;
    }
    (row, col)
}

/// Certificate for the two-point monotonicity inequality on the support.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonotonicityCertificate {
    pub min_two_cycle_value: f64,
    /// Entry-index pairs violating the inequality beyond the tolerance.
    pub violating_pairs: Vec<(usize, usize, f64)>,
    pub tol: f64,
}

impl MonotonicityCertificate {
    pub fn passes(&self) -> bool {
        self.violating_pairs.is_empty()
    }
}

/// Evaluate the two-point inequality
/// `(y_a - y_b) . (x_a - x_b) >= 0` over all support pairs of the plan.
pub fn check_cyclical_monotonicity(
    plan: &TransportPlan,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    tol: f64,
) -> MonotonicityCertificate {
    let mut min_v = f64::INFINITY;
    let mut violating = Vec::new();
    for (a, &(ia, ja, _)) in plan.entries.iter().enumerate() {
        let xa = mu.points[ia];
        let ya = nu.points[ja];
        for (b, &(ib, jb, _)) in plan.entries.iter().enumerate().skip(a + 1) {
            let xb = mu.points[ib];
            let yb = nu.points[jb];
            let v = (ya[0] - yb[0]) * (xa[0] - xb[0]) + (ya[1] - yb[1]) * (xa[1] - xb[1]);
            if v < min_v {
                min_v = v;
            }
            if v < -tol {
                violating.push((a, b, v));
            }
        }
    }
    MonotonicityCertificate { min_two_cycle_value: min_v, violating_pairs: violating, tol }
}

/// Spot-check longer cycles on the support:
/// `sum_i y_i . (x_{i+1} - x_i) <= tol` for sampled index cycles.
pub fn spot_check_cycles(
    plan: &TransportPlan,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cycle_len: usize,
    samples: usize,
    seed: u64,
    tol: f64,
) -> (f64, usize) {
    let mut state = seed | 1;
    let mut rng = move |k: usize| -> usize {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state % k as u64) as usize
    };
    let mut max_sum = f64::NEG_INFINITY;
    let mut violations = 0;
    for _ in 0..samples {
        let idx: Vec<usize> = (0..cycle_len).map(|_| rng(plan.entries.len())).collect();
        let mut sum = 0.0;
        for k in 0..cycle_len {
            let (_, j, _) = plan.entries[idx[k]];
            let (i_next, _, _) = plan.entries[idx[(k + 1) % cycle_len]];
            let (i_cur, _, _) = plan.entries[idx[k]];
            let y = nu.points[j];
            let xn = mu.points[i_next];
            let xc = mu.points[i_cur];
            sum += y[0] * (xn[0] - xc[0]) + y[1] * (xn[1] - xc[1]);
        }
        max_sum = max_sum.max(sum);
        if sum > tol {
            violations += 1;
        }
    }
    (max_sum, violations)
}

/// Barycentric projection: mass-weighted average target per source atom.
pub fn barycentric_map(plan: &TransportPlan, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Vec<[f64; 2]> {
    let mut acc = vec![[0.0f64; 3]; mu.len()];
    for &(i, j, w) in &plan.entries {
        acc[i][0] += w * nu.points[j][0];
        acc[i][1] += w * nu.points[j][1];
        acc[i][2] += w;
    }
    acc.iter()
        .enumerate()
        .map(|(i, a)| {
            if a[2] > 0.0 {
                [a[0] / a[2], a[1] / a[2]]
            } else {
                mu.points[i]
            }
        })
        .collect()
}

/// The right-hand side of the deficit Cauchy-Schwarz estimate, discretized
/// over the source atoms:
/// `sum_i mu_i u(x_i)^{p# - 1 - p*} |grad u| |T_i - s e1| |dir(-grad u) - dir(T_i - s e1)|^2`.
///
/// Atoms where the gradient or the shifted map vanish contribute zero (the
/// integrand carries both factors).
pub fn deficit_cs_rhs(
    u: &impl Field,
    s: f64,
    mu: &DiscreteMeasure,
    mapped: &[[f64; 2]],
    params: &Params,
) -> f64 {
    let expo = params.p_sharp() - 1.0 - params.p_star(); // = -n/(n-p)
    let mut total = 0.0;
    for (i, (&w, x)) in mu.weights.iter().zip(&mu.points).enumerate() {
        let (v, g1, gt) = u.eval(x[0], x[1]);
        let gnorm = (g1 * g1 + gt * gt).sqrt();
        if v <= 0.0 || gnorm == 0.0 {
            continue;
        }
        let d1 = mapped[i][0] - s;
        let dt = mapped[i][1];
        let dnorm = (d1 * d1 + dt * dt).sqrt();
        if dnorm == 0.0 {
            continue;
        }
        // |(-grad u)/|grad u| - d/|d||^2
        let a1 = -g1 / gnorm - d1 / dnorm;
        let at = -gt / gnorm - dt / dnorm;
        let dir_sq = a1 * a1 + at * at;
        total += w * v.powf(expo) * gnorm * dnorm * dir_sq;
    }
    total
}

/// The reconstructed constant `C = 2 Y_T / (p Phi^{p-1})` multiplying the
/// deficit in the estimate.
pub fn deficit_cs_constant(point: &PhiPoint, params: &Params) -> f64 {
    2.0 * point.y_t / (params.p() * point.phi.powf(params.p() - 1.0))
}

/// Cone-exclusion statistics of a split-source plan.
///
/// Sources on the first bump's side (`t > 0`) mapped across `{y_t < 0}`
/// make up `E`; sources on the second side mapped to `{y_t >= 0}` make up
/// `F`; the starred sets additionally avoid the flat cone. `b_bar` is the
/// target mass inside the cone.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConeStats {
    pub mu_e: f64,
    pub mu_f: f64,
    pub mu_e_star: f64,
    pub mu_f_star: f64,
    pub b_bar: f64,
}

pub fn cone_exclusion_stats(
    plan: &TransportPlan,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cone: &ConeSpec,
) -> ConeStats {
    let in_cone = |y: [f64; 2]| y[1].abs() < cone.slope * y[0].abs();
    let mut stats = ConeStats { mu_e: 0.0, mu_f: 0.0, mu_e_star: 0.0, mu_f_star: 0.0, b_bar: 0.0 };
    for &(i, j, w) in &plan.entries {
        let x = mu.points[i];
        let y = nu.points[j];
        if x[1] > 0.0 && y[1] < 0.0 {
            stats.mu_e += w;
            if !in_cone(y) {
                stats.mu_e_star += w;
            }
        }
        if x[1] < 0.0 && y[1] >= 0.0 {
            stats.mu_f += w;
            if !in_cone(y) {
                stats.mu_f_star += w;
            }
        }
    }
    for (j, &w) in nu.weights.iter().enumerate() {
        if in_cone(nu.points[j]) {
            stats.b_bar += w;
        }
    }
    stats
}

/// Target mass inside the ball `B(s e1, eps)` (the excision of the
/// near-center region used before alignment statistics).
pub fn target_mass_near_center(nu: &DiscreteMeasure, s: f64, eps: f64) -> f64 {
    let mut mass = 0.0;
    for (y, &w) in nu.points.iter().zip(&nu.weights) {
        let d1 = y[0] - s;
        if d1 * d1 + y[1] * y[1] < eps * eps {
            mass += w;
        }
    }
    mass
}

/// Logged diagnostic: on map-like plans over regular grids, the local
/// density ratio `F/G(T(x))` should approximate the Jacobian determinant of
/// the barycentric map within a loose factor. Returns the fraction of
/// comparable interior atoms whose ratio lies within `[1/factor, factor]`.
pub fn monge_ampere_diagnostic(
    mu: &DiscreteMeasure,
    mapped: &[[f64; 2]],
    source_density: &dyn Fn(f64, f64) -> f64,
    target_density: &dyn Fn(f64, f64) -> f64,
    factor: f64,
) -> Option<f64> {
    let grid = mu.grid.as_ref()?;
    // cell -> atom lookup
    let mut lookup = vec![usize::MAX; grid.nx * grid.nt];
    for (k, &(i, j)) in grid.cells.iter().enumerate() {
        lookup[i * grid.nt + j] = k;
    }
    let at = |i: usize, j: usize| -> Option<usize> {
        let k = lookup[i * grid.nt + j];
        (k != usize::MAX).then_some(k)
    };
    let mut total = 0usize;
    let mut good = 0usize;
    for (k, &(i, j)) in grid.cells.iter().enumerate() {
        if i == 0 || j == 0 || i + 1 >= grid.nx || j + 1 >= grid.nt {
            continue;
        }
        let (Some(xp), Some(xm), Some(tp), Some(tm)) =
            (at(i + 1, j), at(i - 1, j), at(i, j + 1), at(i, j - 1))
        else {
            continue;
        };
        // centered differences of the map on the grid
        let d11 = (mapped[xp][0] - mapped[xm][0]) / (2.0 * grid.hx);
        let d1t = (mapped[tp][0] - mapped[tm][0]) / (2.0 * grid.ht);
        let dt1 = (mapped[xp][1] - mapped[xm][1]) / (2.0 * grid.hx);
        let dtt = (mapped[tp][1] - mapped[tm][1]) / (2.0 * grid.ht);
        let det = d11 * dtt - d1t * dt1;
        let x = mu.points[k];
        let f = source_density(x[0], x[1]);
        let g = target_density(mapped[k][0], mapped[k][1]);
        if det <= 0.0 || f <= 0.0 || g <= 1e-300 {
            continue;
        }
        let ratio = (f / g) / det;
        total += 1;
        if ratio > 1.0 / factor && ratio < factor {
            good += 1;
        }
    }
    (total > 0).then(|| good as f64 / total as f64)
}

/// Brute-force assignment oracle for equal-weight instances (test support):
/// minimal cost over all assignments, by permutation enumeration.
pub fn brute_force_assignment_cost(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    let k = mu.len();
    if k != nu.len() || k > 9 {
        return Err(Error::Invalid("brute force needs equal small sides".into()));
    }
    let w = 1.0 / k as f64;
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = f64::INFINITY;
    fn rec(perm: &mut Vec<usize>, k: usize, mu: &DiscreteMeasure, nu: &DiscreteMeasure, w: f64, best: &mut f64) {
        if k == perm.len() {
            let mut c = 0.0;
            for (i, &j) in perm.iter().enumerate() {
                let dx = mu.points[i][0] - nu.points[j][0];
                let dt = mu.points[i][1] - nu.points[j][1];
                c += w * (dx * dx + dt * dt);
            }
            if c < *best {
                *best = c;
            }
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            rec(perm, k + 1, mu, nu, w, best);
            perm.swap(k, i);
        }
    }
    rec(&mut perm, 0, mu, nu, w, &mut best);
    Ok(best)
}

/// Equal-weight measure on explicit points (test/fixture support).
pub fn uniform_measure(points: Vec<[f64; 2]>) -> DiscreteMeasure {
    let w = 1.0 / points.len() as f64;
    let weights = vec![w; points.len()];
    DiscreteMeasure { points, weights, grid: None }
}

/// A deliberately de-optimized copy of a plan: swap the targets of two
/// entries (test support for the monotonicity certificate).
pub fn swap_plan_entries(plan: &TransportPlan, a: usize, b: usize) -> TransportPlan {
    let mut entries = plan.entries.clone();
    let (ia, ja, wa) = entries[a];
    let (ib, jb, wb) = entries[b];
    let w = wa.min(wb);
    entries[a] = (ia, jb, w);
    entries[b] = (ib, ja, w);
    if wa > w {
        entries.push((ia, ja, wa - w));
    }
    if wb > w {
        entries.push((ib, jb, wb - w));
    }
    TransportPlan { entries, cost: f64::NAN }
}

/// Dilation bracket used by callers fitting radial maps (kept here so the
/// transport demos share one definition).
pub fn default_dilation_bracket() -> Bracket {
    Bracket { lo: 0.25, hi: 4.0 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_square_discretization() {
        let (m, pre) = discretize_density(
            &|_, _| 1.0,
            &GridSpec { x1_min: 0.0, x1_max: 1.0, t_min: 0.0, t_max: 1.0, nx: 2, nt: 2 },
            0.0,
        )
        .unwrap();
        assert_eq!(m.len(), 4);
        for &w in &m.weights {
            assert!((w - 0.25).abs() < 1e-15);
        }
        assert!((pre - 1.0).abs() < 1e-14);
        m.validate().unwrap();
    }

    #[test]
    fn identity_plan_is_diagonal_and_monotone() {
        let pts = vec![[0.1, -0.4], [0.5, 0.2], [1.2, 0.9], [0.3, 0.0]];
        let mu = uniform_measure(pts.clone());
        let nu = uniform_measure(pts);
        let plan = solve_exact_plan(&mu, &nu).unwrap();
        assert!(plan.cost.abs() < 1e-14);
        let cert = check_cyclical_monotonicity(&plan, &mu, &nu, 1e-12);
        assert!(cert.passes());
        assert!(cert.min_two_cycle_value >= 0.0);
        // barycentric map is the identity
        let map = barycentric_map(&plan, &mu, &nu);
        for (x, y) in mu.points.iter().zip(&map) {
            assert!((x[0] - y[0]).abs() < 1e-14 && (x[1] - y[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn split_source_goes_to_the_midpoint() {
        let mu = uniform_measure(vec![[0.5, 0.0]]);
        let nu = uniform_measure(vec![[0.5, 1.0], [0.5, -1.0]]);
        let plan = solve_exact_plan(&mu, &nu).unwrap();
        let map = barycentric_map(&plan, &mu, &nu);
        assert!((map[0][0] - 0.5).abs() < 1e-14);
        assert!(map[0][1].abs() < 1e-14);
    }

    #[test]
    fn forced_swap_breaks_monotonicity() {
        let mu = uniform_measure(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.3]]);
        let nu = uniform_measure(vec![[0.2, 0.1], [0.1, 1.1], [1.1, 0.2]]);
        let plan = solve_exact_plan(&mu, &nu).unwrap();
        let cert = check_cyclical_monotonicity(&plan, &mu, &nu, 1e-12);
        assert!(cert.passes(), "optimal plan should be monotone: {cert:?}");
        let bad = swap_plan_entries(&plan, 0, 1);
        let cert2 = check_cyclical_monotonicity(&bad, &mu, &nu, 1e-12);
        assert!(!cert2.passes(), "swapped plan should violate monotonicity");
        assert!(!cert2.violating_pairs.is_empty());
    }

    #[test]
    fn cone_stats_on_a_forced_crossing() {
        // all targets strictly on t > 0; the t < 0 source bump must cross
        let mu = uniform_measure(vec![[1.0, 2.0], [1.0, -2.0]]);
        let nu = uniform_measure(vec![[1.0, 1.5], [1.0, 2.5]]);
        let plan = solve_exact_plan(&mu, &nu).unwrap();
        let cone = ConeSpec::new(0.05).unwrap();
        let stats = cone_exclusion_stats(&plan, &mu, &nu, &cone);
        assert!((stats.mu_f - 0.5).abs() < 1e-12, "{stats:?}");
        assert_eq!(stats.mu_e, 0.0);
        assert!(stats.b_bar < 1e-12);
    }

    #[test]
    fn eight_atom_instances_match_brute_force() {
        let mut state = 0x853c49e6748fea9bu64;
        let mut rng = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..10 {
            let src: Vec<[f64; 2]> = (0..8).map(|_| [rng(), 2.0 * rng() - 1.0]).collect();
            let tgt: Vec<[f64; 2]> = (0..8).map(|_| [rng(), 2.0 * rng() - 1.0]).collect();
            let mu = uniform_measure(src);
            let nu = uniform_measure(tgt);
            let plan = solve_exact_plan(&mu, &nu).unwrap();
            let brute = brute_force_assignment_cost(&mu, &nu).unwrap();
            assert!((plan.cost - brute).abs() < 1e-12 * brute.max(1e-12));
        }
    }

    #[test]
    fn size_cap_is_enforced() {
        let pts: Vec<[f64; 2]> = (0..ATOM_CAP + 1).map(|k| [k as f64, 0.0]).collect();
        let mu = uniform_measure(pts);
        let nu = uniform_measure(vec![[0.0, 0.0]]);
        match solve_exact_plan(&mu, &nu) {
            Err(Error::SizeCap { .. }) => {}
            other => panic!("expected size cap, got {other:?}"),
        }
    }
}
