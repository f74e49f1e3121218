//! Exact network simplex for the dense balanced transportation problem.
//!
//! Primal simplex on the spanning-tree basis, block pricing with a fixed
//! deterministic arc order, and the classic strongly-feasible leaving-arc
//! tie-break (first blocking arc scanning the entering arc's source side
//! first). Tree bookkeeping is rebuilt from the root after each pivot; at
//! desk scale the O(nodes) rebuild is irrelevant next to pricing.

use crate::{Error, Result};

/// Tolerance scale for pricing: an arc enters only if its reduced cost is
/// below `-eps * scale`, which keeps f64 rounding from spinning the pivot.
const PRICE_EPS: f64 = 1e-14;

pub struct TransportProblem {
    pub n_sources: usize,
    pub n_targets: usize,
    /// Row-major cost: `cost[i * n_targets + j]`.
    pub cost: Vec<f64>,
    pub supply: Vec<f64>,
    pub demand: Vec<f64>,
}

pub struct TransportSolution {
    /// (source, target, mass) for every basic arc with positive flow.
    pub flows: Vec<(usize, usize, f64)>,
    pub cost: f64,
    pub pivots: usize,
}

struct Tree {
    parent: Vec<Option<usize>>,
    pred_arc: Vec<usize>,
    /// +1 when the predecessor arc is oriented child -> parent.
    pred_dir: Vec<i8>,
    depth: Vec<u32>,
    pi: Vec<f64>,
}

pub fn solve_transport(p: &TransportProblem) -> Result<TransportSolution> {
    let m = p.n_sources;
    let n = p.n_targets;
    if m == 0 || n == 0 {
        return Err(Error::Invalid("empty transport instance".into()));
    }
    let n_nodes = m + n;
    let root = n_nodes;
    let n_real = m * n;
    let n_arcs = n_real + n_nodes;

    // node supplies: sources positive, targets negative, exactly balanced
    let sum_a: f64 = p.supply.iter().sum();
    let sum_b: f64 = p.demand.iter().sum();
    if (sum_a - sum_b).abs() > 1e-9 * sum_a.max(sum_b) {
        return Err(Error::Invalid(format!(
            "unbalanced instance: total supply {sum_a:e} vs demand {sum_b:e}"
        )));
    }
    let rescale = sum_a / sum_b;
    let mut supply = Vec::with_capacity(n_nodes);
    supply.extend(p.supply.iter().copied());
    supply.extend(p.demand.iter().map(|&b| -b * rescale));
    // absorb the rounding remainder into the largest target
    let resid: f64 = supply.iter().sum();
    if let Some(jmax) = (m..n_nodes).max_by(|&a, &b| supply[a].abs().partial_cmp(&supply[b].abs()).unwrap())
    {
        supply[jmax] -= resid;
    }

    // arcs: real ones first (i -> m + j), then one artificial arc per node
    let arc_src = |e: usize| -> usize {
        if e < n_real {
            e / n
        } else {
            let u = e - n_real;
            if supply[u] >= 0.0 {
                u
            } else {
                root
            }
        }
    };
    let arc_tgt = |e: usize| -> usize {
        if e < n_real {
            m + (e % n)
        } else {
            let u = e - n_real;
            if supply[u] >= 0.0 {
                root
            } else {
                u
            }
        }
    };
    let max_cost = p.cost.iter().cloned().fold(0.0f64, f64::max);
    let art_cost = (max_cost + 1.0) * (n_nodes + 1) as f64;
    let arc_cost = |e: usize| -> f64 {
        if e < n_real {
            p.cost[e]
        } else if supply[e - n_real] >= 0.0 {
            0.0
        } else {
            art_cost
        }
    };

    let mut flow = vec![0.0f64; n_arcs];
    let mut in_tree = vec![false; n_arcs];
    for u in 0..n_nodes {
        let e = n_real + u;
        in_tree[e] = true;
        flow[e] = supply[u].abs();
    }

    let mut tree = rebuild_tree(m, n, root, &in_tree, &arc_src, &arc_tgt, &arc_cost)?;

    let block = ((n_arcs as f64).sqrt() as usize).max(16);
    let mut next_arc = 0usize;
    let mut pivots = 0usize;
    let max_pivots = 200 * (n_nodes + 2) * 32;

    loop {
        // block pricing over real arcs: accept the best arc of a block if
        // its reduced cost is negative beyond rounding noise
        let certified = |arc: usize, rc: f64, pi: &[f64]| -> bool {
            let scale = p.cost[arc]
                .abs()
                .max(pi[arc / n].abs())
                .max(pi[m + arc % n].abs())
                .max(1.0);
            rc < -PRICE_EPS * scale
        };
        let mut best = 0.0f64;
        let mut in_arc = usize::MAX;
        let mut count = block;
        let mut scanned = 0usize;
        let mut e = next_arc;
        let mut entering = usize::MAX;
        while scanned < n_real {
            if !in_tree[e] {
                let i = e / n;
                let j = m + (e % n);
                let rc = p.cost[e] + tree.pi[i] - tree.pi[j];
                if rc < best {
                    best = rc;
                    in_arc = e;
                }
            }
            scanned += 1;
            e += 1;
            if e == n_real {
                e = 0;
            }
            count -= 1;
            if count == 0 {
                if in_arc != usize::MAX && certified(in_arc, best, &tree.pi) {
                    entering = in_arc;
                    break;
                }
                best = 0.0;
                in_arc = usize::MAX;
                count = block;
            }
        }
        if entering == usize::MAX {
            // trailing partial block
            if in_arc != usize::MAX && certified(in_arc, best, &tree.pi) {
                entering = in_arc;
            } else {
                break; // optimal
            }
        }
        let in_arc = entering;
        next_arc = (in_arc + 1) % n_real;

        // the entering arc closes a cycle through the tree
        let first = in_arc / n;
        let second = m + in_arc % n;
        let join = find_join(&tree, first, second);

        // leaving arc: minimum flow against the cycle orientation,
        // scanning the source side first (ties keep the first minimum)
        let mut delta = f64::INFINITY;
        let mut u_out = usize::MAX;
        let mut from_first_side = true;
        let mut u = first;
        while u != join {
            let e = tree.pred_arc[u];
            if tree.pred_dir[u] == 1 && flow[e] < delta {
                delta = flow[e];
                u_out = u;
                from_first_side = true;
            }
            u = tree.parent[u].unwrap();
        }
        let mut u = second;
        while u != join {
            let e = tree.pred_arc[u];
            if tree.pred_dir[u] == -1 && flow[e] < delta {
                delta = flow[e];
                u_out = u;
                from_first_side = false;
            }
            u = tree.parent[u].unwrap();
        }
        if u_out == usize::MAX {
            return Err(Error::NonConvergence("unbounded pivot cycle in the transport solve".into()));
        }

        // push delta around the cycle
        if delta > 0.0 {
            flow[in_arc] += delta;
            let mut u = first;
            while u != join {
                let e = tree.pred_arc[u];
                flow[e] -= delta * tree.pred_dir[u] as f64;
                u = tree.parent[u].unwrap();
            }
            let mut u = second;
            while u != join {
                let e = tree.pred_arc[u];
                flow[e] += delta * tree.pred_dir[u] as f64;
                u = tree.parent[u].unwrap();
            }
        }

        let _ = from_first_side;
        let leaving = tree.pred_arc[u_out];
        in_tree[leaving] = false;
        flow[leaving] = 0.0;
        in_tree[in_arc] = true;
        tree = rebuild_tree(m, n, root, &in_tree, &arc_src, &arc_tgt, &arc_cost)?;

        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::NonConvergence(format!(
                "transport solve exceeded {max_pivots} pivots"
            )));
        }
    }

    // feasibility: artificial arcs must carry no flow
    for u in 0..n_nodes {
        if flow[n_real + u] > 1e-9 {
            return Err(Error::NonConvergence(format!(
                "artificial flow {:.3e} remains on node {u}",
                flow[n_real + u]
            )));
        }
    }

    let mut flows = Vec::new();
    let mut total = 0.0;
    for e in 0..n_real {
        if flow[e] > 1e-300 {
            flows.push((e / n, e % n, flow[e]));
            total += flow[e] * p.cost[e];
        }
    }
    Ok(TransportSolution { flows, cost: total, pivots })
}

fn find_join(tree: &Tree, mut u: usize, mut v: usize) -> usize {
    while u != v {
        if tree.depth[u] > tree.depth[v] {
            u = tree.parent[u].unwrap();
        } else {
            v = tree.parent[v].unwrap();
        }
    }
    u
}

fn rebuild_tree(
    m: usize,
    n: usize,
    root: usize,
    in_tree: &[bool],
    arc_src: &impl Fn(usize) -> usize,
    arc_tgt: &impl Fn(usize) -> usize,
    arc_cost: &impl Fn(usize) -> f64,
) -> Result<Tree> {
    let n_nodes = m + n + 1;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n_nodes];
    for (e, &t) in in_tree.iter().enumerate() {
        if t {
            adj[arc_src(e)].push(e);
            adj[arc_tgt(e)].push(e);
        }
    }
    let mut tree = Tree {
        parent: vec![None; n_nodes],
        pred_arc: vec![usize::MAX; n_nodes],
        pred_dir: vec![0; n_nodes],
        depth: vec![0; n_nodes],
        pi: vec![0.0; n_nodes],
    };
    let mut visited = vec![false; n_nodes];
    let mut queue = std::collections::VecDeque::new();
    visited[root] = true;
    queue.push_back(root);
    let mut seen = 1usize;
    while let Some(u) = queue.pop_front() {
        for &e in &adj[u] {
            let (s, t) = (arc_src(e), arc_tgt(e));
            let v = if s == u { t } else { s };
            if visited[v] {
                continue;
            }
            visited[v] = true;
            seen += 1;
            tree.parent[v] = Some(u);
            tree.pred_arc[v] = e;
            tree.depth[v] = tree.depth[u] + 1;
            if s == v {
                // arc v -> u: reduced cost 0 gives pi[v] = pi[u] - cost
                tree.pred_dir[v] = 1;
                tree.pi[v] = tree.pi[u] - arc_cost(e);
            } else {
                tree.pred_dir[v] = -1;
                tree.pi[v] = tree.pi[u] + arc_cost(e);
            }
            queue.push_back(v);
        }
    }
    if seen != n_nodes {
        return Err(Error::NonConvergence("basis lost spanning-tree structure".into()));
    }
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
        let dx = a[0] - b[0];
        let dy = a[1] - b[1];
        dx * dx + dy * dy
    }

    fn instance(src: &[[f64; 2]], tgt: &[[f64; 2]]) -> TransportProblem {
        let m = src.len();
        let n = tgt.len();
        let mut cost = Vec::with_capacity(m * n);
        for a in src {
            for b in tgt {
                cost.push(dist2(*a, *b));
            }
        }
        TransportProblem {
            n_sources: m,
            n_targets: n,
            cost,
            supply: vec![1.0 / m as f64; m],
            demand: vec![1.0 / n as f64; n],
        }
    }

    #[test]
    fn identity_instance_costs_nothing() {
        let pts = [[0.2, 0.1], [1.0, -0.4], [0.5, 2.0]];
        let p = instance(&pts, &pts);
        let sol = solve_transport(&p).unwrap();
        assert!(sol.cost.abs() < 1e-15);
    }

    #[test]
    fn forced_swap_pair() {
        // two atoms each side placed so the crossing matching wins
        let src = [[0.0, 0.0], [0.0, 1.0]];
        let tgt = [[1.0, 1.0], [1.0, 0.0]];
        let p = instance(&src, &tgt);
        let sol = solve_transport(&p).unwrap();
        // direct: (0->0) + (1->1) costs (1+1)/2 + (1+1)/2 = 2; swap costs 1
        assert!((sol.cost - 1.0).abs() < 1e-14, "cost {}", sol.cost);
    }

    #[test]
    fn matches_brute_force_on_small_assignments() {
        // deterministic pseudo-random instances, 6 atoms a side
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rng = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _case in 0..20 {
            let src: Vec<[f64; 2]> = (0..6).map(|_| [rng(), 2.0 * rng() - 1.0]).collect();
            let tgt: Vec<[f64; 2]> = (0..6).map(|_| [rng(), 2.0 * rng() - 1.0]).collect();
            let p = instance(&src, &tgt);
            let sol = solve_transport(&p).unwrap();

            // brute force over all 6! assignments
            let mut perm = [0usize, 1, 2, 3, 4, 5];
            let mut best = f64::INFINITY;
            permute(&mut perm, 0, &mut |q| {
                let c: f64 =
                    q.iter().enumerate().map(|(i, &j)| dist2(src[i], tgt[j]) / 6.0).sum();
                if c < best {
                    best = c;
                }
            });
            assert!(
                (sol.cost - best).abs() < 1e-12 * best.max(1e-9),
                "simplex {} vs brute {}",
                sol.cost,
                best
            );
        }
    }

    fn permute(arr: &mut [usize; 6], k: usize, f: &mut impl FnMut(&[usize; 6])) {
        if k == arr.len() {
            f(arr);
            return;
        }
        for i in k..arr.len() {
            arr.swap(k, i);
            permute(arr, k + 1, f);
            arr.swap(k, i);
        }
    }

    #[test]
    fn unequal_weights_conserve_marginals() {
        let src = [[0.1, 0.0], [0.4, 0.5], [0.9, -0.3]];
        let tgt = [[0.0, 0.2], [1.0, 0.8]];
        let m = src.len();
        let n = tgt.len();
        let mut cost = Vec::new();
        for a in &src {
            for b in &tgt {
                cost.push(dist2(*a, *b));
            }
        }
        let p = TransportProblem {
            n_sources: m,
            n_targets: n,
            cost,
            supply: vec![0.5, 0.3, 0.2],
            demand: vec![0.6, 0.4],
        };
        let sol = solve_transport(&p).unwrap();
        let mut row = vec![0.0; m];
        let mut col = vec![0.0; n];
        for &(i, j, w) in &sol.flows {
            row[i] += w;
            col[j] += w;
        }
        for i in 0..m {
            assert!((row[i] - p.supply[i]).abs() < 1e-12);
        }
        for j in 0..n {
            assert!((col[j] - p.demand[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_output() {
        let src = [[0.0, 0.0], [0.3, 0.8], [0.7, -0.2], [0.2, 0.4]];
        let tgt = [[0.5, 0.5], [0.1, -0.6], [0.9, 0.1], [0.4, 0.9]];
        let p1 = instance(&src, &tgt);
        let p2 = instance(&src, &tgt);
        let a = solve_transport(&p1).unwrap();
        let b = solve_transport(&p2).unwrap();
        assert_eq!(a.cost.to_bits(), b.cost.to_bits());
        assert_eq!(a.flows, b.flows);
    }
}
