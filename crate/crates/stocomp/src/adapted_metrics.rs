//! Edge-length constructions, path metrics, adaptedness, and the intrinsic
//! metric of the variable-speed walk.
//!
//! Normalization: `a(e)` is always a *length*. The induced path metric sums
//! `a(e)` along paths, the adaptedness sum uses `a(e)^2`, and synchronized
//! metric graphs use density `omega(e) = a(e)^2`. This single convention
//! reproduces all downstream identities consistently.

use crate::graph_core::{vertex_measure, WeightedGraph};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Provenance of an edge-length function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthKind {
    DE,
    DV,
    DW,
    InducedFromMetric,
    Custom,
}

/// Per-edge nonnegative lengths `a(e)`, aligned with the graph's edge ids.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeLengths {
    pub kind: LengthKind,
    pub values: Vec<f64>,
}

impl EdgeLengths {
    pub fn custom(values: Vec<f64>) -> Self {
        EdgeLengths { kind: LengthKind::Custom, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// The standard length functions of the paper:
/// `d_E`: `a(e) = pi(e)^{-1/2}`;
/// `d_V`: `a(e) = pi_u^{-1/2} /\ pi_v^{-1/2}` (the smaller reciprocal root,
/// i.e. the *larger* vertex measure wins);
/// `d_W`: `a(e) = min(1, d_V length)`.
pub fn standard_lengths(g: &WeightedGraph, kind: LengthKind) -> Result<EdgeLengths> {
    let values = match kind {
        LengthKind::DE => g.edges().iter().map(|e| e.weight.powf(-0.5)).collect(),
        LengthKind::DV | LengthKind::DW => {
            let measures: Vec<f64> =
                (0..g.vertex_count()).map(|x| vertex_measure(g, x).unwrap_or(0.0)).collect();
            g.edges()
                .iter()
                .map(|e| {
                    let a = measures[e.u].max(measures[e.v]).powf(-0.5);
                    if kind == LengthKind::DW {
                        a.min(1.0)
                    } else {
                        a
                    }
                })
                .collect()
        }
        LengthKind::InducedFromMetric | LengthKind::Custom => {
            return Err(Error::InvalidParameter(
                "standard_lengths only builds dE/dV/dW".into(),
            ))
        }
    };
    Ok(EdgeLengths { kind, values })
}

/// Edge lengths induced by a metric: `a(e) = rho(u, v)`.
pub fn induced_from_metric(
    g: &WeightedGraph,
    rho: impl Fn(usize, usize) -> f64,
) -> EdgeLengths {
    let values = g.edges().iter().map(|e| rho(e.u, e.v)).collect();
    EdgeLengths { kind: LengthKind::InducedFromMetric, values }
}

/// Single-source shortest-path distances under an edge-length function,
/// with per-vertex flags marking paths that touch the truncation frontier.
#[derive(Debug, Clone)]
pub struct DistanceMap {
    pub source: usize,
    pub dist: Vec<f64>,
    pub parent: Vec<Option<usize>>,
    pub contaminated: Vec<bool>,
}

impl DistanceMap {
    pub fn distance(&self, x: usize) -> f64 {
        self.dist[x]
    }

    /// CSV export: `vertex,distance,frontier_contaminated`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("vertex,distance,frontier_contaminated\n");
        for (x, (&d, &c)) in self.dist.iter().zip(&self.contaminated).enumerate() {
            out.push_str(&format!("{x},{d:.16e},{c}\n"));
        }
        out
    }
}

#[derive(PartialEq)]
struct HeapKey(f64, usize);

impl Eq for HeapKey {}

impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Distances are never NaN; ties broken by smaller vertex id.
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Dijkstra under lengths `a`. Ties are broken by smaller vertex id for a
/// reproducible parent tree. A vertex is contaminated when its shortest path
/// passes through or ends on the truncation frontier.
pub fn path_metric(g: &WeightedGraph, a: &EdgeLengths, source: usize) -> Result<DistanceMap> {
    let n = g.vertex_count();
    if source >= n {
        return Err(Error::UnknownVertex(source));
    }
    if a.len() != g.edge_count() {
        return Err(Error::InvalidParameter("edge lengths misaligned with graph".into()));
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut parent = vec![None; n];
    let mut contaminated = vec![false; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    contaminated[source] = g.is_frontier(source);
    heap.push(Reverse(HeapKey(0.0, source)));
    while let Some(Reverse(HeapKey(d, x))) = heap.pop() {
        if settled[x] {
            continue;
        }
        settled[x] = true;
        for &(y, e) in g.adjacency(x) {
            if settled[y] {
                continue;
            }
            let nd = d + a.values[e];
            let better = nd < dist[y]
                || (nd == dist[y] && parent[y].map_or(false, |p| x < p));
            if better {
                dist[y] = nd;
                parent[y] = Some(x);
                contaminated[y] = contaminated[x] || g.is_frontier(y);
                heap.push(Reverse(HeapKey(nd, y)));
            }
        }
    }
    Ok(DistanceMap { source, dist, parent, contaminated })
}

/// Default threshold below which `c_inf` no longer counts as bounded away
/// from zero.
pub const DEFAULT_STRONG_EPS: f64 = 0.01;

/// Sup/inf of the adaptedness sums `sum_{e in E(x)} pi(e) a(e)^2` over
/// non-frontier vertices.
#[derive(Debug, Clone, Serialize)]
pub struct AdaptednessReport {
    pub c_sup: f64,
    pub c_inf: f64,
    pub argmax: Option<usize>,
    pub argmin: Option<usize>,
    pub adapted: bool,
    pub strongly_adapted: bool,
}

pub fn adaptedness(g: &WeightedGraph, a: &EdgeLengths) -> AdaptednessReport {
    adaptedness_with(g, a, DEFAULT_STRONG_EPS)
}

/// As [`adaptedness`], with an explicit strong-adaptedness threshold `eps`.
/// Frontier vertices are skipped: their edge sets are incomplete.
pub fn adaptedness_with(g: &WeightedGraph, a: &EdgeLengths, eps: f64) -> AdaptednessReport {
    let mut c_sup = 0.0f64;
    let mut c_inf = f64::INFINITY;
    let mut argmax = None;
    let mut argmin = None;
    for x in 0..g.vertex_count() {
        if g.is_frontier(x) {
            continue;
        }
        let s: f64 = g
            .adjacency(x)
            .iter()
            .map(|&(_, e)| g.edges()[e].weight * a.values[e] * a.values[e])
            .sum();
        if s > c_sup || argmax.is_none() {
            c_sup = s;
            argmax = Some(x);
        }
        if s < c_inf {
            c_inf = s;
            argmin = Some(x);
        }
    }
    if argmin.is_none() {
        c_inf = 0.0;
    }
    AdaptednessReport {
        c_sup,
        c_inf,
        argmax,
        argmin,
        adapted: c_sup.is_finite(),
        strongly_adapted: c_sup.is_finite() && c_inf >= eps,
    }
}

/// Result of the intrinsic-metric solver: a certified lower bound for
/// `d_I(s,t)` with the feasible witness function realizing it.
#[derive(Debug, Clone)]
pub struct IntrinsicValue {
    pub value: f64,
    /// Feasible witness: every vertex constraint `<= 1 + tol`.
    pub witness: Vec<f64>,
    pub iterations: usize,
    /// Graph distance from `s` to the nearest frontier vertex, if any; the
    /// truncated value may exceed the infinite-graph `d_I` beyond this radius.
    pub truncation_radius: Option<usize>,
}

/// Vertex energy `q_x(f) = 1/2 sum_y pi_xy (f(y) - f(x))^2`.
fn vertex_energy(g: &WeightedGraph, f: &[f64], x: usize) -> f64 {
    0.5 * g
        .adjacency(x)
        .iter()
        .map(|&(y, e)| {
            let d = f[y] - f[x];
            g.edges()[e].weight * d * d
        })
        .sum::<f64>()
}

/// Exact Euclidean projection onto `{f : q_x(f) <= 1}`, which touches only
/// the star of `x`. Solved in closed form over the Lagrange multiplier:
/// `f_i = (g_i + lam*pi_i*f_x) / (1 + lam*pi_i)` with `f_x` eliminated, then
/// a monotone 1D root-find on `lam` with `|q - 1| <= 1e-12`.
fn project_star(g: &WeightedGraph, f: &mut [f64], x: usize) {
    if vertex_energy(g, f, x) <= 1.0 {
        return;
    }
    let star: Vec<(usize, f64)> =
        g.adjacency(x).iter().map(|&(y, e)| (y, g.edges()[e].weight)).collect();
    let gx = f[x];
    let gy: Vec<f64> = star.iter().map(|&(y, _)| f[y]).collect();

    // f_x as a function of lam, and the residual energy q(lam) (decreasing).
    let eval = |lam: f64| -> (f64, f64) {
        let mut denom = 1.0;
        let mut num = gx;
        for (&(_, pi), &gi) in star.iter().zip(&gy) {
            let t = lam * pi / (1.0 + lam * pi);
            denom += t;
            num += t * gi;
        }
        let fx = num / denom;
        let mut q = 0.0;
        for (&(_, pi), &gi) in star.iter().zip(&gy) {
            let d = (gi - fx) / (1.0 + lam * pi);
            q += pi * d * d;
        }
        (fx, 0.5 * q)
    };

    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while eval(hi).1 > 1.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e18 {
            break;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let (_, q) = eval(mid);
        if q > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (q - 1.0).abs() <= 1e-12 || hi - lo <= 1e-16 * hi.max(1.0) {
            break;
        }
    }
    // Take the feasible end of the bracket so the result never overshoots.
    let lam = hi;
    let (fx, _) = eval(lam);
    f[x] = fx;
    for (&(y, pi), &gi) in star.iter().zip(&gy) {
        f[y] = (gi + lam * pi * fx) / (1.0 + lam * pi);
    }
}

/// Dykstra's alternating projections onto the intersection of all vertex
/// constraints. Returns when the maximum constraint value is `<= 1 + ftol`.
fn dykstra_project(g: &WeightedGraph, f: &mut Vec<f64>, ftol: f64, max_cycles: usize) {
    let n = g.vertex_count();
    // Per-constraint corrections, stored sparsely on each star (center last).
    let mut corrections: Vec<Vec<f64>> =
        (0..n).map(|x| vec![0.0; g.adjacency(x).len() + 1]).collect();
    for _ in 0..max_cycles {
        let mut max_q: f64 = 0.0;
        for x in 0..n {
            // Only constraints that are violated or carry a pending Dykstra
            // correction need a visit; everything else is a no-op.
            let has_corr = corrections[x].iter().any(|&c| c != 0.0);
            if !has_corr && vertex_energy(g, f, x) <= 1.0 + ftol {
                continue;
            }
            // Add back this constraint's correction.
            for (slot, &(y, _)) in g.adjacency(x).iter().enumerate() {
                f[y] += corrections[x][slot];
            }
            f[x] += corrections[x][g.adjacency(x).len()];
            let before: Vec<f64> =
                g.adjacency(x).iter().map(|&(y, _)| f[y]).chain(std::iter::once(f[x])).collect();
            project_star(g, f, x);
            for (slot, &(y, _)) in g.adjacency(x).iter().enumerate() {
                corrections[x][slot] = before[slot] - f[y];
            }
            let k = g.adjacency(x).len();
            corrections[x][k] = before[k] - f[x];
        }
        for x in 0..n {
            max_q = max_q.max(vertex_energy(g, f, x));
        }
        if max_q <= 1.0 + ftol {
            return;
        }
    }
}

/// Default solver tolerance.
pub const INTRINSIC_TOL: f64 = 1e-8;
const INTRINSIC_ITERATION_CAP: usize = 1_000_000;

/// Intrinsic metric `d_I(s,t) = sup { f(s) - f(t) : q_x(f) <= 1 for all x }`
/// by projected ascent with Dykstra-style cyclic projections.
///
/// The ascent starts from the feasible function `sqrt(2) * d_V(., t)`, whose
/// feasibility is exactly the lower bound `sqrt(2) d_V <= d_I`; this both
/// guarantees the returned value respects that bound and converges much
/// faster than the all-zero start.
pub fn intrinsic_metric(
    g: &WeightedGraph,
    s: usize,
    t: usize,
    tol: f64,
) -> Result<IntrinsicValue> {
    let n = g.vertex_count();
    if s >= n {
        return Err(Error::UnknownVertex(s));
    }
    if t >= n {
        return Err(Error::UnknownVertex(t));
    }
    if s == t {
        return Err(Error::InvalidParameter("intrinsic_metric needs s != t".into()));
    }
    // The ascent runs against a loose feasibility tolerance; the final
    // witness is made exactly feasible by rescaling (the constraints are
    // 2-homogeneous), so the returned value is a certified lower bound
    // regardless of how tight the intermediate projections were.
    let ftol = 1e-6;
    let dv = standard_lengths(g, LengthKind::DV)?;
    let from_t = path_metric(g, &dv, t)?;
    let warm: Vec<f64> =
        from_t.dist.iter().map(|d| std::f64::consts::SQRT_2 * d).collect();
    let mut f = warm.clone();
    dykstra_project(g, &mut f, ftol, 50);

    // Ascent with a multiplicative step adaptation around the default step:
    // a bump that survives projection grows the step, a wasted bump restores
    // the incumbent and shrinks it. Terminates when even the smallest step
    // stops improving by `tol`.
    let step0 = 1.0 / (1.0 + g.max_degree() as f64);
    let min_step = (step0 * 1e-4).max(tol);
    let mut step = step0;
    let mut best_val = f[s] - f[t];
    let mut best_f = f.clone();
    let mut iterations = 0usize;
    // Step schedule: grow while every bump survives projection, but once a
    // bump is wasted the step only shrinks — regrowing near the boundary
    // makes the grow/shrink pair cycle indefinitely.
    let mut shrunk = false;
    while iterations < INTRINSIC_ITERATION_CAP {
        iterations += 1;
        f[s] += step;
        f[t] -= step;
        dykstra_project(g, &mut f, ftol, 50);
        let val = f[s] - f[t];
        let improvement = val - best_val;
        if improvement > 0.0 {
            best_val = val;
            best_f.copy_from_slice(&f);
        } else {
            f.copy_from_slice(&best_f);
        }
        if improvement >= 0.5 * step {
            if !shrunk {
                step = (step * 2.0).min(64.0 * step0);
            }
        } else if improvement < tol {
            if step <= min_step {
                return Ok(certify(g, best_f, &warm, s, t, iterations, frontier_radius(g, s)));
            }
            shrunk = true;
            step = (step * 0.25).max(min_step);
        }
    }
    Err(Error::NonConvergence { iterations, best: best_val })
}

/// Scale the witness to exact feasibility (energies are 2-homogeneous in f)
/// and report the certified value. When the rescale costs more than the
/// ascent gained over the warm start, fall back to the warm-start witness
/// itself (`sqrt(2) d_V` always satisfies the energy constraints), so the
/// returned value never drops below `sqrt(2) d_V(s,t)`.
fn certify(
    g: &WeightedGraph,
    mut f: Vec<f64>,
    warm: &[f64],
    s: usize,
    t: usize,
    iterations: usize,
    truncation_radius: Option<usize>,
) -> IntrinsicValue {
    let feasible_scale = |f: &mut Vec<f64>| {
        let shift = f[t];
        let max_q = (0..g.vertex_count())
            .map(|x| vertex_energy(g, f, x))
            .fold(0.0f64, f64::max);
        if max_q > 1.0 {
            let c = 1.0 / max_q.sqrt();
            for v in f.iter_mut() {
                *v = (*v - shift) * c;
            }
        }
    };
    feasible_scale(&mut f);
    if f[s] - f[t] < warm[s] - warm[t] {
        f = warm.to_vec();
        feasible_scale(&mut f);
    }
    IntrinsicValue { value: f[s] - f[t], witness: f, iterations, truncation_radius }
}

/// Graph distance (hop count) from `x` to the nearest frontier vertex.
fn frontier_radius(g: &WeightedGraph, x: usize) -> Option<usize> {
    if g.frontier().is_empty() {
        return None;
    }
    let mut dist = vec![usize::MAX; g.vertex_count()];
    let mut queue = std::collections::VecDeque::new();
    dist[x] = 0;
    queue.push_back(x);
    while let Some(u) = queue.pop_front() {
        if g.is_frontier(u) {
            return Some(dist[u]);
        }
        for &(v, _) in g.adjacency(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    None
}

/// The sup-form path metric `d_{1,a}(s,t) = sup |f(s)-f(t)|` over functions
/// with `|f(u)-f(v)| <= a(e)` per edge, computed exactly as a monotone value
/// iteration (Bellman-Ford) — an algorithm independent of Dijkstra, so the
/// inf-over-paths and sup-over-dual-feasible characterizations are checked
/// by genuinely different code paths.
pub fn dual_path_metric(
    g: &WeightedGraph,
    a: &EdgeLengths,
    s: usize,
    t: usize,
) -> Result<f64> {
    let n = g.vertex_count();
    if s >= n {
        return Err(Error::UnknownVertex(s));
    }
    if t >= n {
        return Err(Error::UnknownVertex(t));
    }
    if a.len() != g.edge_count() {
        return Err(Error::InvalidParameter("edge lengths misaligned with graph".into()));
    }
    // The maximizing f is f(x) = min over paths to t of the length sum:
    // the unique maximal element of the constraint polytope pinned at t.
    let mut f = vec![f64::INFINITY; n];
    f[t] = 0.0;
    for _ in 0..n {
        let mut changed = false;
        for (id, e) in g.edges().iter().enumerate() {
            let c = a.values[id];
            if f[e.v] + c < f[e.u] {
                f[e.u] = f[e.v] + c;
                changed = true;
            }
            if f[e.u] + c < f[e.v] {
                f[e.v] = f[e.u] + c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(f[s])
}
