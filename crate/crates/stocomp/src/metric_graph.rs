//! Weighted metric graphs with loops: closed-form exit laws for the Brownian
//! motion, measures, synchronization with a given walk, and disjoint cycle
//! covers.
//!
//! All closed forms are coded against the `q`-conductance (`q = p` for
//! ordinary edges, `q = 2p` for loops); `p` is stored and `q` derived, which
//! prevents double-counting loops.

use crate::adapted_metrics::{adaptedness, path_metric, EdgeLengths};
use crate::graph_core::{Edge, WeightedGraph};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Per-edge metric-graph parameters: interval length, jump conductance,
/// density (time scale).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeParams {
    pub ell: f64,
    pub p: f64,
    pub omega: f64,
}

impl EdgeParams {
    fn check(&self, what: &str) -> Result<()> {
        for (name, v) in [("ell", self.ell), ("p", self.p), ("omega", self.omega)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{what}: {name} = {v} not in (0, inf)")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricEdge {
    pub u: usize,
    pub v: usize,
    pub params: EdgeParams,
}

/// Weighted metric graph, optionally with one loop per vertex.
///
/// Every vertex must have at least one non-loop edge: a vertex with only a
/// loop would have an infinite exit time.
#[derive(Debug, Clone)]
pub struct MetricGraph {
    n: usize,
    edges: Vec<MetricEdge>,
    loops: Vec<Option<EdgeParams>>,
    adj: Vec<Vec<(usize, usize)>>,
    frontier: Vec<usize>,
}

impl MetricGraph {
    pub fn new(
        n: usize,
        edges: Vec<MetricEdge>,
        loops: Vec<(usize, EdgeParams)>,
        frontier: Vec<usize>,
    ) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (id, e) in edges.iter().enumerate() {
            if e.u >= n {
                return Err(Error::UnknownVertex(e.u));
            }
            if e.v >= n {
                return Err(Error::UnknownVertex(e.v));
            }
            if e.u == e.v {
                return Err(Error::InvalidParameter(
                    "loops must be given separately, not as edges".into(),
                ));
            }
            e.params.check(&format!("edge {id}"))?;
            adj[e.u].push((e.v, id));
            adj[e.v].push((e.u, id));
        }
        let mut loop_table = vec![None; n];
        for (x, params) in loops {
            if x >= n {
                return Err(Error::UnknownVertex(x));
            }
            params.check(&format!("loop at {x}"))?;
            loop_table[x] = Some(params);
        }
        for (x, a) in adj.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::InvalidGraph(format!(
                    "vertex {x} has no non-loop edge; exit time would be infinite"
                )));
            }
        }
        for &x in &frontier {
            if x >= n {
                return Err(Error::UnknownVertex(x));
            }
        }
        Ok(MetricGraph { n, edges, loops: loop_table, adj, frontier })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[MetricEdge] {
        &self.edges
    }

    pub fn loop_at(&self, x: usize) -> Option<&EdgeParams> {
        self.loops[x].as_ref()
    }

    pub fn frontier(&self) -> &[usize] {
        &self.frontier
    }

    /// Star of `x`: incident non-loop edges (with far endpoints) plus the
    /// optional loop, everything expressed in `q`-conductances.
    pub fn star(&self, x: usize) -> Result<StarView> {
        if x >= self.n {
            return Err(Error::UnknownVertex(x));
        }
        let mut edges = Vec::with_capacity(self.adj[x].len());
        let mut neighbors = Vec::with_capacity(self.adj[x].len());
        for &(y, id) in &self.adj[x] {
            let p = self.edges[id].params;
            edges.push(StarEdge { ell: p.ell, q: p.p, omega: p.omega });
            neighbors.push(y);
        }
        let loop_edge = self.loops[x]
            .map(|p| StarEdge { ell: p.ell, q: 2.0 * p.p, omega: p.omega });
        let mut s = StarView::new(edges, loop_edge)?;
        s.neighbors = Some(neighbors);
        Ok(s)
    }

    /// Gauge transform (length re-parametrization): `ell -> ell*phi`,
    /// `p -> p*phi`, `omega -> omega/phi^2`. Leaves exit laws and edge
    /// measures unchanged for any positive `phi`.
    pub fn gauge_transform(&self, phi_edges: &[f64], phi_loops: &[f64]) -> Result<MetricGraph> {
        if phi_edges.len() != self.edges.len() || phi_loops.len() != self.n {
            return Err(Error::InvalidParameter("gauge factor misaligned".into()));
        }
        let apply = |p: &EdgeParams, phi: f64| EdgeParams {
            ell: p.ell * phi,
            p: p.p * phi,
            omega: p.omega / (phi * phi),
        };
        let edges = self
            .edges
            .iter()
            .zip(phi_edges)
            .map(|(e, &phi)| MetricEdge { u: e.u, v: e.v, params: apply(&e.params, phi) })
            .collect();
        let loops = self
            .loops
            .iter()
            .enumerate()
            .filter_map(|(x, l)| l.as_ref().map(|p| (x, apply(p, phi_loops[x]))))
            .collect();
        MetricGraph::new(self.n, edges, loops, self.frontier.clone())
    }
}

/// One incident edge of a star, in `q`-conductance form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StarEdge {
    pub ell: f64,
    pub q: f64,
    pub omega: f64,
}

/// A vertex star: `k >= 1` non-loop edges plus an optional loop.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StarView {
    pub edges: Vec<StarEdge>,
    pub loop_edge: Option<StarEdge>,
    /// Far endpoints when the star was extracted from a [`MetricGraph`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neighbors: Option<Vec<usize>>,
}

impl StarView {
    pub fn new(edges: Vec<StarEdge>, loop_edge: Option<StarEdge>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::InvalidParameter("star needs k >= 1 non-loop edges".into()));
        }
        for (i, e) in edges.iter().enumerate() {
            EdgeParams { ell: e.ell, p: e.q, omega: e.omega }.check(&format!("star edge {i}"))?;
        }
        if let Some(l) = &loop_edge {
            EdgeParams { ell: l.ell, p: l.q, omega: l.omega }.check("star loop")?;
        }
        Ok(StarView { edges, loop_edge, neighbors: None })
    }

    pub fn k(&self) -> usize {
        self.edges.len()
    }

    /// Denominator `sum_{e in E(x)} q(e)/ell(e)` (loop excluded).
    fn denom(&self) -> f64 {
        self.edges.iter().map(|e| e.q / e.ell).sum()
    }

    /// `sum_{e in E_loop(x)} omega(e) q(e) ell(e)` (loop included).
    fn omega_q_ell(&self) -> f64 {
        self.edges.iter().map(|e| e.omega * e.q * e.ell).sum::<f64>()
            + self.loop_edge.map_or(0.0, |l| l.omega * l.q * l.ell)
    }

    /// `sum_{e in E_loop(x)} omega^2(e) q(e) ell^3(e)` (loop included).
    fn omega2_q_ell3(&self) -> f64 {
        self.edges.iter().map(|e| e.omega * e.omega * e.q * e.ell.powi(3)).sum::<f64>()
            + self.loop_edge.map_or(0.0, |l| l.omega * l.omega * l.q * l.ell.powi(3))
    }
}

/// A point of the star: the center, an offset along edge `i`, or an offset
/// along the loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StarPoint {
    Center,
    Edge { index: usize, offset: f64 },
    Loop { offset: f64 },
}

/// Closed-form exit law of the Brownian motion started at the star center.
#[derive(Debug, Clone, Serialize)]
pub struct ExitLaw {
    pub probabilities: Vec<f64>,
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
}

/// Exit probabilities `P(Y_T = x_j) = (q_j/ell_j) / sum q/ell`. The loop
/// contributes to neither numerator nor denominator.
pub fn exit_probabilities(s: &StarView) -> Vec<f64> {
    let d = s.denom();
    s.edges.iter().map(|e| (e.q / e.ell) / d).collect()
}

/// Exit probabilities from an interior point of the star.
pub fn exit_probability_interior(s: &StarView, at: StarPoint) -> Result<Vec<f64>> {
    let b = exit_probabilities(s);
    match at {
        StarPoint::Center => Ok(b),
        StarPoint::Loop { offset } => {
            let l = s
                .loop_edge
                .ok_or_else(|| Error::InvalidParameter("star has no loop".into()))?;
            check_offset(offset, l.ell)?;
            // u is identically the center value along the loop.
            Ok(b)
        }
        StarPoint::Edge { index, offset } => {
            let e = *s
                .edges
                .get(index)
                .ok_or_else(|| Error::InvalidParameter(format!("no edge {index}")))?;
            check_offset(offset, e.ell)?;
            let frac = offset / e.ell;
            Ok(b.iter()
                .enumerate()
                .map(|(j, &bj)| if j == index { frac + (1.0 - frac) * bj } else { (1.0 - frac) * bj })
                .collect())
        }
    }
}

fn check_offset(y: f64, ell: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&(y / ell)) {
        return Err(Error::InvalidParameter(format!("offset {y} outside [0, {ell}]")));
    }
    Ok(())
}

/// Mean exit time `E^x T = sum_{E_loop} omega q ell / sum_{E(x)} q/ell`.
pub fn exit_time_mean(s: &StarView) -> f64 {
    s.omega_q_ell() / s.denom()
}

/// Mean exit time from an interior point:
/// `v((i,y)) = -omega_i y^2 + (omega_i ell_i - (1/ell_i) E^xT) y + E^xT` on an
/// ordinary edge, and `v = omega y (ell - y) + E^xT` on the loop.
pub fn exit_time_mean_interior(s: &StarView, at: StarPoint) -> Result<f64> {
    let b = exit_time_mean(s);
    match at {
        StarPoint::Center => Ok(b),
        StarPoint::Loop { offset } => {
            let l = s
                .loop_edge
                .ok_or_else(|| Error::InvalidParameter("star has no loop".into()))?;
            check_offset(offset, l.ell)?;
            Ok(l.omega * offset * (l.ell - offset) + b)
        }
        StarPoint::Edge { index, offset } => {
            let e = *s
                .edges
                .get(index)
                .ok_or_else(|| Error::InvalidParameter(format!("no edge {index}")))?;
            check_offset(offset, e.ell)?;
            Ok(-e.omega * offset * offset
                + (e.omega * e.ell - b / e.ell) * offset
                + b)
        }
    }
}

/// Full exit law: probabilities, mean, second moment, and variance, per the
/// two displays of the second-moment theorem (thirds coefficients plus the
/// loop cross-term).
pub fn exit_time_moments(s: &StarView) -> ExitLaw {
    let d = s.denom();
    let a = s.omega_q_ell();
    let b3 = s.omega2_q_ell3();
    let mean = a / d;
    let loop_term = s.loop_edge.map_or(0.0, |l| 2.0 * l.omega * l.q * l.ell * a / (d * d));
    let second_moment = (1.0 / 3.0) * b3 / d + (4.0 / 3.0) * mean * mean + loop_term;
    let variance = (1.0 / 3.0) * b3 / d + (1.0 / 3.0) * mean * mean + loop_term;
    ExitLaw { probabilities: exit_probabilities(s), mean, second_moment, variance }
}

/// Edge measure `m(e) = omega(e) p(e) ell(e)` (note `p`, not `q`).
pub fn edge_measure(params: &EdgeParams) -> f64 {
    params.omega * params.p * params.ell
}

/// Sum of `m(e)` over all edges and the loop incident to `x`.
pub fn vertex_star_measure(mg: &MetricGraph, x: usize) -> Result<f64> {
    if x >= mg.vertex_count() {
        return Err(Error::UnknownVertex(x));
    }
    let mut m = mg.loops[x].as_ref().map_or(0.0, edge_measure);
    for &(_, id) in &mg.adj[x] {
        m += edge_measure(&mg.edges[id].params);
    }
    Ok(m)
}

/// Upper bound for the measure of the intrinsic ball of radius `r` around
/// `x0`: the vertex ball under the metric-graph vertex metric (path metric
/// with lengths `sqrt(omega) * ell`, loops excluded), summing the full star
/// measure of each member.
///
/// Errors with `TruncationTooSmall` when the ball's closure touches the
/// truncation frontier.
pub fn ball_measure_upper(mg: &MetricGraph, x0: usize, r: f64) -> Result<f64> {
    if r < 0.0 {
        return Err(Error::InvalidParameter("radius must be nonnegative".into()));
    }
    let topo = topology(mg)?;
    let lengths = EdgeLengths::custom(
        mg.edges.iter().map(|e| e.params.omega.sqrt() * e.params.ell).collect(),
    );
    let d = path_metric(&topo, &lengths, x0)?;
    let mut total = 0.0;
    for x in 0..mg.vertex_count() {
        if d.distance(x) <= r {
            if d.contaminated[x] {
                return Err(Error::TruncationTooSmall { suggested: 2 * mg.vertex_count() });
            }
            total += vertex_star_measure(mg, x)?;
        }
    }
    Ok(total)
}

/// The underlying weighted graph of a metric graph (weights = `p`).
pub fn topology(mg: &MetricGraph) -> Result<WeightedGraph> {
    WeightedGraph::new(
        mg.vertex_count(),
        mg.edges.iter().map(|e| Edge { u: e.u, v: e.v, weight: e.params.p }).collect(),
        mg.frontier.clone(),
    )
}

/// Synchronized metric graph of an adapted length function: `ell = 1`,
/// `p = pi(e)`, `omega = a(e)^2`, with a `(1, 1/2, 1)` loop at every vertex.
/// The Brownian motion on this graph has exactly the walk's jump
/// probabilities, and `pi_x * E^x T` lies in `[1, C_sup + 1]`.
pub fn synchronize(g: &WeightedGraph, a: &EdgeLengths) -> Result<MetricGraph> {
    if a.len() != g.edge_count() {
        return Err(Error::InvalidParameter("edge lengths misaligned with graph".into()));
    }
    for (id, &len) in a.values.iter().enumerate() {
        if !(len > 0.0 && len.is_finite()) {
            return Err(Error::InvalidParameter(format!("zero-length edge {id} cannot be synchronized")));
        }
    }
    let rep = adaptedness(g, a);
    if !rep.adapted {
        return Err(Error::InvalidParameter("length function is not adapted (C_sup infinite)".into()));
    }
    let edges = g
        .edges()
        .iter()
        .zip(&a.values)
        .map(|(e, &len)| MetricEdge {
            u: e.u,
            v: e.v,
            params: EdgeParams { ell: 1.0, p: e.weight, omega: len * len },
        })
        .collect();
    let loops = (0..g.vertex_count())
        .map(|x| (x, EdgeParams { ell: 1.0, p: 0.5, omega: 1.0 }))
        .collect();
    MetricGraph::new(g.vertex_count(), edges, loops, g.frontier().to_vec())
}

/// True iff some disjoint cycle cover of `g` uses edge `e`: equivalently,
/// there is a fixed-point-free permutation `sigma` with `sigma(x) ~ x` for
/// all `x` and `sigma(u) = v`, found by bipartite matching with a forced arc.
pub fn cycle_cover_feasible(g: &WeightedGraph, edge_id: usize) -> Result<bool> {
    Ok(cover_permutation(g, edge_id)?.is_some())
}

/// The adjacency permutation of a disjoint cycle cover forced through edge
/// `edge_id` (as the arc `u -> v`), or `None` when infeasible.
pub fn cover_permutation(g: &WeightedGraph, edge_id: usize) -> Result<Option<Vec<usize>>> {
    let e = g.edge(edge_id)?;
    let (u, v) = (e.u, e.v);
    let n = g.vertex_count();
    // Bipartite matching left = sources, right = targets; arc x -> y iff
    // x ~ y. Pre-match the forced arc and remove its endpoints.
    let mut match_right: Vec<Option<usize>> = vec![None; n];
    let mut match_left: Vec<Option<usize>> = vec![None; n];
    match_right[v] = Some(u);
    match_left[u] = Some(v);

    fn augment(
        g: &WeightedGraph,
        x: usize,
        forced_target: usize,
        seen: &mut [bool],
        match_left: &mut [Option<usize>],
        match_right: &mut [Option<usize>],
    ) -> bool {
        for &(y, _) in g.adjacency(x) {
            if y == forced_target || seen[y] {
                continue;
            }
            seen[y] = true;
            let free = match match_right[y] {
                None => true,
                Some(z) => {
                    // The forced left vertex is never re-routed.
                    match_left[z] == Some(y)
                        && z != forced_source_of(match_right, forced_target)
                        && augment(g, z, forced_target, seen, match_left, match_right)
                }
            };
            if free {
                match_right[y] = Some(x);
                match_left[x] = Some(y);
                return true;
            }
        }
        false
    }

    fn forced_source_of(match_right: &[Option<usize>], forced_target: usize) -> usize {
        match_right[forced_target].expect("forced arc is pre-matched")
    }

    for x in 0..n {
        if x == u {
            continue;
        }
        let mut seen = vec![false; n];
        if !augment(g, x, v, &mut seen, &mut match_left, &mut match_right) {
            return Ok(None);
        }
    }
    Ok(Some(match_left.into_iter().map(|m| m.expect("perfect matching")).collect()))
}

/// Result of [`unit_vertex_weights`].
#[derive(Debug, Clone)]
pub enum CycleCoverResult {
    /// Strictly positive edge weights summing to 1 at every vertex.
    Feasible(Vec<f64>),
    /// An edge through which no disjoint cycle cover passes.
    Infeasible { edge: usize },
}

/// Unit vertex weighting by uniform averaging of per-edge covers: the cover
/// forced through edge `f` contributes `1` to an isolated edge and `1/2` to
/// each edge of a proper cycle, averaged with weight `1/|E|`.
pub fn unit_vertex_weights(g: &WeightedGraph) -> Result<CycleCoverResult> {
    let m = g.edge_count();
    let mut c = vec![0.0f64; m];
    let edge_of = |x: usize, y: usize| -> usize {
        g.adjacency(x)
            .iter()
            .find(|&&(z, _)| z == y)
            .map(|&(_, id)| id)
            .expect("permutation respects adjacency")
    };
    for f in 0..m {
        let sigma = match cover_permutation(g, f)? {
            Some(s) => s,
            None => return Ok(CycleCoverResult::Infeasible { edge: f }),
        };
        let share = 1.0 / m as f64;
        let mut visited = vec![false; g.vertex_count()];
        for start in 0..g.vertex_count() {
            if visited[start] {
                continue;
            }
            // Walk the cycle through `start`.
            let mut cycle = vec![start];
            visited[start] = true;
            let mut x = sigma[start];
            while x != start {
                visited[x] = true;
                cycle.push(x);
                x = sigma[x];
            }
            if cycle.len() == 2 {
                c[edge_of(cycle[0], cycle[1])] += share;
            } else {
                for i in 0..cycle.len() {
                    let a = cycle[i];
                    let b = cycle[(i + 1) % cycle.len()];
                    c[edge_of(a, b)] += 0.5 * share;
                }
            }
        }
    }
    Ok(CycleCoverResult::Feasible(c))
}

/// Brute-force oracle: enumerate all adjacency-respecting fixed-point-free
/// permutations and report whether any cover uses `edge_id`. Exponential;
/// intended for graphs with at most ~8 vertices.
pub fn cycle_cover_feasible_brute(g: &WeightedGraph, edge_id: usize) -> Result<bool> {
    let e = g.edge(edge_id)?;
    let n = g.vertex_count();
    let mut used = vec![false; n];
    let mut sigma = vec![usize::MAX; n];
    fn rec(
        g: &WeightedGraph,
        x: usize,
        used: &mut [bool],
        sigma: &mut [usize],
        target: (usize, usize),
    ) -> bool {
        let n = g.vertex_count();
        if x == n {
            return sigma[target.0] == target.1 || sigma[target.1] == target.0;
        }
        for &(y, _) in g.adjacency(x) {
            if !used[y] {
                used[y] = true;
                sigma[x] = y;
                if rec(g, x + 1, used, sigma, target) {
                    used[y] = false;
                    return true;
                }
                used[y] = false;
            }
        }
        false
    }
    Ok(rec(g, 0, &mut used, &mut sigma, (e.u, e.v)))
}

/// Exact-rational exit laws for small stars, so equality assertions in tests
/// can be exact.
pub mod exact {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::Zero;

    #[derive(Debug, Clone)]
    pub struct RatEdge {
        pub ell: BigRational,
        pub q: BigRational,
        pub omega: BigRational,
    }

    pub fn rat(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    pub fn edge(ell: (i64, i64), q: (i64, i64), omega: (i64, i64)) -> RatEdge {
        RatEdge { ell: rat(ell.0, ell.1), q: rat(q.0, q.1), omega: rat(omega.0, omega.1) }
    }

    /// `(probabilities, mean, second moment, variance)` in exact arithmetic.
    pub fn exit_law(
        edges: &[RatEdge],
        loop_edge: Option<&RatEdge>,
    ) -> (Vec<BigRational>, BigRational, BigRational, BigRational) {
        let denom: BigRational =
            edges.iter().map(|e| &e.q / &e.ell).fold(BigRational::zero(), |s, t| s + t);
        let probs: Vec<BigRational> =
            edges.iter().map(|e| (&e.q / &e.ell) / &denom).collect();
        let all = edges.iter().chain(loop_edge);
        let a: BigRational = all
            .clone()
            .map(|e| &e.omega * &e.q * &e.ell)
            .fold(BigRational::zero(), |s, t| s + t);
        let b3: BigRational = all
            .map(|e| &e.omega * &e.omega * &e.q * &e.ell * &e.ell * &e.ell)
            .fold(BigRational::zero(), |s, t| s + t);
        let mean = &a / &denom;
        let third = rat(1, 3);
        let loop_term = match loop_edge {
            Some(l) => rat(2, 1) * &l.omega * &l.q * &l.ell * &a / (&denom * &denom),
            None => BigRational::zero(),
        };
        let second = &third * &b3 / &denom + rat(4, 3) * &mean * &mean + &loop_term;
        let variance = &third * &b3 / &denom + &third * &mean * &mean + &loop_term;
        (probs, mean, second, variance)
    }

    pub fn to_f64(r: &BigRational) -> f64 {
        use num_traits::ToPrimitive;
        r.to_f64().expect("rational fits in f64")
    }
}

#[derive(Serialize, Deserialize)]
struct MetricGraphJson {
    edges: Vec<(usize, usize, f64, f64, f64)>,
    loops: Vec<(usize, f64, f64, f64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    frontier: Vec<usize>,
}

/// JSON format: `{"edges": [[u, v, ell, p, omega], ...],
/// "loops": [[x, ell, p, omega], ...]}` plus an optional `"frontier"` list.
pub fn to_json(mg: &MetricGraph) -> String {
    let doc = MetricGraphJson {
        edges: mg
            .edges
            .iter()
            .map(|e| (e.u, e.v, e.params.ell, e.params.p, e.params.omega))
            .collect(),
        loops: mg
            .loops
            .iter()
            .enumerate()
            .filter_map(|(x, l)| l.map(|p| (x, p.ell, p.p, p.omega)))
            .collect(),
        frontier: mg.frontier.clone(),
    };
    serde_json::to_string(&doc).expect("metric graph serialization cannot fail")
}

pub fn from_json(s: &str) -> Result<MetricGraph> {
    let doc: MetricGraphJson = serde_json::from_str(s)?;
    let n = doc
        .edges
        .iter()
        .flat_map(|&(u, v, ..)| [u, v])
        .chain(doc.loops.iter().map(|&(x, ..)| x))
        .max()
        .map_or(0, |m| m + 1);
    MetricGraph::new(
        n,
        doc.edges
            .iter()
            .map(|&(u, v, ell, p, omega)| MetricEdge { u, v, params: EdgeParams { ell, p, omega } })
            .collect(),
        doc.loops
            .iter()
            .map(|&(x, ell, p, omega)| (x, EdgeParams { ell, p, omega }))
            .collect(),
        doc.frontier,
    )
}
