//! Weighted-graph data model, validation, and family generators.
//!
//! Infinite families (birth-death chains, trees, antitrees) are represented as
//! finite truncations carrying an explicit `truncation_frontier`: the set of
//! vertices whose neighborhoods were cut off. Downstream computations use the
//! frontier to detect truncation-dependent results.

use crate::rng::CounterRng;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::path::Path;
use std::str::FromStr;

/// Refuse to generate graphs larger than this many vertices.
pub const VERTEX_CAP: u64 = 20_000_000;

/// One undirected edge with symmetric positive weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// Finite (possibly truncated) undirected graph with positive edge weights.
///
/// Immutable after construction; all accessors are safe for concurrent reads.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, usize)>>,
    frontier_mask: Vec<bool>,
    frontier: Vec<usize>,
}

impl WeightedGraph {
    /// Build a graph from parts. Vertex ids must be in range; other invariant
    /// violations (weights, loops, duplicates, connectivity) are tolerated
    /// here and reported by [`validate_graph`].
    pub fn new(n: usize, edges: Vec<Edge>, frontier: Vec<usize>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (id, e) in edges.iter().enumerate() {
            if e.u >= n {
                return Err(Error::UnknownVertex(e.u));
            }
            if e.v >= n {
                return Err(Error::UnknownVertex(e.v));
            }
            adj[e.u].push((e.v, id));
            if e.u != e.v {
                adj[e.v].push((e.u, id));
            }
        }
        let mut frontier_mask = vec![false; n];
        for &x in &frontier {
            if x >= n {
                return Err(Error::UnknownVertex(x));
            }
            frontier_mask[x] = true;
        }
        let mut frontier: Vec<usize> = frontier;
        frontier.sort_unstable();
        frontier.dedup();
        Ok(WeightedGraph { n, edges, adj, frontier_mask, frontier })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> Result<&Edge> {
        self.edges.get(id).ok_or(Error::UnknownEdge(id))
    }

    /// Incident `(neighbor, edge id)` pairs of `x`.
    pub fn adjacency(&self, x: usize) -> &[(usize, usize)] {
        &self.adj[x]
    }

    pub fn degree(&self, x: usize) -> usize {
        self.adj[x].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_frontier(&self, x: usize) -> bool {
        self.frontier_mask[x]
    }

    /// Sorted frontier vertex ids.
    pub fn frontier(&self) -> &[usize] {
        &self.frontier
    }

    pub fn contains_vertex(&self, x: usize) -> bool {
        x < self.n
    }
}

/// Vertex measure `pi_x = sum of incident edge weights`.
pub fn vertex_measure(g: &WeightedGraph, x: usize) -> Result<f64> {
    if x >= g.vertex_count() {
        return Err(Error::UnknownVertex(x));
    }
    Ok(g.adjacency(x).iter().map(|&(_, e)| g.edges()[e].weight).sum())
}

/// A single invariant violation found by [`validate_graph`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NonpositiveWeight { edge: usize },
    Loop { edge: usize },
    DuplicateEdge { edge: usize },
    IsolatedVertex { vertex: usize },
    Disconnected { components: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NonpositiveWeight { edge } => write!(f, "nonpositive weight on edge {edge}"),
            Violation::Loop { edge } => write!(f, "loop at edge {edge}"),
            Violation::DuplicateEdge { edge } => write!(f, "duplicate edge {edge}"),
            Violation::IsolatedVertex { vertex } => write!(f, "isolated vertex {vertex}"),
            Violation::Disconnected { components } => {
                write!(f, "graph is disconnected ({components} components)")
            }
        }
    }
}

/// Report-style validation result; empty iff all invariants hold.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check the standing assumptions: positive weights, no loops, no duplicate
/// edges, no isolated vertices, connectedness.
pub fn validate_graph(g: &WeightedGraph) -> ValidationReport {
    let mut violations = Vec::new();
    let mut seen = HashSet::new();
    for (id, e) in g.edges().iter().enumerate() {
        if !(e.weight > 0.0) || !e.weight.is_finite() {
            violations.push(Violation::NonpositiveWeight { edge: id });
        }
        if e.u == e.v {
            violations.push(Violation::Loop { edge: id });
        } else if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
            violations.push(Violation::DuplicateEdge { edge: id });
        }
    }
    for x in 0..g.vertex_count() {
        if g.degree(x) == 0 {
            violations.push(Violation::IsolatedVertex { vertex: x });
        }
    }
    if g.vertex_count() > 0 {
        let mut visited = vec![false; g.vertex_count()];
        let mut components = 0usize;
        for start in 0..g.vertex_count() {
            if visited[start] {
                continue;
            }
            components += 1;
            let mut stack = vec![start];
            visited[start] = true;
            while let Some(x) = stack.pop() {
                for &(y, _) in g.adjacency(x) {
                    if !visited[y] {
                        visited[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        if components > 1 {
            violations.push(Violation::Disconnected { components });
        }
    }
    ValidationReport { violations }
}

/// Branching function `r(n) = mul*n + add` for antitrees, parsed from strings
/// like `"n+1"`, `"2*n"`, `"3"`, or `"2*n+5"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchingFn {
    pub mul: u64,
    pub add: u64,
}

impl BranchingFn {
    pub fn eval(&self, n: usize) -> usize {
        (self.mul as usize) * n + self.add as usize
    }
}

impl FromStr for BranchingFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::InvalidParameter(format!("cannot parse branching function '{s}'"));
        let (head, add) = match s.split_once('+') {
            Some((h, a)) => (h.to_string(), a.parse::<u64>().map_err(|_| bad())?),
            None => (s.clone(), 0),
        };
        let (mul, add) = if head == "n" {
            (1, add)
        } else if let Some(m) = head.strip_suffix("*n") {
            (m.parse::<u64>().map_err(|_| bad())?, add)
        } else if s.contains('+') {
            return Err(bad());
        } else {
            (0, head.parse::<u64>().map_err(|_| bad())?)
        };
        Ok(BranchingFn { mul, add })
    }
}

impl std::fmt::Display for BranchingFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.mul, self.add) {
            (0, b) => write!(f, "{b}"),
            (1, 0) => write!(f, "n"),
            (1, b) => write!(f, "n+{b}"),
            (a, 0) => write!(f, "{a}*n"),
            (a, b) => write!(f, "{a}*n+{b}"),
        }
    }
}

/// Specification of a graph family plus truncation parameter.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum FamilySpec {
    BirthDeath { beta: f64, n: usize },
    SphericalTree { alpha: f64, depth: usize },
    Antitree { r: BranchingFn, n: usize },
    Lattice { side: usize },
    Explicit { path: String },
}

impl FamilySpec {
    pub fn generate(&self) -> Result<WeightedGraph> {
        match self {
            FamilySpec::BirthDeath { beta, n } => generate_birth_death(*beta, *n),
            FamilySpec::SphericalTree { alpha, depth } => generate_spherical_tree(*alpha, *depth),
            FamilySpec::Antitree { r, n } => generate_antitree(|k| r.eval(k), *n),
            FamilySpec::Lattice { side } => generate_lattice(*side),
            FamilySpec::Explicit { path } => load_graph(Path::new(path)),
        }
    }
}

/// `log_+(x) = max(ln x, 1)`; natural logarithm throughout.
fn log_plus(x: f64) -> f64 {
    x.ln().max(1.0)
}

/// Birth-death chain on `0..=N` with `pi_{n,n+1} = (n+1)^2 log_+(n+1)^beta`.
/// The frontier is `{N}`.
pub fn generate_birth_death(beta: f64, n: usize) -> Result<WeightedGraph> {
    if !(0.0..2.0).contains(&beta) {
        return Err(Error::InvalidParameter(format!("beta={beta} outside [0,2)")));
    }
    if n < 2 {
        return Err(Error::InvalidParameter("birth-death needs N >= 2".into()));
    }
    guard(n as u64 + 1)?;
    let edges = (0..n)
        .map(|k| {
            let m = (k + 1) as f64;
            Edge { u: k, v: k + 1, weight: m * m * log_plus(m).powf(beta) }
        })
        .collect();
    WeightedGraph::new(n + 1, edges, vec![n])
}

/// Spherically symmetric tree with `k(r) = max(floor(r^alpha), 1)` children at
/// depth `r`, truncated at depth `R`; all weights 1. The root's branching
/// `k(0) = floor(0^alpha) = 0` is replaced by 1 so the root is not isolated.
/// The frontier is the set of depth-`R` vertices.
pub fn generate_spherical_tree(alpha: f64, depth: usize) -> Result<WeightedGraph> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::InvalidParameter(format!("alpha={alpha} outside (0,2)")));
    }
    if depth < 1 {
        return Err(Error::InvalidParameter("tree needs depth >= 1".into()));
    }
    let branching = |r: usize| -> usize {
        if r == 0 {
            1
        } else {
            ((r as f64).powf(alpha).floor() as usize).max(1)
        }
    };
    // Memory guard before allocating anything.
    let mut level: u128 = 1;
    let mut total: u128 = 1;
    for r in 0..depth {
        level = level.saturating_mul(branching(r) as u128);
        total = total.saturating_add(level);
        if total > VERTEX_CAP as u128 {
            return Err(Error::MemoryGuard { estimated: total, cap: VERTEX_CAP });
        }
    }
    // Breadth-first ids: root 0, then each level in order.
    let mut edges = Vec::new();
    let mut current: Vec<usize> = vec![0];
    let mut next_id = 1usize;
    for r in 0..depth {
        let k = branching(r);
        let mut next = Vec::with_capacity(current.len() * k);
        for &parent in &current {
            for _ in 0..k {
                edges.push(Edge { u: parent, v: next_id, weight: 1.0 });
                next.push(next_id);
                next_id += 1;
            }
        }
        current = next;
    }
    WeightedGraph::new(next_id, edges, current)
}

/// Antitree: spine `0..=N+1` plus levels `A_0..A_N` with `|A_n| = r(n)`; every
/// `A_n` vertex is joined to spine vertices `n` and `n+1`; all weights 1.
/// Vertex ids are breadth-first from the origin (`0`, `A_0`, `1`, `A_1`, ...).
/// The frontier is `{N+1} ∪ A_N`.
pub fn generate_antitree(r: impl Fn(usize) -> usize, n: usize) -> Result<WeightedGraph> {
    if n < 1 {
        return Err(Error::InvalidParameter("antitree needs N >= 1".into()));
    }
    let sizes: Vec<usize> = (0..=n).map(&r).collect();
    if let Some(level) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::InvalidParameter(format!("r({level}) = 0; need r >= 1")));
    }
    let total = (n as u128 + 2) + sizes.iter().map(|&s| s as u128).sum::<u128>();
    guard_u128(total)?;

    let mut edges = Vec::new();
    let mut spine = Vec::with_capacity(n + 2);
    let mut next_id = 0usize;
    let mut last_level: Vec<usize> = Vec::new();
    for level in 0..=n {
        spine.push(next_id);
        for &x in &last_level {
            edges.push(Edge { u: x, v: next_id, weight: 1.0 });
        }
        next_id += 1;
        last_level = (0..sizes[level]).map(|i| next_id + i).collect();
        next_id += sizes[level];
        for &x in &last_level {
            edges.push(Edge { u: spine[level], v: x, weight: 1.0 });
        }
    }
    // Terminal spine vertex N+1, connected to all of A_N.
    let terminal = next_id;
    spine.push(terminal);
    next_id += 1;
    for &x in &last_level {
        edges.push(Edge { u: x, v: terminal, weight: 1.0 });
    }
    let mut frontier = vec![terminal];
    frontier.extend_from_slice(&last_level);
    WeightedGraph::new(next_id, edges, frontier)
}

/// Square lattice patch `side x side` with unit weights; the frontier is the
/// boundary of the patch (those vertices have truncated neighborhoods when the
/// patch stands in for the infinite lattice).
pub fn generate_lattice(side: usize) -> Result<WeightedGraph> {
    if side < 2 {
        return Err(Error::InvalidParameter("lattice needs side >= 2".into()));
    }
    guard((side as u64).saturating_mul(side as u64))?;
    let id = |i: usize, j: usize| i * side + j;
    let mut edges = Vec::new();
    let mut frontier = Vec::new();
    for i in 0..side {
        for j in 0..side {
            if i + 1 < side {
                edges.push(Edge { u: id(i, j), v: id(i + 1, j), weight: 1.0 });
            }
            if j + 1 < side {
                edges.push(Edge { u: id(i, j), v: id(i, j + 1), weight: 1.0 });
            }
            if i == 0 || j == 0 || i == side - 1 || j == side - 1 {
                frontier.push(id(i, j));
            }
        }
    }
    WeightedGraph::new(side * side, edges, frontier)
}

/// Deterministic random connected graph for tests and benchmarks: a uniform
/// random spanning tree plus `extra_edges` additional distinct non-loop edges,
/// weights log-uniform in `[w_lo, w_hi]`. No frontier.
pub fn generate_random_connected(
    n: usize,
    extra_edges: usize,
    w_lo: f64,
    w_hi: f64,
    seed: u64,
) -> Result<WeightedGraph> {
    if n < 2 {
        return Err(Error::InvalidParameter("random graph needs n >= 2".into()));
    }
    if !(w_lo > 0.0 && w_hi >= w_lo) {
        return Err(Error::InvalidParameter("need 0 < w_lo <= w_hi".into()));
    }
    let mut rng = CounterRng::new(seed);
    let mut present = HashSet::new();
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.below(v);
        present.insert((u.min(v), u.max(v)));
        edges.push(Edge { u, v, weight: rng.log_uniform(w_lo, w_hi) });
    }
    let max_edges = n * (n - 1) / 2;
    let mut added = 0usize;
    let mut attempts = 0usize;
    while added < extra_edges && present.len() < max_edges && attempts < 100 * extra_edges + 100 {
        attempts += 1;
        let u = rng.below(n);
        let v = rng.below(n);
        if u != v && present.insert((u.min(v), u.max(v))) {
            edges.push(Edge { u, v, weight: rng.log_uniform(w_lo, w_hi) });
            added += 1;
        }
    }
    WeightedGraph::new(n, edges, Vec::new())
}

fn guard(estimated: u64) -> Result<()> {
    guard_u128(estimated as u128)
}

fn guard_u128(estimated: u128) -> Result<()> {
    if estimated > VERTEX_CAP as u128 {
        Err(Error::MemoryGuard { estimated, cap: VERTEX_CAP })
    } else {
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    frontier: Vec<usize>,
}

/// Serialize to the graph JSON format
/// `{"n": int, "edges": [[u, v, weight], ...], "frontier": [ids]}`.
/// Round-trips are lossless for 64-bit float weights.
pub fn to_json(g: &WeightedGraph) -> String {
    let doc = GraphJson {
        n: g.vertex_count(),
        edges: g.edges().iter().map(|e| (e.u, e.v, e.weight)).collect(),
        frontier: g.frontier().to_vec(),
    };
    serde_json::to_string(&doc).expect("graph serialization cannot fail")
}

pub fn from_json(s: &str) -> Result<WeightedGraph> {
    let doc: GraphJson = serde_json::from_str(s)?;
    let edges = doc.edges.iter().map(|&(u, v, w)| Edge { u, v, weight: w }).collect();
    WeightedGraph::new(doc.n, edges, doc.frontier)
}

pub fn save_graph(g: &WeightedGraph, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(g))?;
    Ok(())
}

pub fn load_graph(path: &Path) -> Result<WeightedGraph> {
    from_json(&std::fs::read_to_string(path)?)
}
