//! Acceptance suite: one test per criterion, each printing a single
//! `criterion N: PASS` / `criterion N: FAIL` line (visible with
//! `cargo test --test acceptance -- --nocapture`).

use stocomp::adapted_metrics::{
    adaptedness, dual_path_metric, induced_from_metric, intrinsic_metric, path_metric,
    standard_lengths, EdgeLengths, LengthKind,
};
use stocomp::graph_core::{
    generate_antitree, generate_birth_death, generate_random_connected, generate_spherical_tree,
    Edge, WeightedGraph,
};
use stocomp::metric_graph::{
    cycle_cover_feasible, cycle_cover_feasible_brute, exit_probabilities, exit_time_mean,
    exit_time_moments, synchronize, unit_vertex_weights, CycleCoverResult, StarEdge, StarView,
};
use stocomp::rng::{derive_seed, CounterRng};
use stocomp::simulate::{coupled_lifetime_bounds, explosion_stats, star_walk_oracle};
use stocomp::volume_growth::{
    birth_death_exact, classify_growth, geometric_grid, log_distance_exponent,
    power_law_exponent_with_offset, tree_exact, volume_profile, BirthDeathInput, Classification,
    VolumeProfile,
};

fn report(criterion: usize, errors: Vec<String>) {
    if errors.is_empty() {
        println!("criterion {criterion}: PASS");
    } else {
        println!("criterion {criterion}: FAIL");
        for e in &errors {
            println!("  {e}");
        }
        panic!("criterion {criterion} failed with {} error(s)", errors.len());
    }
}

// ---------------------------------------------------------------------------
// Criterion 1: closed-form exit law vs the discretized Brownian oracle on 20
// randomized stars (k <= 5, parameters log-uniform in [0.2, 5], alternating
// loops), h = 5e-3, 1e5 replicas; probabilities within 3 s.e., means within
// max(2%, 3 s.e.).
// ---------------------------------------------------------------------------
#[test]
fn criterion_1_exit_law_vs_oracle() {
    const MASTER: u64 = 0xC2;
    let mut errors = Vec::new();
    for i in 0..20u64 {
        let mut rng = CounterRng::new(derive_seed(MASTER, i));
        let k = 1 + rng.below(5);
        let edges: Vec<StarEdge> = (0..k)
            .map(|_| StarEdge {
                ell: rng.log_uniform(0.2, 5.0),
                q: rng.log_uniform(0.2, 5.0),
                omega: rng.log_uniform(0.2, 5.0),
            })
            .collect();
        let loop_edge = (i % 2 == 1).then(|| StarEdge {
            ell: rng.log_uniform(0.2, 5.0),
            q: rng.log_uniform(0.2, 5.0),
            omega: rng.log_uniform(0.2, 5.0),
        });
        let star = StarView::new(edges, loop_edge).unwrap();
        let law = exit_time_moments(&star);
        let emp = star_walk_oracle(&star, 5e-3, derive_seed(MASTER, 1000 + i), 100_000).unwrap();
        for j in 0..k {
            let gap = (emp.probabilities[j] - law.probabilities[j]).abs();
            if gap > 3.0 * emp.prob_se[j] {
                errors.push(format!(
                    "star {i} edge {j}: |p_emp - p| = {gap:.3e} > 3 s.e. = {:.3e}",
                    3.0 * emp.prob_se[j]
                ));
            }
        }
        let mean_tol = (0.02 * law.mean).max(3.0 * emp.mean_se);
        if (emp.mean - law.mean).abs() > mean_tol {
            errors.push(format!(
                "star {i}: |mean_emp - mean| = {:.3e} > {mean_tol:.3e}",
                (emp.mean - law.mean).abs()
            ));
        }
    }
    report(1, errors);
}

// ---------------------------------------------------------------------------
// Criterion 2: the symmetric 2-star (ell = q = omega = 1) has exit law
// (1, 5/3, 2/3) to 1e-12, matching an independent finite-difference ODE
// oracle for Brownian exit from [-1, 1].
// ---------------------------------------------------------------------------

/// Thomas-algorithm solve of `u'' = f(y)` on [-1, 1] with u(+-1) = 0 over
/// `n` intervals; returns u(0) (`n` must be even).
fn fd_center_value(n: usize, f: impl Fn(f64) -> f64) -> f64 {
    assert!(n % 2 == 0);
    let h = 2.0 / n as f64;
    let m = n - 1; // interior unknowns
    let mut rhs: Vec<f64> = (1..n).map(|i| h * h * f(-1.0 + i as f64 * h)).collect();
    // Tridiagonal (1, -2, 1): forward elimination with running diagonal.
    let mut diag = vec![-2.0f64; m];
    for i in 1..m {
        let w = 1.0 / diag[i - 1];
        diag[i] -= w;
        rhs[i] -= w * rhs[i - 1];
    }
    let mut u = vec![0.0f64; m];
    u[m - 1] = rhs[m - 1] / diag[m - 1];
    for i in (0..m - 1).rev() {
        u[i] = (rhs[i] - u[i + 1]) / diag[i];
    }
    u[n / 2 - 1] // grid point y = 0
}

#[test]
fn criterion_2_exact_1d_reduction() {
    let mut errors = Vec::new();
    let star = StarView::new(
        vec![
            StarEdge { ell: 1.0, q: 1.0, omega: 1.0 },
            StarEdge { ell: 1.0, q: 1.0, omega: 1.0 },
        ],
        None,
    )
    .unwrap();
    let law = exit_time_moments(&star);
    for (name, got, want) in [
        ("mean", law.mean, 1.0),
        ("second moment", law.second_moment, 5.0 / 3.0),
        ("variance", law.variance, 2.0 / 3.0),
        ("probability", law.probabilities[0], 0.5),
    ] {
        if (got - want).abs() > 1e-12 {
            errors.push(format!("closed-form {name}: {got} != {want}"));
        }
    }
    // ODE oracle: v'' = -2 omega gives E_y[T], and w'' = -4 omega^2 (1 - y^2)
    // gives E_y[T^2], both with absorbing boundaries at +-1 (omega = 1).
    // Richardson extrapolation of the O(h^2) central scheme.
    let richardson = |f: &dyn Fn(f64) -> f64| -> f64 {
        let coarse = fd_center_value(1000, f);
        let fine = fd_center_value(2000, f);
        fine + (fine - coarse) / 3.0
    };
    let v0 = richardson(&|_y| -2.0);
    let w0 = richardson(&|y: f64| -4.0 * (1.0 - y * y));
    if (v0 - law.mean).abs() > 1e-8 {
        errors.push(format!("ODE oracle mean {v0} vs closed form {}", law.mean));
    }
    if (w0 - law.second_moment).abs() > 1e-8 {
        errors.push(format!(
            "ODE oracle second moment {w0} vs closed form {}",
            law.second_moment
        ));
    }
    report(2, errors);
}

// ---------------------------------------------------------------------------
// Criterion 3: on 50 random connected graphs (n <= 30, pi log-uniform in
// [0.1, 10]): sqrt2 d_V <= d_I + 1e-6 and d_I <= 2 d_E + 1e-6 on all pairs;
// dual_path_metric == path_metric within 1e-9; rho <= d_rho on sampled
// metrics.
// ---------------------------------------------------------------------------
#[test]
fn criterion_3_metric_inequalities() {
    let mut errors = Vec::new();
    for seed in 0..50u64 {
        let n = 5 + (seed as usize * 7) % 26;
        let extra = n / 2 + (seed as usize % 5);
        let g = generate_random_connected(n, extra, 0.1, 10.0, seed).unwrap();
        let dv = standard_lengths(&g, LengthKind::DV).unwrap();
        let de = standard_lengths(&g, LengthKind::DE).unwrap();
        let dv_maps: Vec<_> = (0..n).map(|s| path_metric(&g, &dv, s).unwrap()).collect();
        let de_maps: Vec<_> = (0..n).map(|s| path_metric(&g, &de, s).unwrap()).collect();
        for s in 0..n {
            for t in (s + 1)..n {
                let di = intrinsic_metric(&g, s, t, 1e-4).unwrap().value;
                let lo = std::f64::consts::SQRT_2 * dv_maps[s].distance(t);
                let hi = 2.0 * de_maps[s].distance(t);
                if lo > di + 1e-6 {
                    errors.push(format!(
                        "graph {seed} pair ({s},{t}): sqrt2 d_V = {lo} > d_I = {di}"
                    ));
                }
                if di > hi + 1e-6 {
                    errors.push(format!(
                        "graph {seed} pair ({s},{t}): d_I = {di} > 2 d_E = {hi}"
                    ));
                }
            }
            // Dual (Bellman-Ford) vs primal (Dijkstra) shortest paths.
            let t = (s + 1) % n;
            let dual = dual_path_metric(&g, &dv, s, t).unwrap();
            if (dual - dv_maps[s].distance(t)).abs() > 1e-9 {
                errors.push(format!(
                    "graph {seed}: dual {dual} vs path {}",
                    dv_maps[s].distance(t)
                ));
            }
        }
        // Any metric rho is dominated by the path metric of its
        // induced edge lengths. Sample rho = sqrt of the d_V path metric
        // (concavity preserves the triangle inequality).
        let rho = |x: usize, y: usize| dv_maps[x].distance(y).sqrt();
        let induced = induced_from_metric(&g, rho);
        for s in 0..n {
            let d_rho = path_metric(&g, &induced, s).unwrap();
            for t in 0..n {
                if rho(s, t) > d_rho.distance(t) + 1e-12 {
                    errors.push(format!(
                        "graph {seed} pair ({s},{t}): rho = {} > d_rho = {}",
                        rho(s, t),
                        d_rho.distance(t)
                    ));
                }
            }
        }
    }
    report(3, errors);
}

// ---------------------------------------------------------------------------
// Criterion 4: birth-death family. Exact series verdicts; the d_V distance
// data at N = 1e5 recovers the growth exponent 2/(2-beta) within 0.1; the
// growth fit classifies complete exactly for beta <= 1.
// ---------------------------------------------------------------------------
#[test]
fn criterion_4_birth_death_family() {
    let mut errors = Vec::new();
    for (beta, want) in [
        (0.0, Classification::Complete),
        (0.5, Classification::Complete),
        (1.0, Classification::Complete),
        (1.5, Classification::Incomplete),
        (1.9, Classification::Incomplete),
    ] {
        let v = birth_death_exact(BirthDeathInput::Beta(beta)).unwrap();
        if v.classification != want {
            errors.push(format!("exact beta {beta}: {:?}, want {want:?}", v.classification));
        }
    }
    // Growth exponent from d_V distance anchors R = 4e4 / 6.3e4 / 1e5 (the
    // chain extends to 1.2e5 so the R = 1e5 distance is uncontaminated).
    for beta in [0.0f64, 0.5, 1.0, 1.5, 1.9] {
        let g = generate_birth_death(beta, 120_000).unwrap();
        let a = standard_lengths(&g, LengthKind::DV).unwrap();
        let d = path_metric(&g, &a, 0).unwrap();
        assert!(!d.contaminated[100_000]);
        let anchors = [
            (4e4, d.distance(40_000)),
            (6.3e4, d.distance(63_000)),
            (1e5, d.distance(100_000)),
        ];
        let truth = 2.0 / (2.0 - beta);
        match log_distance_exponent(anchors) {
            Some(p) if (p - truth).abs() <= 0.1 => {}
            got => errors.push(format!(
                "beta {beta}: growth exponent {got:?}, want {truth:.3} within 0.1"
            )),
        }
    }
    // classify_growth: complete exactly for beta <= 1. Supercritical chains
    // need longer truncations before the fitted gamma clears the quadratic
    // band (the approach to the asymptotic exponent is logarithmic).
    for (beta, n, complete) in [
        (0.0, 100_000usize, true),
        (0.5, 100_000, true),
        (1.0, 100_000, true),
        (1.5, 3_000_000, false),
        (1.9, 300_000, false),
    ] {
        let g = generate_birth_death(beta, n).unwrap();
        let a = standard_lengths(&g, LengthKind::DV).unwrap();
        let r0 = a.values.iter().cloned().fold(f64::INFINITY, f64::min) / 2.0;
        let grid = geometric_grid(r0, 1e4, 1.04).unwrap();
        let prof = volume_profile(&g, &a, 0, &grid).unwrap();
        let v = classify_growth(&prof).unwrap();
        let got = v.classification == Classification::Complete;
        if got != complete {
            errors.push(format!(
                "classify beta {beta} (N = {n}): {:?} ({}), want complete = {complete}",
                v.classification, v.evidence
            ));
        }
    }
    report(4, errors);
}

// ---------------------------------------------------------------------------
// Criterion 5: spherically symmetric trees. Exact threshold at alpha = 1;
// log-log regression of d_V(root, R) for R <= 200 recovers 1 - alpha/2
// within 0.05; the intrinsic-metric counterexample at alpha = 1.5 (d_I
// profile looks complete while the exact test says incomplete).
// ---------------------------------------------------------------------------

/// Branching function of the generated trees: `k(0) = 1`,
/// `k(r) = max(floor(r^alpha), 1)`.
fn tree_branching(alpha: f64, r: usize) -> f64 {
    if r == 0 {
        1.0
    } else {
        (r as f64).powf(alpha).floor().max(1.0)
    }
}

/// Closed-form d_V(root, level j): the level-i vertex measure is
/// `1 + k(i)` (k(i) children plus the parent edge, unit weights), the root's
/// is `k(0) = 1`, and each generation contributes the inverse square root of
/// the larger endpoint measure.
fn tree_dv_level(alpha: f64, j: usize) -> f64 {
    (1..=j)
        .map(|i| {
            let m_child = 1.0 + tree_branching(alpha, i);
            let m_parent = if i == 1 { 1.0 } else { 1.0 + tree_branching(alpha, i - 1) };
            1.0 / m_child.max(m_parent).sqrt()
        })
        .sum()
}

/// Closed-form d_I(root, level j): the intrinsic problem reduces to the
/// root-target path (off-path values are held constant), with per-vertex
/// constraints `delta_i^2 + delta_{i+1}^2 <= 2`; the maximum of `sum delta`
/// is `j` for even `j` and `sqrt(j^2 + 1)` for odd `j`.
fn tree_di_level(j: usize) -> f64 {
    if j % 2 == 0 {
        j as f64
    } else {
        ((j * j + 1) as f64).sqrt()
    }
}

#[test]
fn criterion_5_tree_family() {
    let mut errors = Vec::new();
    for (alpha, want) in [
        (0.5, Classification::Complete),
        (1.0, Classification::Complete),
        (1.0 + 1e-9, Classification::Incomplete),
        (1.5, Classification::Incomplete),
        (1.9, Classification::Incomplete),
    ] {
        let v = tree_exact(alpha).unwrap();
        if v.classification != want {
            errors.push(format!("tree_exact alpha {alpha}: {:?}, want {want:?}", v.classification));
        }
    }
    for alpha in [0.5f64, 1.5] {
        // Validate the closed-form level distance against Dijkstra on a
        // generated tree before trusting it out to R = 200.
        let g = generate_spherical_tree(alpha, 5).unwrap();
        let unit = EdgeLengths::custom(vec![1.0; g.edge_count()]);
        let levels = path_metric(&g, &unit, 0).unwrap();
        let dv = standard_lengths(&g, LengthKind::DV).unwrap();
        let d = path_metric(&g, &dv, 0).unwrap();
        for j in 1..=4usize {
            let x = (0..g.vertex_count())
                .find(|&x| (levels.distance(x) - j as f64).abs() < 1e-9)
                .unwrap();
            if (tree_dv_level(alpha, j) - d.distance(x)).abs() > 1e-12 {
                errors.push(format!(
                    "alpha {alpha} level {j}: formula {} vs Dijkstra {}",
                    tree_dv_level(alpha, j),
                    d.distance(x)
                ));
            }
        }
        // Offset-corrected log-log regression of d_V(root, R) on R <= 200.
        let xs: Vec<f64> = (20..=200).map(|j| j as f64).collect();
        let ys: Vec<f64> = (20..=200).map(|j| tree_dv_level(alpha, j)).collect();
        let truth = 1.0 - alpha / 2.0;
        match power_law_exponent_with_offset(&xs, &ys) {
            Some((s, _)) if (s - truth).abs() <= 0.05 => {}
            got => errors.push(format!(
                "alpha {alpha}: d_V exponent fit {got:?}, want {truth} within 0.05"
            )),
        }
    }
    // Intrinsic counterexample at alpha = 1.5. First validate the closed-form
    // d_I levels against the generic solver on a real tree.
    {
        let alpha = 1.5f64;
        let g = generate_spherical_tree(alpha, 5).unwrap();
        let unit = EdgeLengths::custom(vec![1.0; g.edge_count()]);
        let levels = path_metric(&g, &unit, 0).unwrap();
        for j in 1..=5usize {
            let x = (0..g.vertex_count())
                .find(|&x| (levels.distance(x) - j as f64).abs() < 1e-9)
                .unwrap();
            let di = intrinsic_metric(&g, 0, x, 1e-6).unwrap().value;
            if (di - tree_di_level(j)).abs() > 2e-3 {
                errors.push(format!(
                    "alpha 1.5 level {j}: d_I solver {di} vs closed form {}",
                    tree_di_level(j)
                ));
            }
        }
        // d_I volume profile to depth 300 from closed-form radii and level
        // counts (the tree itself is astronomically large at that depth).
        let mut points = Vec::new();
        let mut log_level = 0.0f64; // ln |level j|
        let mut log_cum = 0.0f64; // ln of cumulative vertex count
        for j in 1..=300usize {
            log_level += tree_branching(alpha, j - 1).ln();
            let m = log_cum.max(log_level);
            log_cum = m + ((log_cum - m).exp() + (log_level - m).exp()).ln();
            points.push((tree_di_level(j), log_cum));
        }
        let prof = VolumeProfile::from_log_counts(0, "intrinsic", &points, 300.0);
        let fit = classify_growth(&prof).unwrap();
        let gamma = fit.evidence["gamma"].as_f64().unwrap();
        if gamma > 1.2 {
            errors.push(format!("alpha 1.5 d_I profile: gamma = {gamma} > 1.2"));
        }
        // The required disagreement: the d_I growth fit reads complete while
        // the exact series test says incomplete.
        let exact = tree_exact(alpha).unwrap();
        if !(fit.classification == Classification::Complete
            && exact.classification == Classification::Incomplete)
        {
            errors.push(format!(
                "alpha 1.5: growth fit {:?} / exact {:?}, want Complete / Incomplete",
                fit.classification, exact.classification
            ));
        }
    }
    report(5, errors);
}

// ---------------------------------------------------------------------------
// Criterion 6: synchronization. On 20 random graphs the synchronized metric
// graph's exit probabilities equal the VSRW jump probabilities to 1e-12,
// pi_x E^x T lies in [1, C_sup + 1] at every (non-frontier) vertex, and the
// coupled lifetime sandwich holds pathwise for 1e4 steps.
// ---------------------------------------------------------------------------
#[test]
fn criterion_6_synchronization() {
    let mut errors = Vec::new();
    for seed in 0..20u64 {
        let n = 6 + (seed as usize * 3) % 20;
        let g = generate_random_connected(n, n / 2, 0.1, 10.0, 500 + seed).unwrap();
        let dv = standard_lengths(&g, LengthKind::DV).unwrap();
        let mg = synchronize(&g, &dv).unwrap();
        let c_sup = adaptedness(&g, &dv).c_sup;
        for x in 0..n {
            if g.is_frontier(x) {
                continue;
            }
            let star = mg.star(x).unwrap();
            let probs = exit_probabilities(&star);
            let pi_x: f64 = g.adjacency(x).iter().map(|&(_, e)| g.edges()[e].weight).sum();
            for (j, &(_, e)) in g.adjacency(x).iter().enumerate() {
                let jump = g.edges()[e].weight / pi_x;
                if (probs[j] - jump).abs() > 1e-12 {
                    errors.push(format!(
                        "graph {seed} vertex {x}: exit prob {} vs jump prob {jump}",
                        probs[j]
                    ));
                }
            }
            let t = pi_x * exit_time_mean(&star);
            if !(t >= 1.0 - 1e-9 && t <= c_sup + 1.0 + 1e-9) {
                errors.push(format!(
                    "graph {seed} vertex {x}: pi E T = {t} outside [1, {}]",
                    c_sup + 1.0
                ));
            }
        }
        let cb = coupled_lifetime_bounds(&g, &mg, 0, 900 + seed, 10_000).unwrap();
        for (step, (a, b)) in cb.a.iter().zip(&cb.b).enumerate() {
            if !(*a <= b * (1.0 + 1e-12) && *b <= (cb.c_sup + 1.0) * a * (1.0 + 1e-12)) {
                errors.push(format!(
                    "graph {seed} step {step}: sandwich violated (A = {a}, B = {b}, C = {})",
                    cb.c_sup
                ));
                break;
            }
        }
    }
    report(6, errors);
}

// ---------------------------------------------------------------------------
// Criterion 7: cycle covers. Matching-based feasibility agrees with brute
// force on every edge of every connected graph with <= 6 vertices; unit
// vertex weights are positive with vertex sums 1 on the triangle, C4, K4;
// correct infeasibility witnesses on K_{1,3} and paths.
// ---------------------------------------------------------------------------

fn unit_graph(n: usize, pairs: &[(usize, usize)]) -> WeightedGraph {
    WeightedGraph::new(
        n,
        pairs.iter().map(|&(u, v)| Edge { u, v, weight: 1.0 }).collect(),
        Vec::new(),
    )
    .unwrap()
}

#[test]
fn criterion_7_cycle_covers() {
    let mut errors = Vec::new();
    // Exhaustive comparison on all connected labeled graphs with <= 6
    // vertices.
    let mut checked = 0usize;
    for n in 2..=6usize {
        let all_pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).collect();
        for mask in 1u32..(1 << all_pairs.len()) {
            let pairs: Vec<(usize, usize)> = all_pairs
                .iter()
                .enumerate()
                .filter(|&(i, _)| mask >> i & 1 == 1)
                .map(|(_, &p)| p)
                .collect();
            // Connectivity via union-find over the selected edges.
            let mut root: Vec<usize> = (0..n).collect();
            fn find(root: &mut Vec<usize>, mut x: usize) -> usize {
                while root[x] != x {
                    root[x] = root[root[x]];
                    x = root[x];
                }
                x
            }
            for &(u, v) in &pairs {
                let (ru, rv) = (find(&mut root, u), find(&mut root, v));
                root[ru] = rv;
            }
            let r0 = find(&mut root, 0);
            if (1..n).any(|x| find(&mut root, x) != r0) {
                continue;
            }
            let g = unit_graph(n, &pairs);
            for e in 0..g.edge_count() {
                let fast = cycle_cover_feasible(&g, e).unwrap();
                let brute = cycle_cover_feasible_brute(&g, e).unwrap();
                if fast != brute {
                    errors.push(format!(
                        "n = {n} edges {pairs:?} edge {e}: matching {fast} vs brute {brute}"
                    ));
                }
            }
            checked += 1;
        }
    }
    assert!(checked > 25_000, "expected to enumerate all connected graphs, saw {checked}");
    // Unit vertex weights on feasible graphs.
    let triangle = unit_graph(3, &[(0, 1), (1, 2), (0, 2)]);
    let c4 = unit_graph(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]);
    let k4 = unit_graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    for (name, g) in [("triangle", &triangle), ("C4", &c4), ("K4", &k4)] {
        match unit_vertex_weights(g).unwrap() {
            CycleCoverResult::Feasible(w) => {
                if w.iter().any(|&c| c <= 0.0) {
                    errors.push(format!("{name}: non-positive edge weight in {w:?}"));
                }
                for x in 0..g.vertex_count() {
                    let sum: f64 =
                        g.adjacency(x).iter().map(|&(_, e)| w[e]).sum();
                    if (sum - 1.0).abs() > 1e-12 {
                        errors.push(format!("{name} vertex {x}: weight sum {sum} != 1"));
                    }
                }
            }
            CycleCoverResult::Infeasible { edge } => {
                errors.push(format!("{name}: unexpectedly infeasible at edge {edge}"));
            }
        }
    }
    // Witnesses on K_{1,3} and paths: the reported edge must itself fail the
    // brute-force cover test.
    let k13 = unit_graph(4, &[(0, 1), (0, 2), (0, 3)]);
    let p3 = unit_graph(3, &[(0, 1), (1, 2)]);
    let p4 = unit_graph(4, &[(0, 1), (1, 2), (2, 3)]);
    for (name, g) in [("K_{1,3}", &k13), ("P3", &p3), ("P4", &p4)] {
        match unit_vertex_weights(g).unwrap() {
            CycleCoverResult::Infeasible { edge } => {
                if cycle_cover_feasible_brute(g, edge).unwrap() {
                    errors.push(format!("{name}: witness edge {edge} is actually feasible"));
                }
            }
            CycleCoverResult::Feasible(w) => {
                errors.push(format!("{name}: unexpectedly feasible with {w:?}"));
            }
        }
    }
    // P4's only infeasible edge is the middle one.
    assert!(cycle_cover_feasible(&p4, 0).unwrap());
    assert!(!cycle_cover_feasible(&p4, 1).unwrap());
    assert!(cycle_cover_feasible(&p4, 2).unwrap());
    report(7, errors);
}

// ---------------------------------------------------------------------------
// Criterion 8: explosion signatures at a fixed master seed (cap 1e5, horizon
// 10): beta = 1.9 shows signature >= 0.5 with median-lifetime Cauchy
// stability <= 5% between caps 1e4 and 1e5; beta = 0.5 and the antitree
// r(n) = n + 1 show signature 0.
// ---------------------------------------------------------------------------
#[test]
fn criterion_8_explosion_signatures() {
    const MASTER: u64 = 0xE1;
    let mut errors = Vec::new();
    let g = generate_birth_death(1.9, 20_000).unwrap();
    let s = explosion_stats(&g, 0, 200, 10.0, 100_000, MASTER).unwrap();
    if s.signature_fraction < 0.5 {
        errors.push(format!("beta 1.9: signature {} < 0.5", s.signature_fraction));
    }
    match s.quantile_stability {
        Some(drift) if drift.abs() <= 0.05 => {}
        got => errors.push(format!("beta 1.9: median drift {got:?} not within 5%")),
    }
    let g = generate_birth_death(0.5, 20_000).unwrap();
    let s = explosion_stats(&g, 0, 200, 10.0, 100_000, MASTER).unwrap();
    if s.signature_fraction != 0.0 {
        errors.push(format!("beta 0.5: signature {} != 0", s.signature_fraction));
    }
    let g = generate_antitree(|n| n + 1, 120).unwrap();
    let s = explosion_stats(&g, 0, 200, 10.0, 100_000, MASTER).unwrap();
    if s.signature_fraction != 0.0 || s.raw_cap_fraction != 0.0 {
        errors.push(format!(
            "antitree: signature {} raw {} (want both 0)",
            s.signature_fraction, s.raw_cap_fraction
        ));
    }
    report(8, errors);
}

// ---------------------------------------------------------------------------
// Criterion 9: the antitree with r(n) = n + 1 admits no strongly adapted
// metric: under d_V lengths, c_inf <= 0.01 once the truncation is deep
// enough, while C_sup <= 1 throughout.
// ---------------------------------------------------------------------------
#[test]
fn criterion_9_strong_adaptedness_counterexample() {
    let mut errors = Vec::new();
    let mut found = None;
    for n in (30..=300usize).step_by(30) {
        let g = generate_antitree(|k| k + 1, n).unwrap();
        let dv = standard_lengths(&g, LengthKind::DV).unwrap();
        let rep = adaptedness(&g, &dv);
        if rep.c_sup > 1.0 + 1e-12 {
            errors.push(format!("antitree N = {n}: C_sup = {} > 1", rep.c_sup));
        }
        if rep.c_inf <= 0.01 {
            found = Some((n, rep.c_inf));
            break;
        }
    }
    match found {
        Some((n, c_inf)) => println!("  (c_inf = {c_inf:.5} at N = {n})"),
        None => errors.push("no truncation size with c_inf <= 0.01 found up to N = 300".into()),
    }
    report(9, errors);
}
