//! Reproducible Monte Carlo engines: VSRW/CSRW trajectories with explosion
//! diagnostics, a discretized Brownian-on-star oracle validating the closed
//! forms, and the coupled lifetime comparison.
//!
//! All randomness flows through the counter-based generator in [`crate::rng`];
//! replica `i` of a run with master seed `s` always uses the derived seed
//! `derive_seed(s, i)`, so results are independent of worker count and
//! scheduling.

use crate::graph_core::{vertex_measure, WeightedGraph};
use crate::metric_graph::{exit_time_mean, MetricGraph, StarView};
use crate::rng::{derive_seed, CounterRng};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    HorizonReached,
    JumpCap,
    FrontierHit,
}

/// One simulated walk: jump chain, holding times, cumulative lifetime.
#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryRecord {
    /// Visited vertices `Z_0, Z_1, ...` (`Z_0 = x0`).
    pub vertices: Vec<usize>,
    /// Holding times; `sigmas[n]` is the time spent at `vertices[n]`.
    pub sigmas: Vec<f64>,
    /// Cumulative lifetime after each completed holding period.
    pub cumulative: Vec<f64>,
    pub termination: Termination,
    pub seed: u64,
}

impl TrajectoryRecord {
    /// CSV export: `n,vertex,sigma_n,cumtime`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,vertex,sigma_n,cumtime\n");
        for (n, ((&v, &s), &c)) in
            self.vertices.iter().zip(&self.sigmas).zip(&self.cumulative).enumerate()
        {
            out.push_str(&format!("{n},{v},{s:.16e},{c:.16e}\n"));
        }
        out
    }

    pub fn lifetime(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }
}

/// Holding-time scale: VSRW uses rate `pi_x`; CSRW with vertex measure
/// `theta` uses rate `pi_x / theta_x`.
enum Speed<'a> {
    Variable,
    TimeChanged(&'a [f64]),
}

fn trajectory(
    g: &WeightedGraph,
    speed: &Speed<'_>,
    x0: usize,
    seed: u64,
    horizon: f64,
    jump_cap: usize,
) -> Result<TrajectoryRecord> {
    if x0 >= g.vertex_count() {
        return Err(Error::UnknownVertex(x0));
    }
    if let Speed::TimeChanged(theta) = speed {
        if theta.len() != g.vertex_count() || theta.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::InvalidParameter("theta must be positive on every vertex".into()));
        }
    }
    let measures: Vec<f64> =
        (0..g.vertex_count()).map(|x| vertex_measure(g, x).unwrap_or(0.0)).collect();
    let mut rng = CounterRng::new(seed);
    let mut vertices = vec![x0];
    let mut sigmas = Vec::new();
    let mut cumulative = Vec::new();
    let mut t = 0.0f64;
    let mut x = x0;
    let termination = loop {
        if g.is_frontier(x) {
            break Termination::FrontierHit;
        }
        if sigmas.len() >= jump_cap {
            break Termination::JumpCap;
        }
        let rate = match speed {
            Speed::Variable => measures[x],
            Speed::TimeChanged(theta) => measures[x] / theta[x],
        };
        let sigma = rng.exponential(rate);
        if t + sigma >= horizon {
            // Still sitting at x when the horizon passes; the pending jump
            // never happens.
            break Termination::HorizonReached;
        }
        t += sigma;
        let mut pick = rng.uniform() * measures[x];
        let mut next = x;
        for &(y, e) in g.adjacency(x) {
            pick -= g.edges()[e].weight;
            next = y;
            if pick <= 0.0 {
                break;
            }
        }
        sigmas.push(sigma);
        cumulative.push(t);
        vertices.push(next);
        x = next;
    };
    Ok(TrajectoryRecord { vertices, sigmas, cumulative, termination, seed })
}

/// Variable-speed walk: holds at `x` for `Exp(pi_x)`, jumps to `y` with
/// probability `pi_xy / pi_x`. Stops at the horizon, the jump cap, or on
/// frontier contact (censored, never silently continued).
pub fn vsrw_trajectory(
    g: &WeightedGraph,
    x0: usize,
    seed: u64,
    horizon: f64,
    jump_cap: usize,
) -> Result<TrajectoryRecord> {
    trajectory(g, &Speed::Variable, x0, seed, horizon, jump_cap)
}

/// Time-changed walk with holding rate `pi_x / theta_x`; same jump chain as
/// the VSRW (`theta = 1` reproduces it call-for-call, `theta = pi` is the
/// constant-speed walk).
pub fn csrw_trajectory(
    g: &WeightedGraph,
    theta: &[f64],
    x0: usize,
    seed: u64,
    horizon: f64,
    jump_cap: usize,
) -> Result<TrajectoryRecord> {
    trajectory(g, &Speed::TimeChanged(theta), x0, seed, horizon, jump_cap)
}

/// Summary of one replica of [`explosion_stats`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReplicaSummary {
    pub termination: Termination,
    pub jumps: usize,
    pub lifetime: f64,
    /// Lifetime after `jump_cap / 10` jumps, when the replica got that far.
    pub lifetime_at_submark: Option<f64>,
}

/// Relative quantile drift above which lifetimes are not considered
/// Cauchy-stable across caps.
pub const STABILITY_THRESHOLD: f64 = 0.05;

/// Aggregate explosion diagnostics over independent replicas.
///
/// Explosion cannot be observed literally in finite simulation. The
/// *explosion signature* is the fraction of replicas that hit the jump cap
/// with cumulative lifetime below the horizon, gated by Cauchy stability of
/// the median lifetime between caps `jump_cap/10` and `jump_cap`: when the
/// median still grows by more than [`STABILITY_THRESHOLD`] between the two
/// caps, the lifetimes have not converged and the signature is reported as 0.
#[derive(Debug, Clone, Serialize)]
pub struct ExplosionStats {
    pub replicas: usize,
    pub horizon: f64,
    pub jump_cap: usize,
    pub master_seed: u64,
    pub per_replica: Vec<ReplicaSummary>,
    /// `(q, lifetime quantile)` at the full cap, over cap-reaching replicas.
    pub lifetime_quantiles: Vec<(f64, f64)>,
    /// Same quantiles at the `jump_cap/10` submark.
    pub submark_quantiles: Vec<(f64, f64)>,
    /// Fraction of replicas whose lifetime reached the horizon.
    pub survival_fraction: f64,
    /// Fraction hitting the cap with lifetime below the horizon (ungated).
    pub raw_cap_fraction: f64,
    /// `(median(cap) - median(cap/10)) / median(cap)` over cap-reaching
    /// replicas; `None` when no replica reached the cap.
    pub quantile_stability: Option<f64>,
    pub stability_threshold: f64,
    /// The gated explosion signature.
    pub signature_fraction: f64,
}

const QUANTILES: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx]
}

pub fn explosion_stats(
    g: &WeightedGraph,
    x0: usize,
    replicas: usize,
    horizon: f64,
    jump_cap: usize,
    master_seed: u64,
) -> Result<ExplosionStats> {
    if replicas == 0 {
        return Err(Error::InvalidParameter("need at least one replica".into()));
    }
    if x0 >= g.vertex_count() {
        return Err(Error::UnknownVertex(x0));
    }
    let measures: Vec<f64> =
        (0..g.vertex_count()).map(|x| vertex_measure(g, x).unwrap_or(0.0)).collect();
    let submark = (jump_cap / 10).max(1);
    let per_replica: Vec<ReplicaSummary> = (0..replicas as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = CounterRng::new(derive_seed(master_seed, i));
            let mut t = 0.0f64;
            let mut x = x0;
            let mut jumps = 0usize;
            let mut at_submark = None;
            let termination = loop {
                if g.is_frontier(x) {
                    break Termination::FrontierHit;
                }
                if jumps >= jump_cap {
                    break Termination::JumpCap;
                }
                let sigma = rng.exponential(measures[x]);
                if t + sigma >= horizon {
                    break Termination::HorizonReached;
                }
                t += sigma;
                let mut pick = rng.uniform() * measures[x];
                for &(y, e) in g.adjacency(x) {
                    pick -= g.edges()[e].weight;
                    x = y;
                    if pick <= 0.0 {
                        break;
                    }
                }
                jumps += 1;
                if jumps == submark {
                    at_submark = Some(t);
                }
            };
            ReplicaSummary { termination, jumps, lifetime: t, lifetime_at_submark: at_submark }
        })
        .collect();

    let mut at_cap: Vec<f64> = per_replica
        .iter()
        .filter(|r| r.termination == Termination::JumpCap)
        .map(|r| r.lifetime)
        .collect();
    let mut at_sub: Vec<f64> = per_replica
        .iter()
        .filter(|r| r.termination == Termination::JumpCap)
        .filter_map(|r| r.lifetime_at_submark)
        .collect();
    at_cap.sort_by(f64::total_cmp);
    at_sub.sort_by(f64::total_cmp);
    let survival_fraction = per_replica
        .iter()
        .filter(|r| r.termination == Termination::HorizonReached)
        .count() as f64
        / replicas as f64;
    let raw_cap_fraction = per_replica
        .iter()
        .filter(|r| r.termination == Termination::JumpCap && r.lifetime < horizon)
        .count() as f64
        / replicas as f64;
    let quantile_stability = if at_cap.is_empty() || at_sub.is_empty() {
        None
    } else {
        let med_cap = quantile(&at_cap, 0.5);
        let med_sub = quantile(&at_sub, 0.5);
        Some((med_cap - med_sub) / med_cap)
    };
    let stable = quantile_stability.map_or(false, |s| s.abs() <= STABILITY_THRESHOLD);
    Ok(ExplosionStats {
        replicas,
        horizon,
        jump_cap,
        master_seed,
        lifetime_quantiles: QUANTILES.iter().map(|&q| (q, quantile(&at_cap, q))).collect(),
        submark_quantiles: QUANTILES.iter().map(|&q| (q, quantile(&at_sub, q))).collect(),
        survival_fraction,
        raw_cap_fraction,
        quantile_stability,
        stability_threshold: STABILITY_THRESHOLD,
        signature_fraction: if stable { raw_cap_fraction } else { 0.0 },
        per_replica,
    })
}

/// Empirical exit law from the discretized star walk, with standard errors.
#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalExitLaw {
    pub probabilities: Vec<f64>,
    pub prob_se: Vec<f64>,
    pub mean: f64,
    pub mean_se: f64,
    pub second_moment: f64,
    pub second_moment_se: f64,
    pub replicas: usize,
    pub h: f64,
}

/// Discretized Brownian motion on a star: interior steps of size `h_i`
/// (edge lengths rounded to a whole number of steps) take time
/// `omega_i h_i^2`; at the center an incident edge is chosen with probability
/// `q_e / sum q` (loop counted via `q = 2p`) and the step takes the
/// q-weighted average time increment. Walk ends on hitting a far endpoint.
pub fn star_walk_oracle(
    s: &StarView,
    h: f64,
    seed: u64,
    replicas: usize,
) -> Result<EmpiricalExitLaw> {
    let min_ell = s
        .edges
        .iter()
        .map(|e| e.ell)
        .chain(s.loop_edge.iter().map(|l| l.ell))
        .fold(f64::INFINITY, f64::min);
    if h > min_ell / 20.0 {
        return Err(Error::StepTooCoarse { h, max_h: min_ell / 20.0 });
    }
    if replicas == 0 {
        return Err(Error::InvalidParameter("need at least one replica".into()));
    }
    let k = s.k();
    // Per-edge grids; slot k (if present) is the loop.
    let mut steps: Vec<u64> = Vec::with_capacity(k + 1);
    let mut dt: Vec<f64> = Vec::with_capacity(k + 1);
    let mut qs: Vec<f64> = Vec::with_capacity(k + 1);
    for e in s.edges.iter().chain(s.loop_edge.iter()) {
        let n = (e.ell / h).round().max(1.0) as u64;
        let h_e = e.ell / n as f64;
        steps.push(n);
        dt.push(e.omega * h_e * h_e);
        qs.push(e.q);
    }
    let q_total: f64 = qs.iter().sum();
    let center_dt: f64 =
        qs.iter().zip(&dt).map(|(&q, &d)| q * d).sum::<f64>() / q_total;
    // Cumulative edge-choice thresholds.
    let cum: Vec<f64> = qs
        .iter()
        .scan(0.0, |acc, &q| {
            *acc += q;
            Some(*acc / q_total)
        })
        .collect();
    let has_loop = s.loop_edge.is_some();

    struct Partial {
        counts: Vec<u64>,
        sum_t: f64,
        sum_t2: f64,
    }
    let chunk = 1024usize;
    let chunks = (replicas + chunk - 1) / chunk;
    let partials: Vec<Partial> = (0..chunks as u64)
        .into_par_iter()
        .map(|c| {
            let lo = c as usize * chunk;
            let hi = (lo + chunk).min(replicas);
            let mut counts = vec![0u64; k];
            let (mut sum_t, mut sum_t2) = (0.0f64, 0.0f64);
            for i in lo..hi {
                let mut rng = CounterRng::new(derive_seed(seed, i as u64));
                let mut t = 0.0f64;
                let (exit, time) = 'walk: loop {
                    // At the center: choose an edge.
                    t += center_dt;
                    let u = rng.uniform();
                    let mut edge = cum.partition_point(|&c| c < u);
                    if edge >= cum.len() {
                        edge = cum.len() - 1;
                    }
                    let n = steps[edge];
                    let d = dt[edge];
                    let is_loop = has_loop && edge == k;
                    let mut j: u64 = 1;
                    if n == 1 {
                        if !is_loop {
                            break 'walk (edge, t);
                        }
                        continue 'walk;
                    }
                    // Interior: +-1 steps from a 64-bit pool.
                    let mut pool = rng.next_u64();
                    let mut bits = 64u32;
                    let mut local: u64 = 0;
                    loop {
                        if bits == 0 {
                            pool = rng.next_u64();
                            bits = 64;
                        }
                        let up = pool & 1;
                        pool >>= 1;
                        bits -= 1;
                        local += 1;
                        j = j + 2 * up - 1;
                        if j == n {
                            t += local as f64 * d;
                            if is_loop {
                                continue 'walk;
                            }
                            break 'walk (edge, t);
                        }
                        if j == 0 {
                            t += local as f64 * d;
                            continue 'walk;
                        }
                    }
                };
                counts[exit] += 1;
                sum_t += time;
                sum_t2 += time * time;
            }
            Partial { counts, sum_t, sum_t2 }
        })
        .collect();

    let mut counts = vec![0u64; k];
    let (mut sum_t, mut sum_t2) = (neumaier(), neumaier());
    for p in &partials {
        for (c, &pc) in counts.iter_mut().zip(&p.counts) {
            *c += pc;
        }
        sum_t.add(p.sum_t);
        sum_t2.add(p.sum_t2);
    }
    let n = replicas as f64;
    let mean = sum_t.total() / n;
    let second = sum_t2.total() / n;
    let var = (second - mean * mean).max(0.0);
    let probabilities: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    let prob_se = probabilities.iter().map(|&p| (p * (1.0 - p) / n).sqrt()).collect();
    Ok(EmpiricalExitLaw {
        probabilities,
        prob_se,
        mean,
        mean_se: (var / n).sqrt(),
        second_moment: second,
        // se of the second moment via its own sample variance proxy.
        second_moment_se: ((sum_t2.total() / n) / n.sqrt()).max(0.0),
        replicas,
        h,
    })
}

/// Neumaier compensated accumulator, so parallel aggregation stays
/// order-independent in practice.
struct Neumaier {
    sum: f64,
    comp: f64,
}

fn neumaier() -> Neumaier {
    Neumaier { sum: 0.0, comp: 0.0 }
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Pathwise conditional-mean sums of the coupled walks: after `N` steps of
/// the shared jump chain `Z`,
/// `A_N = sum 1/pi_{Z_n}` (walk conditional means) and
/// `B_N = sum E^{Z_n} T` (metric-graph conditional means); synchronization
/// guarantees `A_N <= B_N <= (C_sup + 1) A_N` at every `N`.
#[derive(Debug, Clone, Serialize)]
pub struct CoupledBounds {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c_sup: f64,
    pub steps: usize,
    pub censored: bool,
}

pub fn coupled_lifetime_bounds(
    g: &WeightedGraph,
    mg: &MetricGraph,
    x0: usize,
    seed: u64,
    n_jumps: usize,
) -> Result<CoupledBounds> {
    if x0 >= g.vertex_count() {
        return Err(Error::UnknownVertex(x0));
    }
    if mg.vertex_count() != g.vertex_count() || mg.edges().len() != g.edge_count() {
        return Err(Error::InvalidParameter("metric graph does not match the weighted graph".into()));
    }
    for (me, e) in mg.edges().iter().zip(g.edges()) {
        if me.u != e.u || me.v != e.v || (me.params.p - e.weight).abs() > 1e-12 * e.weight {
            return Err(Error::InvalidParameter(
                "metric graph is not synchronized with this graph".into(),
            ));
        }
    }
    let measures: Vec<f64> =
        (0..g.vertex_count()).map(|x| vertex_measure(g, x).unwrap_or(0.0)).collect();
    // Per-vertex metric-graph conditional means, computed lazily.
    let mut mg_mean: Vec<Option<f64>> = vec![None; g.vertex_count()];
    let mut c_sup = 0.0f64;
    for x in 0..g.vertex_count() {
        if !g.is_frontier(x) {
            let s: f64 = g
                .adjacency(x)
                .iter()
                .map(|&(_, e)| {
                    let p = &mg.edges()[e].params;
                    p.omega * p.p * p.ell
                })
                .sum();
            c_sup = c_sup.max(s);
        }
    }
    let mut rng = CounterRng::new(seed);
    let mut a = Vec::with_capacity(n_jumps);
    let mut b = Vec::with_capacity(n_jumps);
    let (mut sa, mut sb) = (0.0f64, 0.0f64);
    let mut x = x0;
    let mut censored = false;
    for _ in 0..n_jumps {
        if g.is_frontier(x) {
            censored = true;
            break;
        }
        sa += 1.0 / measures[x];
        let m = match mg_mean[x] {
            Some(m) => m,
            None => {
                let m = exit_time_mean(&mg.star(x)?);
                mg_mean[x] = Some(m);
                m
            }
        };
        sb += m;
        a.push(sa);
        b.push(sb);
        let mut pick = rng.uniform() * measures[x];
        for &(y, e) in g.adjacency(x) {
            pick -= g.edges()[e].weight;
            x = y;
            if pick <= 0.0 {
                break;
            }
        }
    }
    let steps = a.len();
    Ok(CoupledBounds { a, b, c_sup, steps, censored })
}
