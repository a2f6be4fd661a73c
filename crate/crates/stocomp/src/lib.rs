//! Stochastic completeness of weighted graphs.
//!
//! This crate decides and demonstrates stochastic completeness (non-explosion)
//! of the variable-speed random walk on weighted graphs. It provides:
//!
//! - [`graph_core`]: the weighted-graph data model and generators for the
//!   standard families (birth-death chains, spherically symmetric trees,
//!   antitrees, lattice patches).
//! - [`adapted_metrics`]: edge-length constructions (`d_E`, `d_V`, `d_W`,
//!   metric-induced), path metrics, adaptedness reports, and the intrinsic
//!   metric `d_I` computed by convex optimization.
//! - [`metric_graph`]: weighted metric graphs with loops, closed-form exit
//!   probabilities and exit-time moments for the Brownian motion, measures,
//!   synchronization with a given walk, and disjoint cycle covers.
//! - [`volume_growth`]: ball volumes, the volume-growth criterion integral,
//!   growth classification, and exact completeness tests for the families.
//! - [`simulate`]: reproducible Monte Carlo engines cross-validating the
//!   closed forms and exhibiting explosion signatures.
//!
//! Infinite graphs are always represented as finite truncations with an
//! explicit frontier; every computation that could depend on vertices beyond
//! the frontier either flags contamination or fails loudly.

pub mod adapted_metrics;
pub mod graph_core;
pub mod metric_graph;
pub mod rng;
pub mod simulate;
pub mod volume_growth;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex id {0}")]
    UnknownVertex(usize),
    #[error("unknown edge id {0}")]
    UnknownEdge(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("graph validation failed: {0}")]
    InvalidGraph(String),
    #[error("estimated size {estimated} exceeds memory guard cap {cap}")]
    MemoryGuard { estimated: u128, cap: u64 },
    #[error(
        "truncation too small: computation reached the frontier (suggest regenerating with truncation >= {suggested})"
    )]
    TruncationTooSmall { suggested: usize },
    #[error("distance to vertex {0} is frontier-contaminated")]
    FrontierContaminated(usize),
    #[error("solver did not converge within {iterations} iterations (best feasible value {best})")]
    NonConvergence { iterations: usize, best: f64 },
    #[error("step h={h} too coarse: need h <= min edge length / 20 = {max_h}")]
    StepTooCoarse { h: f64, max_h: f64 },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
