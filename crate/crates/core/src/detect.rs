//! Randomized cycle detection over the stable vertices.
//!
//! The walk starts at a uniformly random stable vertex and keeps stepping to
//! a uniformly random stable outneighbor it has not visited yet. When none is
//! left it closes onto the visited stable outneighbor that lies furthest back
//! along the walk. Every vertex is visited at most once, so a detection costs
//! time linear in `|P_S|` and only ever reads the adjacency of visited vertices.

use thiserror::Error;

use crate::graph::{Cycle, NiceWeightParams, ParamError, VertexId, WeightedDigraph};
use crate::rng::{RngSeed, SeededRng};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DetectError {
    #[error("graph has no stable vertices")]
    NoStableVertices,
    #[error("start vertex {0} is not a stable vertex of the graph")]
    StartNotStable(VertexId),
    #[error("dead end at vertex {vertex} (step {step}): no stable outneighbors")]
    DeadEnd { vertex: VertexId, step: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectionResult {
    /// The closed cycle `v_i, ..., v_k` (closing edge `v_k -> v_i` implied).
    pub cycle: Cycle,
    /// Full walk `v_0, ..., v_k` in visiting order, before closure.
    pub walk_trace: Vec<VertexId>,
}

impl DetectionResult {
    /// Walk prefix `v_0, ..., v_{i-1}` that is not part of the cycle.
    pub fn discarded_prefix(&self) -> &[VertexId] {
        &self.walk_trace[..self.walk_trace.len() - self.cycle.len()]
    }
}

/// Runs one detection with a fresh RNG stream seeded by `seed`.
pub fn detect_cycle(g: &WeightedDigraph, seed: RngSeed) -> Result<DetectionResult, DetectError> {
    let mut rng = SeededRng::new(seed);
    detect_cycle_with(g, &mut rng)
}

pub fn detect_cycle_with(g: &WeightedDigraph, rng: &mut SeededRng) -> Result<DetectionResult, DetectError> {
    let stable = g.stable_vertices();
    if stable.is_empty() {
        return Err(DetectError::NoStableVertices);
    }
    let start = *rng.choose(stable);
    detect_cycle_from(g, start, rng)
}

/// Runs the walk from a fixed start vertex.
pub fn detect_cycle_from(
    g: &WeightedDigraph,
    start: VertexId,
    rng: &mut SeededRng,
) -> Result<DetectionResult, DetectError> {
    if !g.is_stable(start) {
        return Err(DetectError::StartNotStable(start));
    }
    const UNVISITED: usize = usize::MAX;
    let mut position = vec![UNVISITED; g.vertex_count()];
    let mut walk = vec![start];
    position[start.0] = 0;
    let mut fresh: Vec<VertexId> = Vec::new();

    loop {
        let current = *walk.last().expect("walk is never empty");
        fresh.clear();
        fresh.extend(g.stable_outneighbors_iter(current).filter(|v| position[v.0] == UNVISITED));
        if !fresh.is_empty() {
            let next = *rng.choose(&fresh);
            position[next.0] = walk.len();
            walk.push(next);
            continue;
        }
        // every stable outneighbor is already on the walk; close onto the earliest one
        let close_at = g
            .stable_outneighbors_iter(current)
            .map(|v| position[v.0])
            .min()
            .ok_or(DetectError::DeadEnd { vertex: current, step: walk.len() - 1 })?;
        let cycle = Cycle { vertices: walk[close_at..].to_vec() };
        return Ok(DetectionResult { cycle, walk_trace: walk });
    }
}

/// Lower bound `1 - exp(-½ ((α-β)/(A+B))² ⌊Φ(|P_S|)⌋)` on the probability that
/// a detected cycle is Δ-contractive.
pub fn success_probability_bound(p: &NiceWeightParams, phi_floor: usize) -> Result<f64, ParamError> {
    p.validate()?;
    let ratio = (p.alpha - p.beta) / (p.a + p.b);
    let exponent = -0.5 * ratio * ratio * phi_floor as f64;
    Ok(-exponent.exp_m1())
}
