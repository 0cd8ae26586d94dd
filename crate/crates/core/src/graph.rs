//! The weighted directed graph underlying a switched system.
//!
//! Vertices are subsystems, edges are admissible switches. A stable vertex
//! carries weight `-|ln λ|` and an unstable one `+|ln λ|`; an edge `(i, j)`
//! carries `ln μ_ij`. The graph also stores the admissible dwell window.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for VertexId {
    fn from(v: usize) -> Self {
        VertexId(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
}

/// Admissible dwell times `[min : max]`, in time steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DwellWindow {
    pub min: u32,
    pub max: u32,
}

impl DwellWindow {
    pub fn new(min: u32, max: u32) -> Result<Self, GraphError> {
        if min == 0 || min > max {
            return Err(GraphError::InvalidWindow { min, max });
        }
        Ok(Self { min, max })
    }

    pub fn contains(&self, dwell: u32) -> bool {
        (self.min..=self.max).contains(&dwell)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: VertexId,
    pub to: VertexId,
    pub weight: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("invalid dwell window [{min}:{max}] (need 1 <= min <= max)")]
    InvalidWindow { min: u32, max: u32 },
    #[error("vertex {0} is listed as both stable and unstable")]
    PartitionOverlap(VertexId),
    #[error("vertex {0} is neither stable nor unstable (ids must be 0..N)")]
    PartitionGap(VertexId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("vertex {0} has no weight")]
    MissingVertexWeight(VertexId),
    #[error("vertex {vertex}: weight {weight} has the wrong sign for a {stability:?} vertex")]
    VertexWeightSign { vertex: VertexId, weight: f64, stability: Stability },
    #[error("non-finite weight {weight} on {what}")]
    NonFinite { what: String, weight: f64 },
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(VertexId, VertexId),
    #[error("rate λ = {rate} of vertex {vertex} must be positive and different from 1")]
    InvalidRate { vertex: VertexId, rate: f64 },
    #[error("jump factor μ = {mu} on ({from}, {to}) must be >= 1")]
    InvalidJump { from: VertexId, to: VertexId, mu: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CycleError {
    #[error("a cycle needs at least 2 vertices, got {0}")]
    TooShort(usize),
    #[error("vertex {0} appears more than once")]
    RepeatedVertex(VertexId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("missing edge ({0}, {1})")]
    MissingEdge(VertexId, VertexId),
    #[error("cycle has {vertices} vertices but {dwells} dwell parameters")]
    DwellCountMismatch { vertices: usize, dwells: usize },
    #[error("dwell {dwell} on vertex {vertex} is outside [{min}:{max}]")]
    DwellOutOfWindow { vertex: VertexId, dwell: u32, min: u32, max: u32 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("need 0 < beta < B, got beta = {beta}, B = {b}")]
    Beta { beta: f64, b: f64 },
    #[error("need alpha < beta, got alpha = {alpha}, beta = {beta}")]
    Alpha { alpha: f64, beta: f64 },
    #[error("need A > 0, got {0}")]
    EdgeBound(f64),
    #[error("Delta = {delta} is outside the dwell window [{min}:{max}]")]
    Delta { delta: u32, min: u32, max: u32 },
}

/// A simple directed cycle `v_0 -> v_1 -> ... -> v_{n-1} -> v_0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cycle {
    pub vertices: Vec<VertexId>,
}

impl Cycle {
    pub fn new(vertices: impl IntoIterator<Item = usize>) -> Self {
        Self { vertices: vertices.into_iter().map(VertexId).collect() }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Edges of the cycle in order, including the closing edge.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |k| (self.vertices[k], self.vertices[(k + 1) % n]))
    }

    /// Checks length, distinctness and that every edge exists in `g`.
    pub fn validate(&self, g: &WeightedDigraph) -> Result<(), CycleError> {
        if self.vertices.len() < 2 {
            return Err(CycleError::TooShort(self.vertices.len()));
        }
        let mut seen = vec![false; g.vertex_count()];
        for &v in &self.vertices {
            if v.0 >= g.vertex_count() {
                return Err(CycleError::UnknownVertex(v));
            }
            if std::mem::replace(&mut seen[v.0], true) {
                return Err(CycleError::RepeatedVertex(v));
            }
        }
        for (a, b) in self.edges() {
            if g.edge_weight(a, b).is_none() {
                return Err(CycleError::MissingEdge(a, b));
            }
        }
        Ok(())
    }

    /// Same cycle, rotated to start at its smallest vertex id.
    pub fn canonical(&self) -> Cycle {
        let Some(pos) = self.vertices.iter().enumerate().min_by_key(|(_, v)| **v).map(|(i, _)| i) else {
            return self.clone();
        };
        let mut vertices = self.vertices.clone();
        vertices.rotate_left(pos);
        Cycle { vertices }
    }
}

/// A cycle together with its per-vertex dwell (Δ) parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimedCycle {
    pub cycle: Cycle,
    pub dwell: Vec<u32>,
}

impl TimedCycle {
    pub fn new(cycle: Cycle, dwell: Vec<u32>) -> Self {
        Self { cycle, dwell }
    }

    pub fn uniform(cycle: Cycle, delta: u32) -> Self {
        let dwell = vec![delta; cycle.len()];
        Self { cycle, dwell }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.cycle.vertices
    }

    pub fn len(&self) -> usize {
        self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycle.is_empty()
    }

    /// Total dwell over one traversal, `Δ_W = Σ Δ_{v_k}`.
    pub fn total_dwell(&self) -> u64 {
        self.dwell.iter().map(|&d| u64::from(d)).sum()
    }

    /// Checks the dwell parameters alone against a window.
    pub fn validate_dwell(&self, window: DwellWindow) -> Result<(), CycleError> {
        if self.cycle.len() < 2 {
            return Err(CycleError::TooShort(self.cycle.len()));
        }
        if self.dwell.len() != self.cycle.len() {
            return Err(CycleError::DwellCountMismatch { vertices: self.cycle.len(), dwells: self.dwell.len() });
        }
        for (&v, &d) in self.cycle.vertices.iter().zip(&self.dwell) {
            if !window.contains(d) {
                return Err(CycleError::DwellOutOfWindow { vertex: v, dwell: d, min: window.min, max: window.max });
            }
        }
        Ok(())
    }

    pub fn validate(&self, g: &WeightedDigraph) -> Result<(), CycleError> {
        self.cycle.validate(g)?;
        self.validate_dwell(g.window())
    }
}

/// Parameters of the nice Δ-weighting condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NiceWeightParams {
    pub delta: u32,
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
}

impl NiceWeightParams {
    /// Checks `0 < beta < B`, `alpha < beta` and `A > 0`.
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.beta > 0.0 && self.beta < self.b) {
            return Err(ParamError::Beta { beta: self.beta, b: self.b });
        }
        if self.alpha.is_nan() || self.alpha >= self.beta {
            return Err(ParamError::Alpha { alpha: self.alpha, beta: self.beta });
        }
        if self.a.is_nan() || self.a <= 0.0 {
            return Err(ParamError::EdgeBound(self.a));
        }
        Ok(())
    }

    pub fn validate_in(&self, window: DwellWindow) -> Result<(), ParamError> {
        self.validate()?;
        if !window.contains(self.delta) {
            return Err(ParamError::Delta { delta: self.delta, min: window.min, max: window.max });
        }
        Ok(())
    }
}

/// A monotone increasing function `Φ: ℕ → ℝ` controlling edge density.
pub trait GrowthFn {
    fn eval(&self, r: usize) -> f64;

    /// `⌊Φ(r)⌋`, clamped at zero.
    fn floor_at(&self, r: usize) -> usize {
        let v = self.eval(r).floor();
        if v > 0.0 {
            v as usize
        } else {
            0
        }
    }
}

impl<F: Fn(usize) -> f64> GrowthFn for F {
    fn eval(&self, r: usize) -> f64 {
        self(r)
    }
}

/// `Φ(r) = coeff · √r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqrtGrowth {
    pub coeff: f64,
}

impl GrowthFn for SqrtGrowth {
    fn eval(&self, r: usize) -> f64 {
        self.coeff * (r as f64).sqrt()
    }
}

/// Outcome of the boundedness part of the nice Δ-weighting check.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct WeightBoundReport {
    pub vertices_checked: usize,
    pub edges_checked: usize,
    /// Vertices with `|w(j)|·Δ` outside `(0, B]`, with the offending product.
    pub vertex_violations: Vec<(VertexId, f64)>,
    /// Edges with weight outside `[-A, A]`.
    pub edge_violations: Vec<(VertexId, VertexId, f64)>,
}

impl WeightBoundReport {
    pub fn all_pass(&self) -> bool {
        self.vertex_violations.is_empty() && self.edge_violations.is_empty()
    }
}

/// Immutable weighted digraph. Vertex ids are `0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDigraph {
    stability: Vec<Stability>,
    vertex_weight: Vec<f64>,
    // sorted by target id
    out: Vec<Vec<(VertexId, f64)>>,
    stable: Vec<VertexId>,
    window: DwellWindow,
}

impl WeightedDigraph {
    /// Builds a graph from an explicit partition, signed vertex weights and edges.
    ///
    /// Stable vertices need weight `<= 0`, unstable ones `>= 0`. Edge weights
    /// may be any finite number; use [`WeightedDigraph::from_rates`] to build
    /// from Lyapunov rates and jump factors, which enforces `μ >= 1`.
    pub fn new(
        stable: &[VertexId],
        unstable: &[VertexId],
        vertex_weights: &[f64],
        edges: &[Edge],
        window: DwellWindow,
    ) -> Result<Self, GraphError> {
        DwellWindow::new(window.min, window.max)?;
        let n = stable.len() + unstable.len();
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut stability: Vec<Option<Stability>> = vec![None; n];
        for (set, tag) in [(stable, Stability::Stable), (unstable, Stability::Unstable)] {
            for &v in set {
                let slot = stability.get_mut(v.0).ok_or(GraphError::UnknownVertex(v))?;
                if slot.is_some() {
                    return Err(GraphError::PartitionOverlap(v));
                }
                *slot = Some(tag);
            }
        }
        let stability: Vec<Stability> = stability
            .into_iter()
            .enumerate()
            .map(|(i, s)| s.ok_or(GraphError::PartitionGap(VertexId(i))))
            .collect::<Result<_, _>>()?;

        if vertex_weights.len() != n {
            let missing = vertex_weights.len().min(n);
            return Err(if vertex_weights.len() < n {
                GraphError::MissingVertexWeight(VertexId(missing))
            } else {
                GraphError::UnknownVertex(VertexId(n))
            });
        }
        for (i, (&w, &s)) in vertex_weights.iter().zip(&stability).enumerate() {
            if !w.is_finite() {
                return Err(GraphError::NonFinite { what: format!("vertex {i}"), weight: w });
            }
            let ok = match s {
                Stability::Stable => w <= 0.0,
                Stability::Unstable => w >= 0.0,
            };
            if !ok {
                return Err(GraphError::VertexWeightSign { vertex: VertexId(i), weight: w, stability: s });
            }
        }

        let mut out: Vec<Vec<(VertexId, f64)>> = vec![Vec::new(); n];
        for e in edges {
            for v in [e.from, e.to] {
                if v.0 >= n {
                    return Err(GraphError::UnknownVertex(v));
                }
            }
            if e.from == e.to {
                return Err(GraphError::SelfLoop(e.from));
            }
            if !e.weight.is_finite() {
                return Err(GraphError::NonFinite { what: format!("edge ({}, {})", e.from, e.to), weight: e.weight });
            }
            out[e.from.0].push((e.to, e.weight));
        }
        for (i, list) in out.iter_mut().enumerate() {
            list.sort_by_key(|&(t, _)| t);
            if let Some(w) = list.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(GraphError::DuplicateEdge(VertexId(i), w[0].0));
            }
        }
        let stable_ids = (0..n).filter(|&i| stability[i] == Stability::Stable).map(VertexId).collect();
        Ok(Self { stability, vertex_weight: vertex_weights.to_vec(), out, stable: stable_ids, window })
    }

    /// Builds the graph from per-subsystem rates `λ_i` and per-switch jump
    /// factors `μ_ij`. A vertex is stable iff `λ_i < 1`.
    pub fn from_rates(
        rates: &[f64],
        switches: &[(VertexId, VertexId, f64)],
        window: DwellWindow,
    ) -> Result<Self, GraphError> {
        let mut stable = Vec::new();
        let mut unstable = Vec::new();
        let mut weights = Vec::with_capacity(rates.len());
        for (i, &rate) in rates.iter().enumerate() {
            if !rate.is_finite() || rate <= 0.0 || rate == 1.0 {
                return Err(GraphError::InvalidRate { vertex: VertexId(i), rate });
            }
            let mag = rate.ln().abs();
            if rate < 1.0 {
                stable.push(VertexId(i));
                weights.push(-mag);
            } else {
                unstable.push(VertexId(i));
                weights.push(mag);
            }
        }
        let mut edges = Vec::with_capacity(switches.len());
        for &(from, to, mu) in switches {
            if !mu.is_finite() || mu < 1.0 {
                return Err(GraphError::InvalidJump { from, to, mu });
            }
            edges.push(Edge { from, to, weight: mu.ln() });
        }
        Self::new(&stable, &unstable, &weights, &edges, window)
    }

    pub fn vertex_count(&self) -> usize {
        self.stability.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn window(&self) -> DwellWindow {
        self.window
    }

    pub fn stability(&self, v: VertexId) -> Option<Stability> {
        self.stability.get(v.0).copied()
    }

    pub fn is_stable(&self, v: VertexId) -> bool {
        self.stability(v) == Some(Stability::Stable)
    }

    /// Stable vertices in ascending id order.
    pub fn stable_vertices(&self) -> &[VertexId] {
        &self.stable
    }

    pub fn unstable_vertices(&self) -> Vec<VertexId> {
        (0..self.vertex_count()).map(VertexId).filter(|&v| !self.is_stable(v)).collect()
    }

    pub fn stable_count(&self) -> usize {
        self.stable.len()
    }

    pub fn vertex_weight(&self, v: VertexId) -> Option<f64> {
        self.vertex_weight.get(v.0).copied()
    }

    pub fn vertex_weights(&self) -> &[f64] {
        &self.vertex_weight
    }

    pub fn edge_weight(&self, from: VertexId, to: VertexId) -> Option<f64> {
        let list = self.out.get(from.0)?;
        list.binary_search_by_key(&to, |&(t, _)| t).ok().map(|i| list[i].1)
    }

    /// Outgoing edges of `v`, sorted by target id.
    pub fn out_edges(&self, v: VertexId) -> &[(VertexId, f64)] {
        self.out.get(v.0).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().map(move |&(to, weight)| Edge { from: VertexId(i), to, weight }))
    }

    /// `N⁺_{P_S}(v)`: stable outneighbors of `v`, ascending.
    pub fn stable_outneighbors(&self, v: VertexId) -> Result<Vec<VertexId>, GraphError> {
        if v.0 >= self.vertex_count() {
            return Err(GraphError::UnknownVertex(v));
        }
        Ok(self.stable_outneighbors_iter(v).collect())
    }

    pub(crate) fn stable_outneighbors_iter(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.out_edges(v).iter().map(|&(t, _)| t).filter(|&t| self.is_stable(t))
    }

    /// True iff every vertex, stable or not, has at least `⌊Φ(|P_S|)⌋`
    /// stable outneighbors. `phi` is assumed monotone increasing.
    pub fn is_nicely_connected(&self, phi: &impl GrowthFn) -> bool {
        let threshold = phi.floor_at(self.stable_count());
        (0..self.vertex_count()).all(|i| self.stable_outneighbors_iter(VertexId(i)).count() >= threshold)
    }

    /// Boundedness conditions of the nice Δ-weighting with a single `Δ`.
    ///
    /// Vertex products use magnitudes, `0 < |w(j)|·Δ <= B`. The conditional
    /// mean conditions concern a distribution of graphs and are not checked.
    pub fn check_nice_weight_bounds(&self, p: &NiceWeightParams) -> WeightBoundReport {
        let dwell = vec![p.delta; self.vertex_count()];
        self.check_weight_bounds_with_dwell(p, &dwell)
    }

    /// As [`check_nice_weight_bounds`](Self::check_nice_weight_bounds) but
    /// scaling each vertex by its own dwell time.
    pub fn check_weight_bounds_with_dwell(&self, p: &NiceWeightParams, dwell: &[u32]) -> WeightBoundReport {
        let mut report = WeightBoundReport::default();
        for (i, (&w, &d)) in self.vertex_weight.iter().zip(dwell).enumerate() {
            report.vertices_checked += 1;
            let product = w.abs() * f64::from(d);
            if !(product > 0.0 && product <= p.b) {
                report.vertex_violations.push((VertexId(i), product));
            }
        }
        for e in self.edges() {
            report.edges_checked += 1;
            if !(e.weight >= -p.a && e.weight <= p.a) {
                report.edge_violations.push((e.from, e.to, e.weight));
            }
        }
        report
    }

    /// `Γ(W) = Σ w(v_k)·Δ_{v_k} + Σ w(v_k, v_{k+1})`, summed in ascending `k`,
    /// vertex terms first.
    pub fn gamma(&self, c: &TimedCycle) -> Result<f64, CycleError> {
        c.validate(self)?;
        let vertex_w: Vec<f64> = c.vertices().iter().map(|v| self.vertex_weight[v.0]).collect();
        let edge_w: Vec<f64> = c.cycle.edges().map(|(a, b)| self.edge_weight(a, b).expect("validated edge")).collect();
        Ok(gamma_from_terms(&vertex_w, &c.dwell, &edge_w))
    }

    /// `Γ(W) < 0`, strictly.
    pub fn is_delta_contractive(&self, c: &TimedCycle) -> Result<bool, CycleError> {
        Ok(self.gamma(c)? < 0.0)
    }
}

/// The contractivity sum from raw terms: vertex terms `w_k·Δ_k` for ascending
/// `k`, then edge terms for ascending `k`.
pub fn gamma_from_terms(vertex_weights: &[f64], dwell: &[u32], edge_weights: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&w, &d) in vertex_weights.iter().zip(dwell) {
        total += w * f64::from(d);
    }
    for &w in edge_weights {
        total += w;
    }
    total
}
