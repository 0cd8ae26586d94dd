//! Random instances that are nicely connected and nicely Δ-weighted by construction.
//!
//! Every vertex gets exactly `⌊Φ(|P_S|)⌋` stable outneighbors. Each vertex
//! draws a dwell time `Δ_j` uniform on `[Δ_m : Δ_M]` and a scaled weight
//! `s_j = |w(j)|·Δ_j` uniform on `(0, B]`, so `E[s_j] = B/2`. Edge weights are
//! uniform on `[-A, A]` (mean 0), or clamped to `[0, A]` in strict mode.
//!
//! Draw order for [`generate`], all from one stream seeded by `seed`:
//! 1. outneighbor sets, vertex ids ascending;
//! 2. extra random edges, if any;
//! 3. per vertex ascending: dwell, then scaled weight;
//! 4. edge weights, ordered by (source, target) ascending.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{
    gamma_from_terms, Cycle, CycleError, DwellWindow, Edge, GrowthFn, NiceWeightParams, SqrtGrowth, TimedCycle,
    VertexId, WeightBoundReport, WeightedDigraph,
};
use crate::rng::{RngSeed, SeededRng};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("invalid generator config: {0}")]
    ConfigInvalid(String),
}

/// Sampling distributions for vertex products, dwell times and edge weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightModel {
    /// Edge weights lie in `[-A, A]`.
    pub a: f64,
    /// Scaled vertex weights lie in `(0, B]`.
    pub b: f64,
    pub window: DwellWindow,
    /// Clamp edge weights to `[0, A]` so that every `μ_ij >= 1`.
    pub strict: bool,
}

impl WeightModel {
    fn sample_edge(&self, rng: &mut SeededRng) -> f64 {
        let w = rng.closed(-self.a, self.a);
        if self.strict {
            w.max(0.0)
        } else {
            w
        }
    }

    // (dwell, product)
    fn sample_vertex(&self, rng: &mut SeededRng) -> (u32, f64) {
        let dwell = rng.int_inclusive(self.window.min, self.window.max);
        let product = rng.open_closed(self.b);
        (dwell, product)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n_stable: usize,
    pub n_unstable: usize,
    pub phi: SqrtGrowth,
    pub params: NiceWeightParams,
    pub window: DwellWindow,
    pub seed: RngSeed,
    #[serde(default)]
    pub strict: bool,
    #[serde(default)]
    pub extra_edges: usize,
}

impl GenConfig {
    /// The 1000-vertex configuration: `Φ(r) = √r/10`, dwell in `[2:4]`,
    /// `A = 2.5`, `B = 5`, `α = 0`, `β = 2.5`.
    pub fn reference(seed: RngSeed) -> Self {
        Self {
            n_stable: 1000,
            n_unstable: 0,
            phi: SqrtGrowth { coeff: 0.1 },
            params: NiceWeightParams { delta: 2, alpha: 0.0, beta: 2.5, a: 2.5, b: 5.0 },
            window: DwellWindow { min: 2, max: 4 },
            seed,
            strict: false,
            extra_edges: 0,
        }
    }

    /// Parameters implied by the sampling model for the given `A`, `B` and
    /// window: `β = B/2`, `α = 0` (or `A/4` when clamped), `Δ = Δ_m`.
    pub fn implied_params(a: f64, b: f64, window: DwellWindow, strict: bool) -> NiceWeightParams {
        NiceWeightParams { delta: window.min, alpha: if strict { a / 4.0 } else { 0.0 }, beta: b / 2.0, a, b }
    }

    pub fn phi_floor(&self) -> usize {
        self.phi.floor_at(self.n_stable)
    }

    pub fn weight_model(&self) -> WeightModel {
        WeightModel { a: self.params.a, b: self.params.b, window: self.window, strict: self.strict }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: String| Err(GenError::ConfigInvalid(m));
        if self.n_stable == 0 {
            return bad("n_stable must be positive".into());
        }
        if !(self.phi.coeff.is_finite() && self.phi.coeff > 0.0) {
            return bad(format!("phi coefficient must be positive, got {}", self.phi.coeff));
        }
        DwellWindow::new(self.window.min, self.window.max).map_err(|e| GenError::ConfigInvalid(e.to_string()))?;
        self.params.validate_in(self.window).map_err(|e| GenError::ConfigInvalid(e.to_string()))?;
        let k = self.phi_floor();
        if k > self.n_stable - 1 {
            return bad(format!(
                "floor(phi({})) = {k} exceeds the {} available stable outneighbors",
                self.n_stable,
                self.n_stable - 1
            ));
        }
        Ok(())
    }
}

/// A generated graph together with the dwell time drawn for each vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub graph: WeightedDigraph,
    pub dwell: Vec<u32>,
}

impl Instance {
    pub fn check_nice_weight_bounds(&self, p: &NiceWeightParams) -> WeightBoundReport {
        self.graph.check_weight_bounds_with_dwell(p, &self.dwell)
    }

    /// The cycle with each vertex's own dwell time.
    pub fn timed(&self, c: &Cycle) -> TimedCycle {
        TimedCycle::new(c.clone(), c.vertices.iter().map(|v| self.dwell[v.0]).collect())
    }
}

pub fn generate(cfg: &GenConfig) -> Result<Instance, GenError> {
    cfg.validate()?;
    let mut rng = SeededRng::new(cfg.seed);
    let n = cfg.n_stable + cfg.n_unstable;
    let k = cfg.phi_floor();

    let mut adjacency: Vec<Vec<usize>> = Vec::with_capacity(n);
    for j in 0..n {
        let picks = if j < cfg.n_stable {
            // skip j itself among 0..n_stable
            rng.sample_distinct(cfg.n_stable - 1, k).into_iter().map(|t| if t >= j { t + 1 } else { t }).collect()
        } else {
            rng.sample_distinct(cfg.n_stable, k)
        };
        adjacency.push(picks);
    }

    if cfg.extra_edges > 0 && n > 1 {
        let capacity = n * (n - 1);
        let mut added = 0;
        let mut attempts = 0;
        while added < cfg.extra_edges && attempts < 100 * cfg.extra_edges {
            attempts += 1;
            if adjacency.iter().map(Vec::len).sum::<usize>() >= capacity {
                break;
            }
            let from = rng.index(n);
            let mut to = rng.index(n - 1);
            if to >= from {
                to += 1;
            }
            let list = &mut adjacency[from];
            if let Err(pos) = list.binary_search(&to) {
                list.insert(pos, to);
                added += 1;
            }
        }
    }

    let model = cfg.weight_model();
    let mut dwell = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for j in 0..n {
        let (d, s) = model.sample_vertex(&mut rng);
        let magnitude = s / f64::from(d);
        dwell.push(d);
        weights.push(if j < cfg.n_stable { -magnitude } else { magnitude });
    }

    let mut edges = Vec::new();
    for (from, targets) in adjacency.iter().enumerate() {
        for &to in targets {
            edges.push(Edge { from: VertexId(from), to: VertexId(to), weight: model.sample_edge(&mut rng) });
        }
    }

    let stable: Vec<VertexId> = (0..cfg.n_stable).map(VertexId).collect();
    let unstable: Vec<VertexId> = (cfg.n_stable..n).map(VertexId).collect();
    let graph = WeightedDigraph::new(&stable, &unstable, &weights, &edges, cfg.window)
        .map_err(|e| GenError::ConfigInvalid(e.to_string()))?;
    Ok(Instance { graph, dwell })
}

/// One fresh draw of a cycle's weights and dwell times.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleDraw {
    pub cycle: Cycle,
    pub dwell: Vec<u32>,
    /// Scaled magnitudes `s_k = |w(v_k)|·Δ_{v_k}`.
    pub products: Vec<f64>,
    /// Signed vertex weights.
    pub vertex_weights: Vec<f64>,
    /// Weights of `(v_k, v_{k+1})`, closing edge last.
    pub edge_weights: Vec<f64>,
}

impl CycleDraw {
    pub fn gamma(&self) -> f64 {
        gamma_from_terms(&self.vertex_weights, &self.dwell, &self.edge_weights)
    }

    pub fn is_contractive(&self) -> bool {
        self.gamma() < 0.0
    }
}

/// Redraws a cycle's vertex products, dwell times and edge weights i.i.d. from
/// `model`, leaving `g` untouched. Per vertex the dwell is drawn before the
/// product; edge weights follow in cycle order.
pub fn resample_cycle_weights(
    g: &WeightedDigraph,
    c: &Cycle,
    model: &WeightModel,
    seed: RngSeed,
) -> Result<CycleDraw, CycleError> {
    c.validate(g)?;
    let mut rng = SeededRng::new(seed);
    let n = c.len();
    let mut dwell = Vec::with_capacity(n);
    let mut products = Vec::with_capacity(n);
    let mut vertex_weights = Vec::with_capacity(n);
    for &v in &c.vertices {
        let (d, s) = model.sample_vertex(&mut rng);
        let magnitude = s / f64::from(d);
        dwell.push(d);
        products.push(s);
        vertex_weights.push(if g.is_stable(v) { -magnitude } else { magnitude });
    }
    let edge_weights = (0..n).map(|_| model.sample_edge(&mut rng)).collect();
    Ok(CycleDraw { cycle: c.clone(), dwell, products, vertex_weights, edge_weights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::detect_cycle;

    fn small(n_stable: usize, coeff: f64, seed: u64) -> GenConfig {
        GenConfig { n_stable, phi: SqrtGrowth { coeff }, ..GenConfig::reference(RngSeed(seed)) }
    }

    #[test]
    fn reference_instance_has_outdegree_three() {
        let cfg = GenConfig::reference(RngSeed(1));
        assert_eq!(cfg.phi_floor(), 3);
        let inst = generate(&cfg).unwrap();
        for j in 0..1000 {
            assert_eq!(inst.graph.stable_outneighbors(VertexId(j)).unwrap().len(), 3);
            assert_eq!(inst.graph.out_edges(VertexId(j)).len(), 3);
        }
        assert!(inst.graph.is_nicely_connected(&cfg.phi));
        assert!(inst.check_nice_weight_bounds(&cfg.params).all_pass());
    }

    #[test]
    fn two_stable_vertices_point_at_each_other() {
        let cfg = small(2, 1.0, 3);
        assert_eq!(cfg.phi_floor(), 1);
        let inst = generate(&cfg).unwrap();
        assert_eq!(inst.graph.stable_outneighbors(VertexId(0)).unwrap(), vec![VertexId(1)]);
        assert_eq!(inst.graph.stable_outneighbors(VertexId(1)).unwrap(), vec![VertexId(0)]);
    }

    #[test]
    fn unstable_vertices_get_stable_outneighbors() {
        let cfg = GenConfig { n_unstable: 5, ..small(50, 0.5, 4) };
        let inst = generate(&cfg).unwrap();
        assert_eq!(inst.graph.vertex_count(), 55);
        for j in 50..55 {
            let v = VertexId(j);
            assert!(!inst.graph.is_stable(v));
            assert!(inst.graph.vertex_weight(v).unwrap() > 0.0);
            assert_eq!(inst.graph.stable_outneighbors(v).unwrap().len(), 3);
        }
        assert!(inst.graph.is_nicely_connected(&cfg.phi));
    }

    #[test]
    fn config_errors() {
        assert!(generate(&small(0, 0.1, 0)).is_err());
        // floor(2·√4) = 4 > 3
        assert!(generate(&small(4, 2.0, 0)).is_err());
        assert!(generate(&small(10, -1.0, 0)).is_err());
        let mut cfg = small(10, 0.5, 0);
        cfg.params.delta = 9;
        assert!(generate(&cfg).is_err());
    }

    #[test]
    fn strict_mode_and_extra_edges() {
        let cfg = GenConfig { strict: true, extra_edges: 40, ..small(30, 0.5, 8) };
        let inst = generate(&cfg).unwrap();
        assert!(inst.graph.edges().all(|e| (0.0..=2.5).contains(&e.weight)));
        assert_eq!(inst.graph.edge_count(), 30 * 2 + 40);
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = small(200, 0.3, 77);
        assert_eq!(generate(&cfg).unwrap(), generate(&cfg).unwrap());
        let other = GenConfig { seed: RngSeed(78), ..cfg.clone() };
        assert_ne!(generate(&cfg).unwrap(), generate(&other).unwrap());
    }

    #[test]
    fn resampling_draws_within_bounds() {
        let cfg = GenConfig::reference(RngSeed(5));
        let inst = generate(&cfg).unwrap();
        let model = cfg.weight_model();
        let c = detect_cycle(&inst.graph, RngSeed(0)).unwrap().cycle;
        let mut seen = std::collections::HashSet::new();
        for t in 0..1000u64 {
            let d = resample_cycle_weights(&inst.graph, &c, &model, RngSeed(t)).unwrap();
            assert!(d.products.iter().all(|&s| s > 0.0 && s <= 5.0));
            assert!(d.edge_weights.iter().all(|&w| (-2.5..=2.5).contains(&w)));
            assert!(d.dwell.iter().all(|&x| (2..=4).contains(&x)));
            assert!(d.vertex_weights.iter().all(|&w| w < 0.0));
            let key: Vec<u64> = d.products.iter().chain(&d.edge_weights).map(|x| x.to_bits()).collect();
            seen.insert(key);
        }
        assert_eq!(seen.len(), 1000);
        let a = resample_cycle_weights(&inst.graph, &c, &model, RngSeed(9)).unwrap();
        let b = resample_cycle_weights(&inst.graph, &c, &model, RngSeed(9)).unwrap();
        assert_eq!(a, b);
        let bogus = Cycle::new([0, 0]);
        assert!(resample_cycle_weights(&inst.graph, &bogus, &model, RngSeed(0)).is_err());
    }
}
