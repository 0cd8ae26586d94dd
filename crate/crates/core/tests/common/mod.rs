//! Test-only oracles. Nothing here calls the code paths it is used to check.
#![allow(dead_code)]

use std::collections::BTreeSet;

use cycleswitch::{Cycle, DwellWindow, Edge, VertexId, WeightedDigraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Every simple directed cycle of `g`, each listed once, starting at its
/// smallest vertex. Exponential; meant for graphs with at most ~10 vertices.
pub fn enumerate_simple_cycles(g: &WeightedDigraph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let adj: Vec<Vec<usize>> = (0..n).map(|i| g.out_edges(VertexId(i)).iter().map(|(t, _)| t.0).collect()).collect();
    let mut out = Vec::new();
    for start in 0..n {
        let mut path = vec![start];
        let mut on_path = vec![false; n];
        on_path[start] = true;
        extend(&adj, start, &mut path, &mut on_path, &mut out);
    }
    out
}

fn extend(adj: &[Vec<usize>], start: usize, path: &mut Vec<usize>, on_path: &mut [bool], out: &mut Vec<Vec<usize>>) {
    let last = *path.last().unwrap();
    for &next in &adj[last] {
        if next == start && path.len() >= 2 {
            out.push(path.clone());
        } else if next > start && !on_path[next] {
            on_path[next] = true;
            path.push(next);
            extend(adj, start, path, on_path, out);
            path.pop();
            on_path[next] = false;
        }
    }
}

/// Direct re-summation: vertex terms for k ascending, then edge terms.
pub fn brute_gamma(g: &WeightedDigraph, cycle: &[usize], dwell: &[u32]) -> f64 {
    let n = cycle.len();
    let mut total = 0.0;
    for k in 0..n {
        total += g.vertex_weights()[cycle[k]] * dwell[k] as f64;
    }
    for k in 0..n {
        let (a, b) = (cycle[k], cycle[(k + 1) % n]);
        let w = g.edges().find(|e| e.from.0 == a && e.to.0 == b).expect("edge on cycle").weight;
        total += w;
    }
    total
}

/// Random graph on `n` vertices: random partition, signed vertex weights in
/// `(0, 2]` magnitude, each ordered pair an edge with probability `p`, edge
/// weights uniform on `[-a, a]`.
pub fn random_graph(seed: u64, n: usize, p: f64, a: f64, window: (u32, u32)) -> WeightedDigraph {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut stable = Vec::new();
    let mut unstable = Vec::new();
    let mut weights = Vec::new();
    for i in 0..n {
        let mag = 2.0 * (1.0 - rng.random::<f64>());
        if i == 0 || rng.random::<f64>() < 0.7 {
            stable.push(VertexId(i));
            weights.push(-mag);
        } else {
            unstable.push(VertexId(i));
            weights.push(mag);
        }
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random::<f64>() < p {
                edges.push(Edge { from: VertexId(i), to: VertexId(j), weight: rng.random_range(-a..=a) });
            }
        }
    }
    WeightedDigraph::new(&stable, &unstable, &weights, &edges, DwellWindow::new(window.0, window.1).unwrap()).unwrap()
}

/// Complete digraph on `n` stable vertices with unit-magnitude weights.
pub fn complete_stable(n: usize) -> WeightedDigraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                edges.push(Edge { from: VertexId(i), to: VertexId(j), weight: 0.0 });
            }
        }
    }
    let ids: Vec<VertexId> = (0..n).map(VertexId).collect();
    WeightedDigraph::new(&ids, &[], &vec![-1.0; n], &edges, DwellWindow::new(1, 1).unwrap()).unwrap()
}

pub fn canonical(c: &Cycle) -> Vec<usize> {
    c.canonical().vertices.iter().map(|v| v.0).collect()
}

pub fn as_set(cycles: &[Vec<usize>]) -> BTreeSet<Vec<usize>> {
    cycles.iter().cloned().collect()
}

/// Independent Monte Carlo estimate of `P(Γ < 0)` for an `n`-cycle of stable
/// vertices: products uniform on `(0, b]`, edges uniform on `[-a, a]`.
pub fn brute_contractive_probability(n: usize, a: f64, b: f64, draws: usize, seed: u64) -> f64 {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..draws {
        let mut gamma = 0.0;
        for _ in 0..n {
            let s = b * (1.0 - rng.random::<f64>());
            gamma -= s;
        }
        for _ in 0..n {
            gamma += rng.random_range(-a..=a);
        }
        if gamma < 0.0 {
            hits += 1;
        }
    }
    hits as f64 / draws as f64
}
