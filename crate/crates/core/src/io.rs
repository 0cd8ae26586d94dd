//! JSON file formats for graphs and cycles.
//!
//! Graph file:
//!
//! ```json
//! {
//!   "stable": [0, 1],
//!   "unstable": [2],
//!   "vertex_weights": { "0": -0.5, "1": -1.2, "2": 0.3 },
//!   "edges": [ { "from": 0, "to": 1, "weight": 0.1 } ],
//!   "dwell_min": 2,
//!   "dwell_max": 4
//! }
//! ```
//!
//! Cycle file: `{ "vertices": [0, 1, 2], "dwell": [2, 2, 3] }`. `dwell` is
//! optional, and the `{ "vertices": [...], "length": n }` document printed by
//! `detect --json` is accepted as-is.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Cycle, DwellWindow, Edge, GraphError, TimedCycle, VertexId, WeightedDigraph};

/// A load failure with a 1-based source position.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}, column {column}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl FormatError {
    fn from_json(e: serde_json::Error) -> Self {
        Self { line: e.line().max(1), column: e.column().max(1), message: e.to_string() }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    stable: Vec<usize>,
    unstable: Vec<usize>,
    vertex_weights: BTreeMap<usize, f64>,
    edges: Vec<RawEdge>,
    dwell_min: u32,
    dwell_max: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    from: usize,
    to: usize,
    weight: f64,
}

pub fn graph_to_json(g: &WeightedDigraph) -> String {
    let doc = GraphDoc {
        stable: g.stable_vertices().iter().map(|v| v.0).collect(),
        unstable: g.unstable_vertices().iter().map(|v| v.0).collect(),
        vertex_weights: g.vertex_weights().iter().copied().enumerate().collect(),
        edges: g.edges().map(|e| RawEdge { from: e.from.0, to: e.to.0, weight: e.weight }).collect(),
        dwell_min: g.window().min,
        dwell_max: g.window().max,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("graph serializes");
    s.push('\n');
    s
}

pub fn graph_from_json(text: &str) -> Result<WeightedDigraph, FormatError> {
    let doc: GraphDoc = serde_json::from_str(text).map_err(FormatError::from_json)?;
    let located = |err: GraphError| {
        let offset = locate(text, &doc, &err);
        let (line, column) = line_col(text, offset);
        FormatError { line, column, message: err.to_string() }
    };

    let window = DwellWindow::new(doc.dwell_min, doc.dwell_max).map_err(located)?;
    let n = doc.stable.len() + doc.unstable.len();
    let mut weights = vec![f64::NAN; n];
    for (&id, &w) in &doc.vertex_weights {
        let slot = weights.get_mut(id).ok_or(GraphError::UnknownVertex(VertexId(id))).map_err(located)?;
        *slot = w;
    }
    if let Some(missing) = (0..n).find(|&i| !doc.vertex_weights.contains_key(&i)) {
        return Err(located(GraphError::MissingVertexWeight(VertexId(missing))));
    }
    let stable: Vec<VertexId> = doc.stable.iter().copied().map(VertexId).collect();
    let unstable: Vec<VertexId> = doc.unstable.iter().copied().map(VertexId).collect();
    let edges: Vec<Edge> =
        doc.edges.iter().map(|e| Edge { from: VertexId(e.from), to: VertexId(e.to), weight: e.weight }).collect();
    WeightedDigraph::new(&stable, &unstable, &weights, &edges, window).map_err(located)
}

fn find_after(text: &str, start: usize, needle: &str) -> Option<usize> {
    text.get(start..)?.find(needle).map(|i| start + i)
}

fn key_offset(text: &str, key: &str) -> Option<usize> {
    find_after(text, 0, &format!("\"{key}\""))
}

fn nth_edge_offset(text: &str, n: usize) -> Option<usize> {
    let mut at = key_offset(text, "edges")?;
    for _ in 0..=n {
        at = find_after(text, at + 1, "\"from\"")?;
    }
    Some(at)
}

// Best-effort source offset for a semantic error found after parsing.
fn locate(text: &str, doc: &GraphDoc, err: &GraphError) -> usize {
    let vertex_key =
        |v: VertexId| key_offset(text, "vertex_weights").and_then(|at| find_after(text, at, &format!("\"{}\"", v.0)));
    let edge_index = |pred: &dyn Fn(&RawEdge) -> bool, nth_match: usize| {
        doc.edges.iter().enumerate().filter(|(_, e)| pred(e)).nth(nth_match).map(|(i, _)| i)
    };
    let found = match err {
        GraphError::InvalidWindow { .. } => key_offset(text, "dwell_min"),
        GraphError::PartitionOverlap(_) | GraphError::PartitionGap(_) | GraphError::Empty => {
            key_offset(text, "unstable")
        }
        GraphError::MissingVertexWeight(_) => key_offset(text, "vertex_weights"),
        GraphError::VertexWeightSign { vertex, .. } => vertex_key(*vertex),
        GraphError::NonFinite { .. } => key_offset(text, "vertex_weights"),
        GraphError::UnknownVertex(v) => {
            let id = v.0;
            if let Some(i) = edge_index(&|e| e.from == id || e.to == id, 0) {
                nth_edge_offset(text, i)
            } else if doc.vertex_weights.contains_key(&id) {
                vertex_key(*v)
            } else {
                key_offset(text, "stable")
            }
        }
        GraphError::DuplicateEdge(a, b) => {
            let (a, b) = (a.0, b.0);
            edge_index(&|e| e.from == a && e.to == b, 1).and_then(|i| nth_edge_offset(text, i))
        }
        GraphError::SelfLoop(v) => {
            let id = v.0;
            edge_index(&|e| e.from == id && e.to == id, 0).and_then(|i| nth_edge_offset(text, i))
        }
        GraphError::InvalidRate { .. } | GraphError::InvalidJump { .. } => None,
    };
    found.unwrap_or(0)
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |nl| before.len() - nl - 1) + 1;
    (line, column)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CycleDoc {
    vertices: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dwell: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    length: Option<usize>,
}

/// A cycle read from a file or the command line; dwell parameters are optional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleSpec {
    pub cycle: Cycle,
    pub dwell: Option<Vec<u32>>,
}

impl CycleSpec {
    /// Attaches dwell parameters, using `default_dwell` for every vertex when
    /// the spec carries none.
    pub fn timed(&self, default_dwell: u32) -> TimedCycle {
        match &self.dwell {
            Some(d) => TimedCycle::new(self.cycle.clone(), d.clone()),
            None => TimedCycle::uniform(self.cycle.clone(), default_dwell),
        }
    }
}

pub fn cycle_from_json(text: &str) -> Result<CycleSpec, FormatError> {
    let doc: CycleDoc = serde_json::from_str(text).map_err(FormatError::from_json)?;
    if let Some(len) = doc.length {
        if len != doc.vertices.len() {
            return Err(FormatError {
                line: 1,
                column: 1,
                message: format!("length {len} does not match {} vertices", doc.vertices.len()),
            });
        }
    }
    Ok(CycleSpec { cycle: Cycle::new(doc.vertices), dwell: doc.dwell })
}

pub fn cycle_to_json(c: &TimedCycle) -> String {
    let doc = CycleDoc {
        vertices: c.vertices().iter().map(|v| v.0).collect(),
        dwell: Some(c.dwell.clone()),
        length: Some(c.len()),
    };
    serde_json::to_string(&doc).expect("cycle serializes")
}

/// Parses `0,1,2` (no dwell) or `0:2,1:4,2:2` (vertex:dwell pairs).
pub fn parse_inline_cycle(s: &str) -> Result<CycleSpec, String> {
    let mut vertices = Vec::new();
    let mut dwell = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once(':') {
            Some((v, d)) => {
                vertices.push(v.trim().parse::<usize>().map_err(|e| format!("bad vertex {v:?}: {e}"))?);
                dwell.push(d.trim().parse::<u32>().map_err(|e| format!("bad dwell {d:?}: {e}"))?);
            }
            None => vertices.push(part.parse::<usize>().map_err(|e| format!("bad vertex {part:?}: {e}"))?),
        }
    }
    if !dwell.is_empty() && dwell.len() != vertices.len() {
        return Err("either every vertex or none must carry a :dwell suffix".into());
    }
    Ok(CycleSpec { cycle: Cycle::new(vertices), dwell: (!dwell.is_empty()).then_some(dwell) })
}
