//! Stabilizing periodic switching signals for discrete-time switched systems.
//!
//! The pipeline: build (or [`generate`]) the weighted digraph of a switched
//! system, find a cycle among its stable vertices with [`detect::detect_cycle`],
//! check that the cycle is Δ-contractive (`Γ(W) < 0`), and unroll it into a
//! periodic [`signal::SwitchingSignal`]. [`sim`] simulates the resulting
//! switched system and spot-checks Lyapunov certificates; [`experiment`]
//! estimates how often detected cycles are contractive on random instances.

pub mod detect;
pub mod experiment;
pub mod generate;
pub mod graph;
pub mod io;
pub mod rng;
pub mod signal;
pub mod sim;

pub use detect::{detect_cycle, success_probability_bound, DetectError, DetectionResult};
pub use generate::{generate, resample_cycle_weights, CycleDraw, GenConfig, GenError, Instance, WeightModel};
pub use graph::{
    Cycle, CycleError, DwellWindow, Edge, GraphError, GrowthFn, NiceWeightParams, SqrtGrowth, Stability, TimedCycle,
    VertexId, WeightedDigraph,
};
pub use rng::{RngSeed, SeededRng};
pub use signal::{SignalError, SwitchingSignal};
