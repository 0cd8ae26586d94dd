//! Built-in systems with known certificates.

use std::collections::BTreeMap;

use super::{LyapunovCertificate, PowerGain, QuadraticForm, SaturatingSubsystem, SubsystemSpec, SwitchedSystem};
use crate::graph::{DwellWindow, VertexId, WeightedDigraph};

#[derive(Debug)]
pub struct Example {
    pub system: SwitchedSystem,
    pub certificate: LyapunovCertificate,
    pub graph: WeightedDigraph,
}

fn square() -> PowerGain {
    PowerGain { c: 1.0, q: 2.0 }
}

fn quadratic_certificate(rates: Vec<f64>, gamma1: PowerGain) -> LyapunovCertificate {
    LyapunovCertificate {
        functions: rates.iter().map(|_| Box::new(QuadraticForm::identity(1)) as _).collect(),
        rates,
        jumps: BTreeMap::new(),
        default_jump: Some(1.0),
        gamma1,
        gamma2: PowerGain::ZERO,
        alpha_lower: square(),
        alpha_upper: square(),
    }
}

/// `x ↦ 0.5x + v` with `V = x²`, claimed rate `rate` and `γ1(r) = 2r²`.
///
/// `(0.5x + v)² <= 0.5x² + 2v²` since the difference is `(0.5x - v)²`, so the
/// certificate is valid for `rate >= 0.5`.
pub fn young_scalar(rate: f64) -> Example {
    let system = SwitchedSystem::from_specs(&[SubsystemSpec::Scalar { a: 0.5, b: 1.0, c: 0.0 }]).expect("valid");
    let certificate = quadratic_certificate(vec![rate], PowerGain { c: 2.0, q: 2.0 });
    let graph = WeightedDigraph::from_rates(&[rate], &[], DwellWindow { min: 1, max: 1 }).expect("valid");
    Example { system, certificate, graph }
}

/// Scalars `a = (0.5, 0.6)` switching both ways, `V = x²`, exact rates
/// `λ = (0.25, 0.36)` and `μ ≡ 1`. Dwell window `[1:4]`.
pub fn two_scalar_cycle() -> Example {
    let system = SwitchedSystem::from_specs(&[
        SubsystemSpec::Scalar { a: 0.5, b: 0.0, c: 0.0 },
        SubsystemSpec::Scalar { a: 0.6, b: 0.0, c: 0.0 },
    ])
    .expect("valid");
    let certificate = quadratic_certificate(vec![0.25, 0.36], PowerGain::ZERO);
    let graph = certificate
        .induced_graph(&[(VertexId(0), VertexId(1)), (VertexId(1), VertexId(0))], DwellWindow { min: 1, max: 4 })
        .expect("valid");
    Example { system, certificate, graph }
}

/// `x ↦ 0.5·x/(1+|x|) + v` with `V = x²`, `λ = 0.5`, `γ1(r) = 2r²`.
pub fn saturating_scalar() -> Example {
    let system = SwitchedSystem::new(vec![Box::new(SaturatingSubsystem { gain: vec![0.5], input_gain: vec![1.0] })])
        .expect("valid");
    let certificate = quadratic_certificate(vec![0.5], PowerGain { c: 2.0, q: 2.0 });
    let graph = WeightedDigraph::from_rates(&[0.5], &[], DwellWindow { min: 1, max: 1 }).expect("valid");
    Example { system, certificate, graph }
}
