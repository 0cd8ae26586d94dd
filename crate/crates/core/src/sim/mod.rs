//! Simulation of `x(t+1) = f_{σ(t)}(x(t), v(t))`, `y(t) = h_{σ(t)}(x(t))`, and
//! sampling-based checks of Lyapunov certificates.

mod certificate;
pub mod library;
mod system;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use certificate::{
    check_certificate, check_zero_equilibrium, verify_period_contraction, CertificateReport, CertificateSpec,
    ContractionReport, Counterexample, InequalityStats, Lyapunov, LyapunovCertificate, LyapunovSpec, PowerGain,
    QuadraticForm,
};
pub use system::{LinearSubsystem, SaturatingSubsystem, Subsystem, SubsystemSpec, SwitchedSystem};

use crate::graph::{CycleError, Stability, VertexId};
use crate::signal::{SignalError, SwitchingSignal};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("{what}: expected dimension {expected}, got {got}")]
    Dimension { what: String, expected: usize, got: usize },
    #[error("no subsystem for vertex {0}")]
    UnknownSubsystem(VertexId),
    #[error("state became non-finite at t = {t}")]
    NonFinite { t: u64 },
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("invalid system description: {0}")]
    Spec(String),
    #[error("invalid certificate: {0}")]
    Certificate(String),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Cycle(#[from] CycleError),
}

/// States `x(0..=T)`, outputs `y(0..=T)`, active indices `σ(0..=T)` and inputs `v(0..T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<DVector<f64>>,
    pub outputs: Vec<DVector<f64>>,
    pub sigma: Vec<VertexId>,
    pub inputs: Vec<DVector<f64>>,
}

impl Trajectory {
    pub fn horizon(&self) -> usize {
        self.inputs.len()
    }

    pub fn final_state(&self) -> &DVector<f64> {
        self.states.last().expect("trajectory has x(0)")
    }

    /// Re-runs the recorded `σ` and inputs from the recorded `x(0)`.
    pub fn replay(&self, sys: &SwitchedSystem) -> Result<Trajectory, SimError> {
        run(
            sys,
            |t| self.sigma[t as usize],
            &self.states[0],
            |t| self.inputs[t as usize].clone(),
            self.horizon() as u64,
        )
    }

    pub fn response_bounds(&self) -> ResponseBounds {
        let sup = |vs: &[DVector<f64>]| vs.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let initial_norm = self.states[0].norm();
        let sup_state = sup(&self.states);
        let sup_input = sup(&self.inputs);
        let sup_output = sup(&self.outputs);
        let scale = initial_norm + sup_input;
        ResponseBounds {
            initial_norm,
            sup_state,
            sup_input,
            sup_output,
            gain: if scale > 0.0 { sup_state / scale } else { 0.0 },
        }
    }
}

/// Sup-norms over a trajectory; `gain = sup‖x‖ / (‖x(0)‖ + sup‖v‖)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResponseBounds {
    pub initial_norm: f64,
    pub sup_state: f64,
    pub sup_input: f64,
    pub sup_output: f64,
    pub gain: f64,
}

/// Iterates the switched system for `horizon` steps under `sig`.
pub fn simulate(
    sys: &SwitchedSystem,
    sig: &SwitchingSignal,
    x0: &DVector<f64>,
    input: impl Fn(u64) -> DVector<f64>,
    horizon: u64,
) -> Result<Trajectory, SimError> {
    run(sys, |t| sig.eval(t), x0, input, horizon)
}

fn run(
    sys: &SwitchedSystem,
    sigma: impl Fn(u64) -> VertexId,
    x0: &DVector<f64>,
    input: impl Fn(u64) -> DVector<f64>,
    horizon: u64,
) -> Result<Trajectory, SimError> {
    if horizon == 0 {
        return Err(SimError::ZeroHorizon);
    }
    if x0.len() != sys.state_dim() {
        return Err(SimError::Dimension { what: "x0".into(), expected: sys.state_dim(), got: x0.len() });
    }
    let cap = horizon as usize + 1;
    let mut traj = Trajectory {
        states: Vec::with_capacity(cap),
        outputs: Vec::with_capacity(cap),
        sigma: Vec::with_capacity(cap),
        inputs: Vec::with_capacity(cap - 1),
    };
    let mut x = x0.clone();
    for t in 0..=horizon {
        let active = sigma(t);
        let sub = sys.subsystem(active)?;
        traj.outputs.push(sub.output(&x));
        traj.sigma.push(active);
        if t == horizon {
            traj.states.push(x);
            break;
        }
        let v = input(t);
        if v.len() != sys.input_dim() {
            return Err(SimError::Dimension {
                what: format!("input at t = {t}"),
                expected: sys.input_dim(),
                got: v.len(),
            });
        }
        let next = sub.step(&x, &v);
        if next.iter().any(|c| !c.is_finite()) {
            return Err(SimError::NonFinite { t: t + 1 });
        }
        traj.states.push(std::mem::replace(&mut x, next));
        traj.inputs.push(v);
    }
    Ok(traj)
}

/// Zero input, for use with [`simulate`].
pub fn zero_input(dim: usize) -> impl Fn(u64) -> DVector<f64> {
    move |_| DVector::zeros(dim)
}

/// Decay check for linear families with `h ≡ 0` and `v ≡ 0`.
///
/// True iff `‖x(T)‖ <= eps·‖x(0)‖` and the Lyapunov value at every period
/// boundary is strictly below the one a period earlier. The Lyapunov value is
/// `V_{v_0}` from `cert` when given, otherwise `‖x‖²`. Returns true for `x0 = 0`.
pub fn check_gas_decay(
    sys: &SwitchedSystem,
    sig: &SwitchingSignal,
    x0: &DVector<f64>,
    horizon: u64,
    eps: f64,
    cert: Option<&LyapunovCertificate>,
) -> Result<bool, SimError> {
    if x0.len() != sys.state_dim() {
        return Err(SimError::Dimension { what: "x0".into(), expected: sys.state_dim(), got: x0.len() });
    }
    if x0.iter().all(|&c| c == 0.0) {
        return Ok(true);
    }
    let traj = simulate(sys, sig, x0, zero_input(sys.input_dim()), horizon)?;
    let head = sig.eval(0);
    let value = |x: &DVector<f64>| match cert {
        Some(c) => c.value(head, x),
        None => x.norm_squared(),
    };
    let period = sig.period() as usize;
    let mut prev = value(&traj.states[0]);
    for k in 1..=(horizon as usize / period) {
        let cur = value(&traj.states[k * period]);
        if !(cur < prev || (prev == 0.0 && cur == 0.0)) {
            return Ok(false);
        }
        prev = cur;
    }
    Ok(traj.final_state().norm() <= eps * x0.norm())
}

/// System file: built-in subsystems, optional stability tags and an optional certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub subsystems: Vec<SubsystemSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stability: Option<Vec<Stability>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateSpec>,
}

impl SystemFile {
    pub fn build(&self) -> Result<SwitchedSystem, SimError> {
        let sys = SwitchedSystem::from_specs(&self.subsystems)?;
        match &self.stability {
            Some(tags) => sys.with_tags(tags.iter().copied().map(Some).collect()),
            None => Ok(sys),
        }
    }
}
