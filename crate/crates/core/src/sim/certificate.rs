//! Lyapunov certificates and their sampling-based checks.
//!
//! For each subsystem `i` a certificate supplies `V_i`, a rate `λ_i`, and for
//! each switch `(i, j)` a jump factor `μ_ij`. The checked inequalities are
//!
//! * sandwich: `α_lo(‖ξ‖) <= V_i(ξ) <= α_hi(‖ξ‖)`
//! * decrease: `V_i(f_i(ξ, η)) <= λ_i V_i(ξ) + γ1(‖η‖) + γ2(‖h_i(ξ)‖)`
//! * jump: `V_j(ξ) <= μ_ij V_i(ξ)`
//!
//! Gains are power laws `r ↦ c r^q`. Points are drawn uniformly from balls.

use std::collections::BTreeMap;
use std::fmt::Debug;

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{simulate, zero_input, SimError, SwitchedSystem};
use crate::graph::{Stability, TimedCycle, VertexId, WeightedDigraph};
use crate::rng::{RngSeed, SeededRng};
use crate::signal::SwitchingSignal;

/// Relative tolerance for pointwise inequality checks.
const REL_TOL: f64 = 1e-9;

pub trait Lyapunov: Debug + Send + Sync {
    fn value(&self, x: &DVector<f64>) -> f64;
}

/// `V(x) = xᵀ P x`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    pub p: DMatrix<f64>,
}

impl QuadraticForm {
    pub fn identity(dim: usize) -> Self {
        Self { p: DMatrix::identity(dim, dim) }
    }
}

impl Lyapunov for QuadraticForm {
    fn value(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.p * x))
    }
}

/// `r ↦ c·r^q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerGain {
    pub c: f64,
    pub q: f64,
}

impl PowerGain {
    pub const ZERO: PowerGain = PowerGain { c: 0.0, q: 1.0 };

    pub fn eval(&self, r: f64) -> f64 {
        if self.c == 0.0 {
            0.0
        } else {
            self.c * r.powf(self.q)
        }
    }
}

#[derive(Debug)]
pub struct LyapunovCertificate {
    pub functions: Vec<Box<dyn Lyapunov>>,
    pub rates: Vec<f64>,
    pub jumps: BTreeMap<(VertexId, VertexId), f64>,
    /// Used for switches without an explicit entry in `jumps`.
    pub default_jump: Option<f64>,
    pub gamma1: PowerGain,
    pub gamma2: PowerGain,
    pub alpha_lower: PowerGain,
    pub alpha_upper: PowerGain,
}

impl LyapunovCertificate {
    pub fn value(&self, v: VertexId, x: &DVector<f64>) -> f64 {
        self.functions[v.0].value(x)
    }

    pub fn jump(&self, from: VertexId, to: VertexId) -> Option<f64> {
        self.jumps.get(&(from, to)).copied().or(self.default_jump)
    }

    /// Checks coverage of `g` and the rate/jump invariants: `0 < λ < 1` on
    /// stable vertices, `λ > 1` on unstable ones, `μ >= 1` on every edge.
    pub fn check_against(&self, sys: &SwitchedSystem, g: &WeightedDigraph) -> Result<(), SimError> {
        let n = g.vertex_count();
        if self.functions.len() != n || self.rates.len() != n || sys.len() != n {
            return Err(SimError::Certificate(format!(
                "{} functions, {} rates and {} subsystems for a graph of {n} vertices",
                self.functions.len(),
                self.rates.len(),
                sys.len()
            )));
        }
        for (i, &rate) in self.rates.iter().enumerate() {
            let ok = match g.stability(VertexId(i)) {
                Some(Stability::Stable) => rate > 0.0 && rate < 1.0,
                _ => rate > 1.0,
            };
            if !ok {
                return Err(SimError::Certificate(format!("rate {rate} of vertex {i} contradicts its stability")));
            }
        }
        for e in g.edges() {
            match self.jump(e.from, e.to) {
                Some(mu) if mu >= 1.0 => {}
                Some(mu) => {
                    return Err(SimError::Certificate(format!("μ = {mu} on ({}, {}) is below 1", e.from, e.to)))
                }
                None => return Err(SimError::Certificate(format!("no μ for edge ({}, {})", e.from, e.to))),
            }
        }
        Ok(())
    }

    /// The graph these rates and jumps induce, with the given edge set and window.
    pub fn induced_graph(
        &self,
        switches: &[(VertexId, VertexId)],
        window: crate::graph::DwellWindow,
    ) -> Result<WeightedDigraph, SimError> {
        let mut edges = Vec::with_capacity(switches.len());
        for &(a, b) in switches {
            let mu = self.jump(a, b).ok_or_else(|| SimError::Certificate(format!("no μ for edge ({a}, {b})")))?;
            edges.push((a, b, mu));
        }
        WeightedDigraph::from_rates(&self.rates, &edges, window).map_err(|e| SimError::Certificate(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum LyapunovSpec {
    /// `xᵀ P x` with `P` given row by row.
    Quadratic { p: Vec<Vec<f64>> },
    /// `‖x‖²`.
    SquaredNorm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpSpec {
    pub from: usize,
    pub to: usize,
    pub mu: f64,
}

/// Serializable certificate, as embedded in a system file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateSpec {
    pub lyapunov: Vec<LyapunovSpec>,
    pub rates: Vec<f64>,
    #[serde(default)]
    pub jumps: Vec<JumpSpec>,
    #[serde(default)]
    pub default_jump: Option<f64>,
    #[serde(default = "zero_gain")]
    pub gamma1: PowerGain,
    #[serde(default = "zero_gain")]
    pub gamma2: PowerGain,
    pub alpha_lower: PowerGain,
    pub alpha_upper: PowerGain,
}

fn zero_gain() -> PowerGain {
    PowerGain::ZERO
}

impl CertificateSpec {
    pub fn build(&self, state_dim: usize) -> Result<LyapunovCertificate, SimError> {
        let functions = self
            .lyapunov
            .iter()
            .map(|l| -> Result<Box<dyn Lyapunov>, SimError> {
                Ok(match l {
                    LyapunovSpec::SquaredNorm => Box::new(QuadraticForm::identity(state_dim)),
                    LyapunovSpec::Quadratic { p } => {
                        if p.len() != state_dim || p.iter().any(|r| r.len() != state_dim) {
                            return Err(SimError::Certificate(format!("P must be {state_dim} × {state_dim}")));
                        }
                        Box::new(QuadraticForm { p: DMatrix::from_fn(state_dim, state_dim, |i, j| p[i][j]) })
                    }
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(LyapunovCertificate {
            functions,
            rates: self.rates.clone(),
            jumps: self.jumps.iter().map(|j| ((VertexId(j.from), VertexId(j.to)), j.mu)).collect(),
            default_jump: self.default_jump,
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            alpha_lower: self.alpha_lower,
            alpha_upper: self.alpha_upper,
        })
    }
}

/// A sampled point where an inequality failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub sample: usize,
    /// Subsystem, or the switch source for jump checks.
    pub from: VertexId,
    /// Switch target for jump checks.
    pub to: Option<VertexId>,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct InequalityStats {
    pub checks: usize,
    pub violations: usize,
    /// Smallest `rhs - lhs` seen.
    pub worst_margin: Option<f64>,
    /// First violation found.
    pub counterexample: Option<Counterexample>,
}

impl InequalityStats {
    #[allow(clippy::too_many_arguments)]
    fn record(
        &mut self,
        lhs: f64,
        rhs: f64,
        sample: usize,
        from: VertexId,
        to: Option<VertexId>,
        xi: &DVector<f64>,
        eta: &DVector<f64>,
    ) {
        self.checks += 1;
        let margin = rhs - lhs;
        self.worst_margin = Some(self.worst_margin.map_or(margin, |m| m.min(margin)));
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        if margin.is_nan() || margin < -REL_TOL * scale {
            self.violations += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(Counterexample {
                    sample,
                    from,
                    to,
                    xi: xi.iter().copied().collect(),
                    eta: eta.iter().copied().collect(),
                    lhs,
                    rhs,
                });
            }
        }
    }

    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub samples: usize,
    pub seed: RngSeed,
    pub radius: f64,
    pub sandwich_lower: InequalityStats,
    pub sandwich_upper: InequalityStats,
    pub decrease: InequalityStats,
    pub jump: InequalityStats,
}

impl CertificateReport {
    pub fn all_hold(&self) -> bool {
        self.sandwich_lower.holds() && self.sandwich_upper.holds() && self.decrease.holds() && self.jump.holds()
    }

    pub fn total_violations(&self) -> usize {
        self.sandwich_lower.violations
            + self.sandwich_upper.violations
            + self.decrease.violations
            + self.jump.violations
    }
}

fn sample_ball(rng: &mut SeededRng, dim: usize, radius: f64) -> DVector<f64> {
    if dim == 0 {
        return DVector::zeros(0);
    }
    let dir: DVector<f64> = DVector::from_fn(dim, |_, _| StandardNormal.sample(rng.inner_mut()));
    let norm = dir.norm();
    if norm == 0.0 {
        return DVector::zeros(dim);
    }
    let r = radius * rng.unit().powf(1.0 / dim as f64);
    dir * (r / norm)
}

/// Samples `n_samples` pairs `(ξ, η)` uniformly from radius-`radius` balls
/// and checks every inequality pointwise, per subsystem and per edge of `g`.
pub fn check_certificate(
    sys: &SwitchedSystem,
    cert: &LyapunovCertificate,
    g: &WeightedDigraph,
    n_samples: usize,
    seed: RngSeed,
    radius: f64,
) -> Result<CertificateReport, SimError> {
    cert.check_against(sys, g)?;
    let mut rng = SeededRng::new(seed);
    let mut report = CertificateReport {
        samples: n_samples,
        seed,
        radius,
        sandwich_lower: InequalityStats::default(),
        sandwich_upper: InequalityStats::default(),
        decrease: InequalityStats::default(),
        jump: InequalityStats::default(),
    };
    let edges: Vec<_> = g.edges().collect();
    for s in 0..n_samples {
        let xi = sample_ball(&mut rng, sys.state_dim(), radius);
        let eta = sample_ball(&mut rng, sys.input_dim(), radius);
        let norm = xi.norm();
        let values: Vec<f64> = (0..sys.len()).map(|i| cert.value(VertexId(i), &xi)).collect();
        for (i, &v) in values.iter().enumerate() {
            let id = VertexId(i);
            let sub = sys.subsystem(id)?;
            report.sandwich_lower.record(cert.alpha_lower.eval(norm), v, s, id, None, &xi, &eta);
            report.sandwich_upper.record(v, cert.alpha_upper.eval(norm), s, id, None, &xi, &eta);
            let lhs = cert.value(id, &sub.step(&xi, &eta));
            let rhs = cert.rates[i] * v + cert.gamma1.eval(eta.norm()) + cert.gamma2.eval(sub.output(&xi).norm());
            report.decrease.record(lhs, rhs, s, id, None, &xi, &eta);
        }
        for e in &edges {
            let mu = cert.jump(e.from, e.to).expect("coverage checked");
            report.jump.record(values[e.to.0], mu * values[e.from.0], s, e.from, Some(e.to), &xi, &eta);
        }
    }
    Ok(report)
}

/// Samples nonzero points and checks `f_i(0, 0) = 0` and `f_i(ξ, 0) != 0`.
/// Returns the number of failing `(subsystem, point)` pairs.
pub fn check_zero_equilibrium(
    sys: &SwitchedSystem,
    n_samples: usize,
    seed: RngSeed,
    radius: f64,
) -> Result<usize, SimError> {
    let mut rng = SeededRng::new(seed);
    let zero_x = DVector::zeros(sys.state_dim());
    let zero_v = DVector::zeros(sys.input_dim());
    let mut failures = 0;
    for i in 0..sys.len() {
        if sys.subsystem(VertexId(i))?.step(&zero_x, &zero_v).iter().any(|&c| c != 0.0) {
            failures += 1;
        }
    }
    for _ in 0..n_samples {
        let xi = sample_ball(&mut rng, sys.state_dim(), radius);
        if xi.iter().all(|&c| c == 0.0) {
            continue;
        }
        for i in 0..sys.len() {
            if sys.subsystem(VertexId(i))?.step(&xi, &zero_v).iter().all(|&c| c == 0.0) {
                failures += 1;
            }
        }
    }
    Ok(failures)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionReport {
    pub gamma: f64,
    pub exp_gamma: f64,
    pub period: u64,
    pub lyapunov_start: f64,
    pub lyapunov_end: f64,
    /// `V_{v_0}(x(Δ_W)) / V_{v_0}(x(0))`; `None` when `V_{v_0}(x(0)) = 0`.
    pub ratio: Option<f64>,
}

impl ContractionReport {
    pub fn is_degenerate(&self) -> bool {
        self.ratio.is_none()
    }

    /// `ratio <= exp(Γ)` up to relative rounding.
    pub fn within_bound(&self) -> bool {
        self.ratio.is_some_and(|r| r <= self.exp_gamma * (1.0 + REL_TOL))
    }
}

/// Simulates one period of the signal built from `c` with zero input and
/// compares the Lyapunov decrease with `exp(Γ(W))`.
pub fn verify_period_contraction(
    sys: &SwitchedSystem,
    cert: &LyapunovCertificate,
    g: &WeightedDigraph,
    c: &TimedCycle,
    x0: &DVector<f64>,
) -> Result<ContractionReport, SimError> {
    cert.check_against(sys, g)?;
    let gamma = g.gamma(c)?;
    let sig = SwitchingSignal::synthesize_on(g, c)?;
    let traj = simulate(sys, &sig, x0, zero_input(sys.input_dim()), sig.period())?;
    let head = c.vertices()[0];
    let lyapunov_start = cert.value(head, &traj.states[0]);
    let lyapunov_end = cert.value(head, traj.final_state());
    let ratio = (lyapunov_start > 0.0).then(|| lyapunov_end / lyapunov_start);
    Ok(ContractionReport { gamma, exp_gamma: gamma.exp(), period: sig.period(), lyapunov_start, lyapunov_end, ratio })
}
