//! WebAssembly bindings for the browser demo. Each export returns a JSON
//! string; the plain functions underneath are what the native tests call.

use cycleswitch::experiment::{run_experiment, ExperimentConfig};
use cycleswitch::sim::{simulate, zero_input, SubsystemSpec, SwitchedSystem};
use cycleswitch::{
    detect_cycle, generate, Cycle, DwellWindow, Edge, GenConfig, RngSeed, SqrtGrowth, SwitchingSignal, TimedCycle,
    VertexId, WeightedDigraph,
};
use nalgebra::DVector;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const MAX_VERTICES: usize = 5000;

fn reference_gen(n_stable: usize, phi_coeff: f64, seed: RngSeed) -> Result<GenConfig, String> {
    if n_stable == 0 || n_stable > MAX_VERTICES {
        return Err(format!("|P_S| must be in 1..={MAX_VERTICES}"));
    }
    let gen = GenConfig { n_stable, phi: SqrtGrowth { coeff: phi_coeff }, seed, ..GenConfig::reference(seed) };
    gen.validate().map_err(|e| e.to_string())?;
    Ok(gen)
}

/// Empirical `P(Γ < 0)` per detected cycle length, with the lower bound.
pub fn probability_curve(
    n_stable: usize,
    phi_coeff: f64,
    trials: usize,
    sweep: usize,
    seed: u64,
) -> Result<Value, String> {
    let master = RngSeed(seed);
    let gen = reference_gen(n_stable, phi_coeff, master.derive(&[2]))?;
    let cfg = ExperimentConfig {
        trials_per_length: trials.clamp(1, 10_000),
        sweep_detections: sweep.clamp(1, 1000),
        ..ExperimentConfig::new(gen, master)
    };
    let r = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let rows: Vec<Value> = r
        .rows
        .iter()
        .map(|row| json!({ "n": row.n, "empirical": row.empirical(), "std_error": row.std_error(), "contractive": row.contractive }))
        .collect();
    Ok(json!({
        "rows": rows,
        "bound": r.theoretical_bound,
        "phi_floor": r.phi_floor,
        "trials": cfg.trials_per_length,
        "detections": r.detections,
        "csv": r.to_csv(),
    }))
}

/// Generates an instance, detects one cycle and unrolls it into a signal.
pub fn cycle_signal(
    n_stable: usize,
    phi_coeff: f64,
    graph_seed: u64,
    walk_seed: u64,
    periods: u32,
) -> Result<Value, String> {
    let gen = reference_gen(n_stable, phi_coeff, RngSeed(graph_seed))?;
    let inst = generate(&gen).map_err(|e| e.to_string())?;
    let r = detect_cycle(&inst.graph, RngSeed(walk_seed)).map_err(|e| e.to_string())?;
    let timed = inst.timed(&r.cycle);
    let gamma = inst.graph.gamma(&timed).map_err(|e| e.to_string())?;
    let sig = SwitchingSignal::synthesize_on(&inst.graph, &timed).map_err(|e| e.to_string())?;
    let horizon = sig.period() * u64::from(periods.clamp(1, 10));
    let ids = |vs: &[VertexId]| vs.iter().map(|v| v.0).collect::<Vec<_>>();
    Ok(json!({
        "cycle": ids(&r.cycle.vertices),
        "walk": ids(&r.walk_trace),
        "dwell": timed.dwell,
        "gamma": gamma,
        "contractive": gamma < 0.0,
        "phi_floor": gen.phi_floor(),
        "period": sig.period(),
        "admissible": sig.is_admissible(&inst.graph, horizon),
        "sigma": (0..=horizon).map(|t| sig.eval(t).0).collect::<Vec<_>>(),
    }))
}

/// Scalar ring `x ↦ a_k x` switched along `0 → 1 → … → 0` with the given dwell
/// times, `V = x²`. Returns the trajectory and the per-period ratio against `exp(Γ)`.
pub fn scalar_trajectory(gains: &[f64], dwell: &[u32], x0: f64, periods: u32) -> Result<Value, String> {
    let n = gains.len();
    if n < 2 || dwell.len() != n {
        return Err("need at least two gains and one dwell time per gain".into());
    }
    if gains.iter().any(|a| !a.is_finite() || *a == 0.0 || a.abs() == 1.0) {
        return Err("gains must be finite, nonzero and not ±1".into());
    }
    if dwell.iter().any(|&d| d == 0 || d > 50) {
        return Err("dwell times must be in 1..=50".into());
    }
    let weights: Vec<f64> = gains.iter().map(|a| (a * a).ln()).collect();
    let (stable, unstable): (Vec<_>, Vec<_>) = (0..n).map(VertexId).partition(|v| weights[v.0] < 0.0);
    let edges: Vec<Edge> = (0..n).map(|k| Edge { from: VertexId(k), to: VertexId((k + 1) % n), weight: 0.0 }).collect();
    let window =
        DwellWindow::new(*dwell.iter().min().unwrap(), *dwell.iter().max().unwrap()).map_err(|e| e.to_string())?;
    let g = WeightedDigraph::new(&stable, &unstable, &weights, &edges, window).map_err(|e| e.to_string())?;
    let timed = TimedCycle::new(Cycle::new(0..n), dwell.to_vec());
    let gamma = g.gamma(&timed).map_err(|e| e.to_string())?;

    let specs: Vec<SubsystemSpec> = gains.iter().map(|&a| SubsystemSpec::Scalar { a, b: 0.0, c: 0.0 }).collect();
    let sys = SwitchedSystem::from_specs(&specs).map_err(|e| e.to_string())?;
    let sig = SwitchingSignal::synthesize_on(&g, &timed).map_err(|e| e.to_string())?;
    let horizon = sig.period() * u64::from(periods.clamp(1, 200));
    let traj =
        simulate(&sys, &sig, &DVector::from_element(1, x0), zero_input(1), horizon).map_err(|e| e.to_string())?;
    let states: Vec<f64> = traj.states.iter().map(|x| x[0]).collect();
    let p = sig.period() as usize;
    let ratio = (x0 != 0.0).then(|| (states[p] / x0).powi(2));
    Ok(json!({
        "gamma": gamma,
        "exp_gamma": gamma.exp(),
        "ratio": ratio,
        "period": sig.period(),
        "x": states,
        "sigma": traj.sigma.iter().map(|v| v.0).collect::<Vec<_>>(),
    }))
}

fn to_js(r: Result<Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

// Seeds are u32 on the JS side so they stay plain numbers.
#[wasm_bindgen(js_name = probabilityCurve)]
pub fn probability_curve_js(
    n_stable: usize,
    phi_coeff: f64,
    trials: usize,
    sweep: usize,
    seed: u32,
) -> Result<String, JsValue> {
    to_js(probability_curve(n_stable, phi_coeff, trials, sweep, seed.into()))
}

#[wasm_bindgen(js_name = cycleSignal)]
pub fn cycle_signal_js(
    n_stable: usize,
    phi_coeff: f64,
    graph_seed: u32,
    walk_seed: u32,
    periods: u32,
) -> Result<String, JsValue> {
    to_js(cycle_signal(n_stable, phi_coeff, graph_seed.into(), walk_seed.into(), periods))
}

/// `gains` and `dwell` are comma-separated.
#[wasm_bindgen(js_name = scalarTrajectory)]
pub fn scalar_trajectory_js(gains: &str, dwell: &str, x0: f64, periods: u32) -> Result<String, JsValue> {
    let parse = |s: &str| -> Result<Vec<f64>, String> {
        s.split(',').map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}"))).collect()
    };
    let inner = || -> Result<Value, String> {
        let g = parse(gains)?;
        let d = parse(dwell)?;
        if d.iter().any(|&x| x.fract() != 0.0 || x < 0.0) {
            return Err("dwell times must be positive integers".into());
        }
        scalar_trajectory(&g, &d.iter().map(|&x| x as u32).collect::<Vec<_>>(), x0, periods)
    };
    to_js(inner())
}
