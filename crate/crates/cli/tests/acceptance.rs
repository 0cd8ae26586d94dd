//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::process::Command;
use std::time::Instant;

use cycleswitch::experiment::{run_experiment, ExperimentConfig, ExperimentResult};
use cycleswitch::graph::GrowthFn;
use cycleswitch::sim::{
    check_certificate, check_gas_decay, library, simulate, verify_period_contraction, zero_input, PowerGain,
};
use cycleswitch::{
    detect_cycle, generate, resample_cycle_weights, success_probability_bound, Cycle, GenConfig, NiceWeightParams,
    RngSeed, SeededRng, SqrtGrowth, SwitchingSignal, TimedCycle,
};
use nalgebra::DVector;

const SEED: u64 = 7;
const ORACLE_DRAWS: usize = 100_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// The reference configuration exactly as the `experiment` subcommand builds it.
fn reference_config(seed: u64) -> ExperimentConfig {
    let master = RngSeed(seed);
    let gen = GenConfig { seed: master.derive(&[2]), ..GenConfig::reference(master) };
    ExperimentConfig::new(gen, master)
}

fn sigma(p: f64, trials: usize) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

fn criterion_1(r: &ExperimentResult, seconds: f64) -> Outcome {
    let rows: Vec<_> = r.rows.iter().filter(|row| row.n >= 3).collect();
    if rows.is_empty() {
        return outcome(false, "no achieved lengths >= 3");
    }
    let min = rows.iter().map(|row| row.empirical()).fold(1.0, f64::min);
    let above = rows.iter().all(|row| row.empirical() >= 0.95);

    let mut monotone = true;
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            let slack = 3.0 * (a.std_error().powi(2) + b.std_error().powi(2)).sqrt();
            monotone &= b.empirical() >= a.empirical() - slack;
        }
    }

    // independent resampling oracle on the shortest achieved length, and at n = 3
    let p = &r.rows[0];
    let oracle_short = common::brute_contractive_probability(p.n, 2.5, 5.0, ORACLE_DRAWS, 1);
    let oracle_agrees = (p.empirical() - oracle_short).abs()
        <= 3.0 * (sigma(p.empirical(), p.trials).powi(2) + sigma(oracle_short, ORACLE_DRAWS).powi(2)).sqrt() + 1e-12;
    let model = GenConfig::reference(RngSeed(0)).weight_model();
    let triangle = common::complete_stable(3);
    let c3 = Cycle::new(0..3);
    let hits3 = (0..ORACLE_DRAWS as u64)
        .filter(|&t| {
            resample_cycle_weights(&triangle, &c3, &model, RngSeed(SEED).derive(&[3, t])).unwrap().is_contractive()
        })
        .count();
    let p3 = hits3 as f64 / ORACLE_DRAWS as f64;
    let oracle3 = common::brute_contractive_probability(3, 2.5, 5.0, ORACLE_DRAWS, 3);
    let n3_agrees = (p3 - oracle3).abs() <= 3.0 * (2.0 * sigma(oracle3, ORACLE_DRAWS).powi(2)).sqrt() && p3 >= 0.95;

    let fast = seconds < 60.0;
    outcome(
        above && monotone && oracle_agrees && n3_agrees && fast,
        format!(
            "{} rows, n in [{}, {}], min empirical {min:.6}; nondecreasing within 3 sigma: {monotone}; \
             oracle at n = {}: {oracle_short:.6}; n = 3 resampled {p3:.4} vs oracle {oracle3:.4}; {seconds:.1}s",
            rows.len(),
            rows[0].n,
            rows[rows.len() - 1].n,
            p.n
        ),
    )
}

fn criterion_2(r: &ExperimentResult) -> Outcome {
    let p = NiceWeightParams { delta: 2, alpha: 0.0, beta: 2.5, a: 2.5, b: 5.0 };
    let bound = success_probability_bound(&p, 3).unwrap();
    let exact = 1.0 - (-1.0f64 / 6.0).exp();
    let formula = (bound - exact).abs() <= 1e-12;
    let rows_ok = r.rows.iter().all(|row| {
        let e = row.empirical();
        e >= row.theoretical_bound - 3.0 * sigma(e, row.trials)
    });
    let same = r.rows.iter().all(|row| row.theoretical_bound == bound) && r.phi_floor == 3;
    outcome(
        formula && rows_ok && same,
        format!("bound {bound:.12} vs 1 - e^(-1/6) = {exact:.12}; all rows above bound - 3 sigma: {rows_ok}"),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = SeededRng::new(RngSeed(SEED).derive(&[30]));
    let mut failures = Vec::new();
    let mut min_len = usize::MAX;
    for i in 0..100u64 {
        let n_stable = rng.int_inclusive(10, 1000) as usize;
        let coeff = rng.closed(0.1, 1.0);
        let mut cfg = GenConfig {
            n_stable,
            n_unstable: rng.int_inclusive(0, 50) as usize,
            phi: SqrtGrowth { coeff },
            extra_edges: rng.int_inclusive(0, 100) as usize,
            ..GenConfig::reference(RngSeed(SEED).derive(&[31, i]))
        };
        if cfg.phi_floor() == 0 {
            cfg.phi = SqrtGrowth { coeff: 1.0 };
        }
        let inst = generate(&cfg).unwrap();
        let g = &inst.graph;
        let floor = cfg.phi.floor_at(n_stable);
        if !g.is_nicely_connected(&cfg.phi) {
            failures.push(format!("instance {i} not nicely connected"));
        }
        for s in 0..5u64 {
            let c = detect_cycle(g, RngSeed(SEED).derive(&[32, i, s])).unwrap().cycle;
            min_len = min_len.min(c.len());
            if !c.vertices.iter().all(|&v| g.is_stable(v)) || c.len() < floor || c.validate(g).is_err() {
                failures.push(format!("instance {i} seed {s}: {:?}", c.vertices));
            }
        }
    }
    let mut hamiltonian = 0;
    for s in 0..50u64 {
        let n = 5 + (s as usize % 20);
        let g = common::complete_stable(n);
        let c = detect_cycle(&g, RngSeed(1000 + s)).unwrap().cycle;
        if c.len() == n && c.validate(&g).is_ok() {
            hamiltonian += 1;
        }
    }
    outcome(
        failures.is_empty() && hamiltonian == 50,
        format!("500 detections on 100 instances, {} failures, shortest {min_len}; Hamiltonian on {hamiltonian}/50 complete digraphs", failures.len()),
    )
}

fn criterion_4() -> Outcome {
    let mut checked = 0usize;
    let mut disagreements = 0usize;
    for seed in 0..20u64 {
        let n = 3 + (seed as usize % 6);
        let window = (1 + (seed % 2) as u32, 3 + (seed % 3) as u32);
        let g = common::random_graph(seed, n, 0.5, 2.0, window);
        for cycle in common::enumerate_simple_cycles(&g) {
            for delta in window.0..=window.1 {
                let dwell = vec![delta; cycle.len()];
                let oracle = common::brute_gamma(&g, &cycle, &dwell) < 0.0;
                let t = TimedCycle::new(Cycle::new(cycle.iter().copied()), dwell);
                checked += 1;
                if g.is_delta_contractive(&t).unwrap() != oracle {
                    disagreements += 1;
                }
            }
        }
    }
    outcome(
        disagreements == 0 && checked > 0,
        format!("{checked} (cycle, Δ) pairs on 20 graphs, {disagreements} disagreements"),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = SeededRng::new(RngSeed(SEED).derive(&[50]));
    let mut bad = 0;
    for i in 0..100u64 {
        let n_stable = rng.int_inclusive(10, 300) as usize;
        let cfg = GenConfig {
            n_stable,
            n_unstable: 5,
            phi: SqrtGrowth { coeff: 0.5 },
            ..GenConfig::reference(RngSeed(SEED).derive(&[51, i]))
        };
        let inst = generate(&cfg).unwrap();
        let c = detect_cycle(&inst.graph, RngSeed(i)).unwrap().cycle;
        let w = inst.graph.window();
        let dwell: Vec<u32> = (0..c.len()).map(|_| rng.int_inclusive(w.min, w.max)).collect();
        let total: u64 = dwell.iter().map(|&d| u64::from(d)).sum();
        let t = TimedCycle::new(c, dwell);
        let sig = SwitchingSignal::synthesize_on(&inst.graph, &t).unwrap();
        if sig.period() != total || !sig.is_admissible(&inst.graph, 3 * sig.period()) {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("100 signals, {bad} inadmissible or with period != sum of dwell"))
}

fn criterion_6() -> Outcome {
    let ex = library::two_scalar_cycle();
    let c = TimedCycle::new(Cycle::new([0, 1]), vec![1, 1]);
    let x0 = DVector::from_element(1, 1.0);
    let report = verify_period_contraction(&ex.system, &ex.certificate, &ex.graph, &c, &x0).unwrap();
    let ratio = report.ratio.unwrap_or(f64::NAN);
    let ratio_ok = (ratio - 0.09).abs() <= 1e-9 * 0.09 && (report.exp_gamma - 0.09).abs() <= 1e-9 * 0.09;

    let sig = SwitchingSignal::synthesize_on(&ex.graph, &c).unwrap();
    let horizon = 10 * sig.period();
    let traj = simulate(&ex.system, &sig, &x0, zero_input(1), horizon).unwrap();
    let shrink = traj.final_state().norm() / x0.norm();
    let norm_ok = check_gas_decay(&ex.system, &sig, &x0, horizon, 1e-6, Some(&ex.certificate)).unwrap();
    outcome(
        ratio_ok && norm_ok,
        format!(
            "one-period ratio {ratio:.12} vs exp(Γ) {:.12}; ‖x(10 periods)‖/‖x0‖ = {shrink:.3e} (0.3^10), \
             V ratio = {:.3e} (0.09^10); the norm clause needs <= 1e-6",
            report.exp_gamma,
            shrink * shrink
        ),
    )
}

fn criterion_7() -> Outcome {
    let ex = library::young_scalar(0.5);
    let good = check_certificate(&ex.system, &ex.certificate, &ex.graph, 100_000, RngSeed(SEED), 1e3).unwrap();
    let mut bad = library::young_scalar(0.2);
    bad.certificate.gamma1 = PowerGain::ZERO;
    let caught = check_certificate(&bad.system, &bad.certificate, &bad.graph, 100, RngSeed(SEED), 1e3).unwrap();
    let first = caught.decrease.counterexample.as_ref().map(|c| c.sample);
    outcome(
        good.all_hold() && good.decrease.checks == 100_000 && first.is_some_and(|s| s < 100),
        format!(
            "λ = 0.5: {} violations over 10^5 samples; λ = 0.2: first counterexample at sample {first:?}",
            good.total_violations()
        ),
    )
}

fn criterion_8(library_csv: &str) -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_cycleswitch"))
            .args(["experiment", "--seed", &SEED.to_string(), "--out"])
            .arg(&out)
            .output()
            .expect("spawn cycleswitch");
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        std::fs::read(out).unwrap()
    };
    let (a, b) = std::thread::scope(|s| {
        let a = s.spawn(|| run("a.csv"));
        let b = s.spawn(|| run("b.csv"));
        (a.join().unwrap(), b.join().unwrap())
    });
    let identical = a == b;
    let matches_library = a == library_csv.as_bytes();
    outcome(
        identical && matches_library,
        format!(
            "two CLI runs, {} bytes each, identical: {identical}; equal to in-process CSV: {matches_library}",
            a.len()
        ),
    )
}

fn main() {
    let started = Instant::now();
    let cfg = reference_config(SEED);
    let t = Instant::now();
    let reference = run_experiment(&cfg).expect("reference experiment");
    let seconds = t.elapsed().as_secs_f64();

    let results = [
        ("1 reference experiment", criterion_1(&reference, seconds)),
        ("2 probability bound", criterion_2(&reference)),
        ("3 detection structure", criterion_3()),
        ("4 oracle equivalence", criterion_4()),
        ("5 signal admissibility", criterion_5()),
        ("6 per-period contraction", criterion_6()),
        ("7 certificate checker", criterion_7()),
        ("8 determinism", criterion_8(&reference.to_csv())),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("criterion {name}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed, {:.1}s", results.len() - failed, started.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
