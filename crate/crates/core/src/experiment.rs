//! Monte Carlo estimate of how often detected cycles are Δ-contractive.
//!
//! One instance is generated, cycles are detected from random start
//! vertices, and for every cycle length the cycle's weights and dwell times
//! are redrawn `trials_per_length` times. Each redraw counts as a success when
//! `Γ < 0`. Trial `t` of length `n` uses the stream
//! `master_seed.derive([1, n, t])`, so counts do not depend on execution order.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use web_time::Instant;

use crate::detect::{detect_cycle, success_probability_bound};
use crate::generate::{generate, resample_cycle_weights, GenConfig, GenError, Instance};
use crate::graph::Cycle;
use crate::rng::RngSeed;

pub const CSV_HEADER: &str = "n,trials,contractive,empirical_prob,theoretical_bound,seconds";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error("no cycle could be detected in {0} attempts")]
    NoCycles(usize),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub gen: GenConfig,
    /// Target cycle lengths; `None` uses every length seen in an initial sweep.
    pub lengths: Option<Vec<usize>>,
    pub trials_per_length: usize,
    pub master_seed: RngSeed,
    /// Number of detections in the initial sweep.
    pub sweep_detections: usize,
    /// Record per-row wall-clock time; when false the `seconds` column is 0
    /// and output is reproducible byte for byte.
    pub record_timing: bool,
}

impl ExperimentConfig {
    pub fn new(gen: GenConfig, master_seed: RngSeed) -> Self {
        Self { gen, lengths: None, trials_per_length: 1000, master_seed, sweep_detections: 100, record_timing: false }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        self.gen.validate()?;
        if self.trials_per_length == 0 {
            return Err(ExperimentError::Config("trials_per_length must be at least 1".into()));
        }
        if self.lengths.as_ref().is_some_and(|l| l.is_empty()) {
            return Err(ExperimentError::Config("lengths must be nonempty".into()));
        }
        if self.lengths.as_ref().is_some_and(|l| l.iter().any(|&n| n < 2)) {
            return Err(ExperimentError::Config("cycle lengths start at 2".into()));
        }
        if self.lengths.is_none() && self.sweep_detections == 0 {
            return Err(ExperimentError::Config("sweep_detections must be at least 1".into()));
        }
        Ok(())
    }

    /// Retry budget per requested length, `10·|P_S|` detections.
    pub fn retry_budget(&self) -> usize {
        10 * self.gen.n_stable
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthRow {
    /// Requested length when it differs from the achieved one.
    pub requested: Option<usize>,
    pub n: usize,
    pub trials: usize,
    pub contractive: usize,
    pub theoretical_bound: f64,
    pub seconds: f64,
    pub cycle: Cycle,
}

impl LengthRow {
    pub fn empirical(&self) -> f64 {
        self.contractive as f64 / self.trials as f64
    }

    /// Binomial standard error `sqrt(p(1-p)/trials)`.
    pub fn std_error(&self) -> f64 {
        let p = self.empirical();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub rows: Vec<LengthRow>,
    /// Requested lengths that were not found within the retry budget.
    pub unreachable: Vec<usize>,
    pub phi_floor: usize,
    pub theoretical_bound: f64,
    pub detections: usize,
    pub dead_ends: usize,
}

impl ExperimentResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{:.6},{:.6}",
                r.n,
                r.trials,
                r.contractive,
                ratio_6dp(r.contractive as u64, r.trials as u64),
                r.theoretical_bound,
                r.seconds
            );
        }
        out
    }
}

/// `num/den` with 6 decimals, rounded half to even, computed exactly.
pub fn ratio_6dp(num: u64, den: u64) -> String {
    assert!(den > 0);
    let scaled = u128::from(num) * 1_000_000;
    let den = u128::from(den);
    let mut q = scaled / den;
    let rem = scaled % den;
    if 2 * rem > den || (2 * rem == den && q % 2 == 1) {
        q += 1;
    }
    format!("{}.{:06}", q / 1_000_000, q % 1_000_000)
}

pub fn export_csv(r: &ExperimentResult, path: &Path) -> Result<(), ExperimentError> {
    std::fs::write(path, r.to_csv())?;
    Ok(())
}

struct CyclePool<'a> {
    instance: &'a Instance,
    master: RngSeed,
    by_length: BTreeMap<usize, Cycle>,
    attempts: usize,
    dead_ends: usize,
}

impl CyclePool<'_> {
    fn detect_once(&mut self) {
        let seed = self.master.derive(&[0, self.attempts as u64]);
        self.attempts += 1;
        match detect_cycle(&self.instance.graph, seed) {
            Ok(r) => {
                self.by_length.entry(r.cycle.len()).or_insert(r.cycle);
            }
            Err(_) => self.dead_ends += 1,
        }
    }

    fn find(&mut self, n: usize, budget: usize) -> bool {
        let mut spent = 0;
        while !self.by_length.contains_key(&n) && spent < budget {
            self.detect_once();
            spent += 1;
        }
        self.by_length.contains_key(&n)
    }

    fn nearest(&self, n: usize) -> Option<(usize, Cycle)> {
        self.by_length.iter().min_by_key(|(&len, _)| (len.abs_diff(n), len)).map(|(&len, c)| (len, c.clone()))
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, ExperimentError> {
    cfg.validate()?;
    let instance = generate(&cfg.gen)?;
    let phi_floor = cfg.gen.phi_floor();
    let bound =
        success_probability_bound(&cfg.gen.params, phi_floor).map_err(|e| ExperimentError::Config(e.to_string()))?;
    let mut pool = CyclePool {
        instance: &instance,
        master: cfg.master_seed,
        by_length: BTreeMap::new(),
        attempts: 0,
        dead_ends: 0,
    };

    // (requested, achieved length, cycle)
    let mut targets: Vec<(Option<usize>, usize, Cycle)> = Vec::new();
    let mut unreachable = Vec::new();
    match &cfg.lengths {
        None => {
            for _ in 0..cfg.sweep_detections {
                pool.detect_once();
            }
            if pool.by_length.is_empty() {
                return Err(ExperimentError::NoCycles(pool.attempts));
            }
            targets.extend(pool.by_length.iter().map(|(&n, c)| (None, n, c.clone())));
        }
        Some(lengths) => {
            let mut wanted = lengths.clone();
            wanted.sort_unstable();
            wanted.dedup();
            for n in wanted {
                if pool.find(n, cfg.retry_budget()) {
                    targets.push((None, n, pool.by_length[&n].clone()));
                    continue;
                }
                unreachable.push(n);
                let (len, c) = pool.nearest(n).ok_or(ExperimentError::NoCycles(pool.attempts))?;
                targets.push((Some(n), len, c));
            }
        }
    }

    let model = cfg.gen.weight_model();
    let mut rows = Vec::with_capacity(targets.len());
    for (requested, n, cycle) in targets {
        let started = Instant::now();
        let mut contractive = 0;
        for t in 0..cfg.trials_per_length {
            let seed = cfg.master_seed.derive(&[1, n as u64, t as u64]);
            let draw =
                resample_cycle_weights(&instance.graph, &cycle, &model, seed).expect("detected cycles are valid");
            if draw.is_contractive() {
                contractive += 1;
            }
        }
        let seconds = if cfg.record_timing { started.elapsed().as_secs_f64() } else { 0.0 };
        rows.push(LengthRow {
            requested,
            n,
            trials: cfg.trials_per_length,
            contractive,
            theoretical_bound: bound,
            seconds,
            cycle,
        });
    }

    Ok(ExperimentResult {
        rows,
        unreachable,
        phi_floor,
        theoretical_bound: bound,
        detections: pool.attempts,
        dead_ends: pool.dead_ends,
    })
}
