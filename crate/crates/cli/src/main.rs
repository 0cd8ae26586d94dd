//! `cycleswitch` command-line tool.
//!
//! Exit codes: 0 on success, 2 on configuration/input errors, 3 on runtime errors.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cycleswitch::experiment::{run_experiment, ExperimentConfig};
use cycleswitch::io::{cycle_from_json, graph_from_json, graph_to_json, parse_inline_cycle, CycleSpec};
use cycleswitch::sim::{check_certificate, check_zero_equilibrium, simulate, verify_period_contraction, SystemFile};
use cycleswitch::{
    detect_cycle, generate, DwellWindow, GenConfig, RngSeed, SqrtGrowth, SwitchingSignal, TimedCycle, WeightedDigraph,
};
use nalgebra::DVector;

#[derive(Parser)]
#[command(
    name = "cycleswitch",
    version,
    about = "Stabilizing periodic switching signals via randomized cycle detection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random nicely connected, nicely weighted graph.
    Generate(GenerateArgs),
    /// Detect a cycle among the stable vertices of a graph.
    Detect(DetectArgs),
    /// Unroll a cycle into a periodic switching signal.
    Synthesize(SynthesizeArgs),
    /// Simulate a switched system under the signal built from a cycle.
    Simulate(SimulateArgs),
    /// Spot-check a Lyapunov certificate by sampling.
    Certify(CertifyArgs),
    /// Monte Carlo estimate of the contractive-cycle probability per length.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n_stable: usize,
    #[arg(long, default_value_t = 0)]
    n_unstable: usize,
    /// c in Φ(r) = c·√r
    #[arg(long)]
    phi_coeff: f64,
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"])]
    dwell: Vec<u32>,
    #[arg(long = "A")]
    a: f64,
    #[arg(long = "B")]
    b: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Clamp edge weights to [0, A].
    #[arg(long)]
    strict: bool,
    /// Additional random edges beyond the ⌊Φ⌋ stable outneighbors.
    #[arg(long, default_value_t = 0)]
    extra_edges: usize,
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CycleArgs {
    /// Cycle JSON file, or inline `0,1,2` / `0:2,1:3,2:2`.
    #[arg(long)]
    cycle: String,
    /// Uniform dwell when the cycle carries none (default: the window minimum).
    #[arg(long)]
    delta: Option<u32>,
}

#[derive(Args)]
struct SynthesizeArgs {
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    cycle: CycleArgs,
    #[arg(long)]
    horizon: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    system: PathBuf,
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    cycle: CycleArgs,
    /// Initial state, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    x0: String,
    /// `zero`, `const:v1,v2,...`, or a CSV file with one input row per step.
    #[arg(long, default_value = "zero", allow_hyphen_values = true)]
    input: String,
    #[arg(long)]
    horizon: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    system: PathBuf,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10.0)]
    radius: f64,
    /// Also check per-period contraction along this cycle (needs --x0).
    #[arg(long)]
    cycle: Option<String>,
    #[arg(long)]
    delta: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, default_value_t = 1000)]
    n_stable: usize,
    #[arg(long, default_value_t = 0)]
    n_unstable: usize,
    #[arg(long, default_value_t = 0.1)]
    phi_coeff: f64,
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], default_values_t = [2, 4])]
    dwell: Vec<u32>,
    #[arg(long = "A", default_value_t = 2.5)]
    a: f64,
    #[arg(long = "B", default_value_t = 5.0)]
    b: f64,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated target cycle lengths (default: lengths seen in a sweep).
    #[arg(long, value_delimiter = ',')]
    lengths: Option<Vec<usize>>,
    /// Detections in the initial sweep.
    #[arg(long, default_value_t = 100)]
    sweep: usize,
    /// Fill the `seconds` column with wall-clock times (output then varies run to run).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    strict: bool,
}

enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    fn config(e: impl ToString) -> Self {
        CliError::Config(e.to_string())
    }
    fn runtime(e: impl ToString) -> Self {
        CliError::Runtime(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Detect(a) => cmd_detect(a),
        Command::Synthesize(a) => cmd_synthesize(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Experiment(a) => cmd_experiment(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<WeightedDigraph> {
    graph_from_json(&read(path)?).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

fn window(dwell: &[u32]) -> Result<DwellWindow> {
    DwellWindow::new(dwell[0], dwell[1]).map_err(CliError::config)
}

fn load_cycle(g: &WeightedDigraph, args: &CycleArgs) -> Result<TimedCycle> {
    let spec: CycleSpec = if Path::new(&args.cycle).is_file() {
        cycle_from_json(&read(Path::new(&args.cycle))?).map_err(|e| CliError::config(format!("{}: {e}", args.cycle)))?
    } else {
        parse_inline_cycle(&args.cycle).map_err(CliError::config)?
    };
    let timed = spec.timed(args.delta.unwrap_or(g.window().min));
    timed.validate(g).map_err(CliError::config)?;
    Ok(timed)
}

fn parse_vector(s: &str) -> Result<DVector<f64>> {
    let values = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| CliError::config(format!("bad number {p:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(DVector::from_vec(values))
}

fn cmd_generate(a: GenerateArgs) -> Result<()> {
    let window = window(&a.dwell)?;
    let cfg = GenConfig {
        n_stable: a.n_stable,
        n_unstable: a.n_unstable,
        phi: SqrtGrowth { coeff: a.phi_coeff },
        params: GenConfig::implied_params(a.a, a.b, window, a.strict),
        window,
        seed: RngSeed(a.seed),
        strict: a.strict,
        extra_edges: a.extra_edges,
    };
    let inst = generate(&cfg).map_err(CliError::config)?;
    write(&a.out, &graph_to_json(&inst.graph))?;
    eprintln!(
        "wrote {} vertices, {} edges (stable outdegree {}) to {}",
        inst.graph.vertex_count(),
        inst.graph.edge_count(),
        cfg.phi_floor(),
        a.out.display()
    );
    Ok(())
}

fn cmd_detect(a: DetectArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let r = detect_cycle(&g, RngSeed(a.seed)).map_err(CliError::runtime)?;
    let ids: Vec<usize> = r.cycle.vertices.iter().map(|v| v.0).collect();
    if a.json {
        println!("{}", serde_json::json!({ "vertices": ids, "length": ids.len() }));
    } else {
        let path: Vec<String> = ids.iter().map(usize::to_string).collect();
        println!("cycle: {} -> {}", path.join(" -> "), ids[0]);
        println!("length: {}", ids.len());
        let gamma = g.gamma(&TimedCycle::uniform(r.cycle.clone(), g.window().min)).map_err(CliError::runtime)?;
        println!("gamma (uniform dwell {}): {gamma}", g.window().min);
    }
    Ok(())
}

fn cmd_synthesize(a: SynthesizeArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let c = load_cycle(&g, &a.cycle)?;
    let sig = SwitchingSignal::synthesize_on(&g, &c).map_err(CliError::config)?;
    if !sig.is_admissible(&g, a.horizon.max(sig.period())) {
        return Err(CliError::runtime("synthesized signal is not admissible"));
    }
    let mut out = String::from("t,sigma\n");
    for t in 0..=a.horizon {
        let _ = writeln!(out, "{t},{}", sig.eval(t));
    }
    write(&a.out, &out)?;
    eprintln!("period {}; gamma {}", sig.period(), g.gamma(&c).map_err(CliError::runtime)?);
    Ok(())
}

fn input_fn(spec: &str, dim: usize) -> Result<Box<dyn Fn(u64) -> DVector<f64>>> {
    if spec == "zero" {
        return Ok(Box::new(move |_| DVector::zeros(dim)));
    }
    if let Some(v) = spec.strip_prefix("const:") {
        let v = parse_vector(v)?;
        if v.len() != dim {
            return Err(CliError::config(format!("input has {} components, system expects {dim}", v.len())));
        }
        return Ok(Box::new(move |_| v.clone()));
    }
    let text = read(Path::new(spec))?;
    let rows = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .filter(|l| l.trim_start().starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '.' || c == '+'))
        .map(parse_vector)
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != dim) {
        return Err(CliError::config(format!("{spec}: need at least one row of {dim} inputs")));
    }
    // the last row is held beyond the end of the file
    Ok(Box::new(move |t| rows[(t as usize).min(rows.len() - 1)].clone()))
}

fn load_system(path: &Path) -> Result<SystemFile> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

fn cmd_simulate(a: SimulateArgs) -> Result<()> {
    let file = load_system(&a.system)?;
    let sys = file.build().map_err(CliError::config)?;
    let g = load_graph(&a.graph)?;
    sys.check_against(&g).map_err(CliError::config)?;
    let c = load_cycle(&g, &a.cycle)?;
    let sig = SwitchingSignal::synthesize_on(&g, &c).map_err(CliError::config)?;
    let x0 = parse_vector(&a.x0)?;
    let input = input_fn(&a.input, sys.input_dim())?;
    let traj = simulate(&sys, &sig, &x0, input, a.horizon).map_err(|e| match e {
        cycleswitch::sim::SimError::NonFinite { .. } => CliError::runtime(e),
        other => CliError::config(other),
    })?;

    let mut out = String::from("t,sigma");
    for i in 1..=sys.state_dim() {
        let _ = write!(out, ",x_{i}");
    }
    for i in 1..=sys.output_dim() {
        let _ = write!(out, ",y_{i}");
    }
    out.push('\n');
    for (t, ((x, y), s)) in traj.states.iter().zip(&traj.outputs).zip(&traj.sigma).enumerate() {
        let _ = write!(out, "{t},{s}");
        for v in x.iter().chain(y.iter()) {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    write(&a.out, &out)?;
    let b = traj.response_bounds();
    eprintln!(
        "sup|x| = {:.6e}, sup|v| = {:.6e}, sup|y| = {:.6e}, |x(T)| = {:.6e}",
        b.sup_state,
        b.sup_input,
        b.sup_output,
        traj.final_state().norm()
    );
    Ok(())
}

fn cmd_certify(a: CertifyArgs) -> Result<()> {
    let file = load_system(&a.system)?;
    let sys = file.build().map_err(CliError::config)?;
    let g = load_graph(&a.graph)?;
    sys.check_against(&g).map_err(CliError::config)?;
    let cert = file
        .certificate
        .as_ref()
        .ok_or_else(|| CliError::config("system file has no certificate"))?
        .build(sys.state_dim())
        .map_err(CliError::config)?;
    let report = check_certificate(&sys, &cert, &g, a.samples, RngSeed(a.seed), a.radius).map_err(CliError::config)?;
    let equilibrium_failures =
        check_zero_equilibrium(&sys, a.samples.min(1000), RngSeed(a.seed).derive(&[1]), a.radius)
            .map_err(CliError::config)?;
    let contraction = match (&a.cycle, &a.x0) {
        (Some(cycle), Some(x0)) => {
            let c = load_cycle(&g, &CycleArgs { cycle: cycle.clone(), delta: a.delta })?;
            let x0 = parse_vector(x0)?;
            Some(verify_period_contraction(&sys, &cert, &g, &c, &x0).map_err(CliError::config)?)
        }
        (None, None) => None,
        _ => return Err(CliError::config("--cycle and --x0 go together")),
    };

    if a.json {
        println!(
            "{}",
            serde_json::json!({
                "certificate": report,
                "equilibrium_failures": equilibrium_failures,
                "contraction": contraction,
            })
        );
        return Ok(());
    }
    println!("samples {} (seed {}, radius {})", report.samples, report.seed.0, report.radius);
    for (name, s) in [
        ("sandwich lower", &report.sandwich_lower),
        ("sandwich upper", &report.sandwich_upper),
        ("decrease", &report.decrease),
        ("jump", &report.jump),
    ] {
        let status = if s.holds() { "ok" } else { "VIOLATED" };
        println!(
            "{name:>15}: {status} ({} checks, {} violations, worst margin {:?})",
            s.checks, s.violations, s.worst_margin
        );
        if let Some(ce) = &s.counterexample {
            println!(
                "{:>15}  counterexample at sample {}: xi = {:?}, eta = {:?}, lhs {} > rhs {}",
                "", ce.sample, ce.xi, ce.eta, ce.lhs, ce.rhs
            );
        }
    }
    println!("{:>15}: {equilibrium_failures} failures", "equilibrium");
    if let Some(c) = contraction {
        match c.ratio {
            Some(r) => {
                println!("{:>15}: ratio {r:.12e} vs exp(gamma) {:.12e} over period {}", "period", c.exp_gamma, c.period)
            }
            None => println!("{:>15}: degenerate (V(x0) = 0)", "period"),
        }
    }
    Ok(())
}

fn cmd_experiment(a: ExperimentArgs) -> Result<()> {
    let window = window(&a.dwell)?;
    let master = RngSeed(a.seed);
    let gen = GenConfig {
        n_stable: a.n_stable,
        n_unstable: a.n_unstable,
        phi: SqrtGrowth { coeff: a.phi_coeff },
        params: GenConfig::implied_params(a.a, a.b, window, a.strict),
        window,
        seed: master.derive(&[2]),
        strict: a.strict,
        extra_edges: 0,
    };
    let cfg = ExperimentConfig {
        gen,
        lengths: a.lengths,
        trials_per_length: a.trials,
        master_seed: master,
        sweep_detections: a.sweep,
        record_timing: a.timing,
    };
    let started = std::time::Instant::now();
    let result = run_experiment(&cfg).map_err(|e| match e {
        cycleswitch::experiment::ExperimentError::NoCycles(_) => CliError::runtime(e),
        other => CliError::config(other),
    })?;
    write(&a.out, &result.to_csv())?;
    for n in &result.unreachable {
        eprintln!("length {n}: not found within {} detections, used nearest", cfg.retry_budget());
    }
    eprintln!(
        "{} rows, bound {:.6} (floor phi = {}), {} detections, {:.3}s; wrote {}",
        result.rows.len(),
        result.theoretical_bound,
        result.phi_floor,
        result.detections,
        started.elapsed().as_secs_f64(),
        a.out.display()
    );
    Ok(())
}
