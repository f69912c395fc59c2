//! Command-line frontend: single Riemann solves, regime classification,
//! phase-diagram sweeps and finite-volume simulations.
//!
//! Exit codes: 0 on success, 2 for usage or configuration errors, 3 for
//! solver domain errors, 1 for anything else (I/O).

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use isopipe::classify::{classify, sweep_grid, SweepSide};
use isopipe::godunov::{run, Grid1D, SimConfig};
use isopipe::riemann::{solve_rp, WaveFan};
use isopipe::state::{GasParams, State};
use isopipe::valve::{solve_coupled, ValveConfig, ValveDecision, ValveError, ValveModel};

use config::SimFile;
use output::{fmt_f64, write_profile_csv, write_sweep_csv, FanSidecar};

#[derive(Debug)]
enum CliError {
    /// Bad arguments or configuration: exit 2.
    Usage(String),
    /// Solver domain error: exit 3.
    Domain(String),
    /// I/O failure: exit 1.
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Domain(_) => ExitCode::from(3),
            CliError::Io(_) => ExitCode::from(1),
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Domain(m) | CliError::Io(m) => m,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "isopipe",
    about = "Exact Riemann solvers and Godunov simulation for isothermal pipe flow with a valve at x = 0"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one Riemann problem and write the sampled profile (CSV) plus
    /// a wave-fan description (JSON sidecar next to the CSV)
    Riemann(RiemannArgs),
    /// Classify a datum pair for the electronic valve and print the report
    Classify(ClassifyArgs),
    /// Grid one datum over a (mu, nu) window against a fixed datum and
    /// write the regime map as CSV
    Sweep(SweepArgs),
    /// Run a finite-volume simulation from a JSON config
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct RiemannArgs {
    /// Left datum as RHO,Q
    #[arg(long, allow_hyphen_values = true, value_parser = parse_state_arg)]
    left: State,
    /// Right datum as RHO,Q
    #[arg(long, allow_hyphen_values = true, value_parser = parse_state_arg)]
    right: State,
    /// Sound speed
    #[arg(long)]
    a: f64,
    /// Valve model as JSON, e.g. {"type":"electronic","M":1.5}; without it
    /// the classical solver is used
    #[arg(long)]
    valve: Option<String>,
    /// Sampling time
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Sampling window as LO:HI
    #[arg(long, default_value = "-5:5", allow_hyphen_values = true, value_parser = parse_range_arg)]
    xrange: (f64, f64),
    /// Number of sample points
    #[arg(long, default_value_t = 1001)]
    samples: usize,
    /// Output CSV path (the JSON sidecar replaces its extension with .json)
    #[arg(long, default_value = "riemann.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_state_arg)]
    left: State,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_state_arg)]
    right: State,
    #[arg(long)]
    a: f64,
    /// Electronic valve threshold
    #[arg(long = "M")]
    m: f64,
}

#[derive(Args)]
struct SweepArgs {
    /// Which datum stays fixed: left or right
    #[arg(long, value_parser = parse_side_arg)]
    slice: SweepSide,
    /// The fixed datum as RHO,Q
    #[arg(long, allow_hyphen_values = true, value_parser = parse_state_arg)]
    state: State,
    /// mu axis of the swept datum as LO:HI:N
    #[arg(long, allow_hyphen_values = true, value_parser = parse_axis_arg)]
    mu: (f64, f64, usize),
    /// nu axis of the swept datum as LO:HI:N
    #[arg(long, allow_hyphen_values = true, value_parser = parse_axis_arg)]
    nu: (f64, f64, usize),
    #[arg(long = "M")]
    m: f64,
    #[arg(long)]
    a: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON simulation config
    #[arg(long)]
    config: PathBuf,
}

fn parse_state_arg(s: &str) -> Result<State, String> {
    let (rho, q) = s
        .split_once(',')
        .ok_or_else(|| format!("expected RHO,Q, got `{s}`"))?;
    let rho: f64 = rho.trim().parse().map_err(|e| format!("bad density: {e}"))?;
    let q: f64 = q.trim().parse().map_err(|e| format!("bad momentum: {e}"))?;
    State::new(rho, q).map_err(|e| e.to_string())
}

fn parse_range_arg(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got `{s}`"))?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("bad bound: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("bad bound: {e}"))?;
    if !(lo < hi) {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok((lo, hi))
}

fn parse_axis_arg(s: &str) -> Result<(f64, f64, usize), String> {
    let mut parts = s.split(':');
    let (lo, hi, n) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
        (Some(lo), Some(hi), Some(n), None) => (lo, hi, n),
        _ => return Err(format!("expected LO:HI:N, got `{s}`")),
    };
    let lo: f64 = lo.trim().parse().map_err(|e| format!("bad bound: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("bad bound: {e}"))?;
    let n: usize = n.trim().parse().map_err(|e| format!("bad count: {e}"))?;
    if n == 0 {
        return Err("axis resolution must be at least 1".into());
    }
    Ok((lo, hi, n))
}

fn parse_side_arg(s: &str) -> Result<SweepSide, String> {
    match s {
        "left" => Ok(SweepSide::FixLeft),
        "right" => Ok(SweepSide::FixRight),
        other => Err(format!("expected `left` or `right`, got `{other}`")),
    }
}

fn gas(a: f64) -> Result<GasParams, CliError> {
    GasParams::new(a).map_err(|e| CliError::Usage(e.to_string()))
}

fn domain_err(e: ValveError) -> CliError {
    CliError::Domain(e.to_string())
}

fn axis_points((lo, hi, n): (f64, f64, usize)) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn cmd_riemann(args: &RiemannArgs) -> Result<(), CliError> {
    let g = gas(args.a)?;
    if args.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    if !(args.t >= 0.0) {
        return Err(CliError::Usage(format!(
            "--t must be nonnegative, got {}",
            args.t
        )));
    }
    let valve_cfg: Option<ValveConfig> = match &args.valve {
        None => None,
        Some(json) => Some(
            serde_json::from_str(json)
                .map_err(|e| CliError::Usage(format!("bad --valve JSON: {e}")))?,
        ),
    };
    let (fan, decision): (WaveFan, Option<ValveDecision>) = match &valve_cfg {
        None => (solve_rp(args.left, args.right, g), None),
        Some(cfg) => {
            let model = cfg.build().map_err(|e| CliError::Usage(e.to_string()))?;
            let decision = model
                .decide(args.left, args.right, g)
                .map_err(domain_err)?;
            let fan = solve_coupled(args.left, args.right, &*model, g).map_err(domain_err)?;
            (fan, Some(decision))
        }
    };
    let (lo, hi) = args.xrange;
    let xs = axis_points((lo, hi, args.samples));
    write_profile_csv(&args.out, args.t, &xs, |x| {
        if args.t > 0.0 {
            fan.sample(x / args.t, g)
        } else if x < 0.0 {
            args.left
        } else {
            args.right
        }
    }, g)?;
    let sidecar = FanSidecar::new(args.a, args.t, &fan, decision, valve_cfg, g);
    let json_path = args.out.with_extension("json");
    std::fs::write(
        &json_path,
        serde_json::to_string_pretty(&sidecar).expect("sidecar serializes") + "\n",
    )?;
    Ok(())
}

fn cmd_classify(args: &ClassifyArgs) -> Result<(), CliError> {
    let g = gas(args.a)?;
    if !(args.m > 0.0) {
        return Err(CliError::Usage(format!(
            "--M must be strictly positive, got {}",
            args.m
        )));
    }
    let report = classify(args.left, args.right, args.m, g);
    println!(
        "{}",
        serde_json::to_string(&report).expect("report serializes")
    );
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let g = gas(args.a)?;
    if !(args.m > 0.0) {
        return Err(CliError::Usage(format!(
            "--M must be strictly positive, got {}",
            args.m
        )));
    }
    let mus = axis_points(args.mu);
    let nus = axis_points(args.nu);
    let rows = sweep_grid(args.slice, args.state, &mus, &nus, args.m, g);
    write_sweep_csv(&args.out, &rows)?;
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", args.config.display())))?;
    let file: SimFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config: {e}")))?;
    file.validate().map_err(CliError::Usage)?;

    let g = gas(file.a)?;
    let profile = file.profile(g).map_err(CliError::Usage)?;
    let (x_min, x_max) = file.domain();
    let mut grid = Grid1D::from_profile(x_min, x_max, file.n_cells, |x| profile(x))
        .map_err(|e| CliError::Usage(format!("config: {e}")))?;
    let valve = file
        .valve
        .build()
        .map_err(|e| CliError::Usage(format!("config key valve: {e}")))?;
    let cfg = SimConfig {
        cfl: file.cfl,
        t_end: file.t_end,
        boundary: file.boundary,
        valve,
        g,
        output_every: file.output_every,
    };

    let snapshot_file = std::fs::File::create(&file.out)?;
    let mut writer = std::io::BufWriter::new(snapshot_file);
    output::write_snapshot_header(&mut writer)?;
    let mut snapshot_io: Result<(), std::io::Error> = Ok(());
    let report = run(&mut grid, &cfg, |grid| {
        if snapshot_io.is_ok() {
            snapshot_io = output::append_snapshot(&mut writer, grid, g);
        }
    })
    .map_err(|e| CliError::Domain(format!("simulation: {e}")))?;
    snapshot_io?;
    use std::io::Write;
    writer.flush()?;

    output::write_events_csv(&file.events_path(), &report.events)?;

    let drift = report.mass_final - report.mass_initial - report.boundary_mass;
    println!("steps: {}", report.steps);
    println!("final time: {}", fmt_f64(grid.time));
    println!(
        "mass: initial {} final {} boundary {} residual {}",
        fmt_f64(report.mass_initial),
        fmt_f64(report.mass_final),
        fmt_f64(report.boundary_mass),
        fmt_f64(drift)
    );
    println!(
        "mass residual relative: {}",
        fmt_f64(drift.abs() / report.mass_initial.abs().max(f64::MIN_POSITIVE))
    );
    println!(
        "momentum: initial {} final {} boundary {} valve_deficit {} residual {}",
        fmt_f64(report.momentum_initial),
        fmt_f64(report.momentum_final),
        fmt_f64(report.boundary_momentum),
        fmt_f64(report.momentum_deficit),
        fmt_f64(report.momentum_residual())
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Riemann(args) => cmd_riemann(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Simulate(args) => cmd_simulate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
