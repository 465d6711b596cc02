//! `pacing-dyn` — simulate budget-paced repeated auctions, solve and certify
//! the adversary instances, analyze traces, and run the reproduction suites.
//!
//! Exit codes: 0 when everything passes, 1 when any verdict fails, 2 for
//! usage or config errors.

use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use pacing_core::adversary::{
    dp_optimal, enumerate_optimal, interval_lagrangian_bound, lagrangian_value, theorem_win_cap,
    AdversaryProblem, DpRounding, LagrangianCertificate, WinSequence,
};
use pacing_core::dynamics;
use pacing_core::engine::{MarketConfig, Trace};
use pacing_runner::config::PointSidecar;
use pacing_runner::{criteria, load_config, run, Suite};

#[derive(Parser)]
#[command(name = "pacing-dyn", version, about = "Budget-pacing auction lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the base point of an experiment config and persist its trace.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Expand the sweep of an experiment config and run every point.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Adversary-instance solvers and certificates.
    Adversary {
        #[command(subcommand)]
        command: AdversaryCommand,
    },
    /// Trace analyzers; JSON Lines on stdout.
    Analyze {
        #[command(subcommand)]
        command: AnalyzeCommand,
    },
    /// Reproduction suites; verdicts as JSON Lines on stdout.
    Reproduce {
        /// One of: adversary-cap, lagrangian-cert, discrepancy, round-robin,
        /// milestones.
        suite: String,
    },
}

#[derive(Subcommand)]
enum AdversaryCommand {
    /// Solve one instance; prints {instance, wins, cap, feasible_cost,
    /// certificate_ok}.
    Solve(SolveArgs),
    /// Solve and certify every instance of a CSV sweep file
    /// (header rho_l,rho_o,eta[,b1]) at a fixed horizon.
    Certify {
        #[arg(long = "T")]
        horizon: usize,
        #[arg(long = "sweep-file")]
        sweep_file: PathBuf,
    },
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long = "rho-l")]
    rho_l: f64,
    #[arg(long = "rho-o")]
    rho_o: f64,
    #[arg(long = "T")]
    horizon: usize,
    /// Learning rate; defaults to 1/sqrt(T).
    #[arg(long)]
    eta: Option<f64>,
    /// Learner's initial bid; defaults to rho_l.
    #[arg(long)]
    b1: Option<f64>,
    #[arg(long, default_value = "enum")]
    method: SolveMethod,
    /// Grid intervals per axis for the DP method.
    #[arg(long, default_value_t = 256)]
    grid: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum SolveMethod {
    Enum,
    Dp,
}

#[derive(Subcommand)]
enum AnalyzeCommand {
    /// Potential value and bid geometry per round.
    Potential(AnalyzeArgs),
    /// Convergence milestones and the final bid band.
    Milestones(AnalyzeArgs),
    /// Sliding-window win discrepancy per agent.
    Discrepancy(AnalyzeArgs),
    /// Round-robin onset, ordering condition, and window discrepancy.
    Roundrobin(AnalyzeArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Trace CSV produced by simulate/sweep.
    #[arg(long)]
    trace: PathBuf,
    /// Market config sidecar; defaults to `<trace stem>.config.json`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Window length τ for discrepancy scans.
    #[arg(long, default_value_t = 100)]
    window: usize,
    /// Emit every s-th window / round.
    #[arg(long, default_value_t = 1)]
    stride: usize,
    /// Analysis parameter D for the milestone scan; defaults to the
    /// first-pass value.
    #[arg(long)]
    d: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(all_pass) => {
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

/// Prints one output line, exiting quietly when the consumer closed the
/// pipe (e.g. `pacing-dyn ... | head`).
fn emit(line: impl std::fmt::Display) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = writeln!(out, "{line}") {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        panic!("failed writing to stdout: {e}");
    }
}

fn dispatch(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Simulate { config } => {
            let experiment = load_config(&config)
                .map_err(|e| e.to_string())?
                .without_sweep();
            let records = run(&experiment).map_err(|e| e.to_string())?;
            for record in &records {
                emit(serde_json::to_string(record).unwrap());
            }
            Ok(records.iter().all(|r| r.error.is_none()))
        }
        Command::Sweep { config } => {
            let experiment = load_config(&config).map_err(|e| e.to_string())?;
            let records = run(&experiment).map_err(|e| e.to_string())?;
            for record in &records {
                emit(serde_json::to_string(record).unwrap());
            }
            Ok(records.iter().all(|r| r.error.is_none()))
        }
        Command::Adversary { command } => match command {
            AdversaryCommand::Solve(args) => {
                let problem = AdversaryProblem::new(
                    args.rho_l,
                    args.rho_o,
                    args.horizon,
                    args.eta.unwrap_or(1.0 / (args.horizon as f64).sqrt()),
                    args.b1.unwrap_or(args.rho_l),
                );
                let record = solve_record(&problem, args.method, args.grid)?;
                emit(&record);
                Ok(true)
            }
            AdversaryCommand::Certify {
                horizon,
                sweep_file,
            } => certify_file(horizon, &sweep_file),
        },
        Command::Analyze { command } => match command {
            AnalyzeCommand::Potential(args) => analyze_potential(&args),
            AnalyzeCommand::Milestones(args) => analyze_milestones(&args),
            AnalyzeCommand::Discrepancy(args) => analyze_discrepancy(&args),
            AnalyzeCommand::Roundrobin(args) => analyze_roundrobin(&args),
        },
        Command::Reproduce { suite } => {
            let suite = Suite::parse(&suite).ok_or_else(|| {
                format!(
                    "unknown suite '{suite}'; expected one of {}",
                    Suite::NAMES.join(", ")
                )
            })?;
            let verdicts = suite.run();
            for v in &verdicts {
                emit(serde_json::to_string(v).unwrap());
                eprintln!("{}", v.summary_line());
            }
            Ok(criteria::all_pass(&verdicts))
        }
    }
}

fn solve_record(
    problem: &AdversaryProblem,
    method: SolveMethod,
    grid: usize,
) -> Result<String, String> {
    let cap = theorem_win_cap(problem.rho_l, problem.rho_o, problem.horizon, problem.eta);
    let (wins, sequence, extra) = match method {
        SolveMethod::Enum => {
            let seq = enumerate_optimal(problem).map_err(|e| e.to_string())?;
            (seq.wins, seq, json!({ "method": "enum" }))
        }
        SolveMethod::Dp => {
            let lo = dp_optimal(problem, grid, grid, DpRounding::Pessimistic)
                .map_err(|e| e.to_string())?;
            let hi = dp_optimal(problem, grid, grid, DpRounding::Optimistic)
                .map_err(|e| e.to_string())?;
            let extra = json!({
                "method": "dp",
                "grid": grid,
                "wins_upper_bound": hi.wins_bound,
            });
            (lo.wins_bound, lo.sequence, extra)
        }
    };
    let record = json!({
        "instance": {
            "rho_l": problem.rho_l,
            "rho_o": problem.rho_o,
            "T": problem.horizon,
            "eta": problem.eta,
            "b1": problem.initial_bid,
        },
        "wins": wins,
        "cap": cap,
        "feasible_cost": sequence.cost,
        "certificate_ok": certificate_ok(problem, &sequence, cap),
        "x": sequence.x.iter().map(|b| u8::from(*b)).collect::<Vec<_>>(),
        "extra": extra,
    });
    Ok(record.to_string())
}

/// Checks the instance against its certificates: suffix windows of the
/// returned sequence respect the interval bound, the Lagrangian dominates
/// the win count, and the win count stays under the cap.
fn certificate_ok(problem: &AdversaryProblem, seq: &WinSequence, cap: f64) -> bool {
    let cert = LagrangianCertificate::for_problem(problem);
    let t_len = problem.horizon;
    let mut windowed = 0.0;
    for tau in 0..=t_len {
        if tau > 0 {
            let t = t_len - tau;
            if seq.x[t] {
                windowed += 1.0 - cert.lambda * seq.bid_path[t];
            }
        }
        if windowed > interval_lagrangian_bound(&cert, tau, seq.bid_path[t_len - tau]) + 1e-9 {
            return false;
        }
    }
    let duality = lagrangian_value(problem, seq, cert.lambda);
    seq.wins as f64 <= duality + 1e-9 && (seq.wins as f64) <= cap + 1e-9
}

fn certify_file(horizon: usize, path: &Path) -> Result<bool, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut all_ok = true;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line.starts_with("rho_l")) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 3 {
            return Err(format!(
                "line {}: expected rho_l,rho_o,eta[,b1]",
                lineno + 1
            ));
        }
        let parse = |s: &str, what: &str| {
            s.parse::<f64>()
                .map_err(|_| format!("line {}: bad {what}", lineno + 1))
        };
        let rho_l = parse(fields[0], "rho_l")?;
        let rho_o = parse(fields[1], "rho_o")?;
        let eta = parse(fields[2], "eta")?;
        let b1 = if fields.len() > 3 {
            parse(fields[3], "b1")?
        } else {
            rho_l
        };
        let problem = AdversaryProblem::new(rho_l, rho_o, horizon, eta, b1);
        match solve_record(&problem, SolveMethod::Enum, 0) {
            Ok(record) => {
                all_ok &= record.contains("\"certificate_ok\":true");
                emit(&record);
            }
            Err(e) => {
                all_ok = false;
                emit(json!({
                    "instance": { "rho_l": rho_l, "rho_o": rho_o, "T": horizon, "eta": eta, "b1": b1 },
                    "error": e,
                }));
            }
        }
    }
    Ok(all_ok)
}

// ---------------------------------------------------------------------------
// analyze subcommands
// ---------------------------------------------------------------------------

fn sidecar_path(trace: &Path) -> PathBuf {
    let name = trace
        .file_name()
        .map(|s| s.to_string_lossy())
        .unwrap_or_default();
    let stem = name
        .strip_suffix(".trace.csv")
        .or_else(|| name.strip_suffix(".csv"))
        .unwrap_or(&name)
        .to_string();
    trace.with_file_name(format!("{stem}.config.json"))
}

fn load_trace(args: &AnalyzeArgs) -> Result<Trace, String> {
    let config_path = args
        .config
        .clone()
        .unwrap_or_else(|| sidecar_path(&args.trace));
    let config_text = std::fs::read_to_string(&config_path)
        .map_err(|e| format!("{}: {e}", config_path.display()))?;
    let market: MarketConfig = match serde_json::from_str::<PointSidecar>(&config_text) {
        Ok(sidecar) => sidecar.market,
        Err(_) => serde_json::from_str(&config_text)
            .map_err(|e| format!("{}: {e}", config_path.display()))?,
    };
    let file =
        std::fs::File::open(&args.trace).map_err(|e| format!("{}: {e}", args.trace.display()))?;
    Trace::read_csv(market, BufReader::new(file)).map_err(|e| e.to_string())
}

fn analyze_potential(args: &AnalyzeArgs) -> Result<bool, String> {
    let trace = load_trace(args)?;
    let rho = trace.config().rho();
    let stride = args.stride.max(1);
    for t in (1..=trace.horizon()).step_by(stride) {
        let state = dynamics::potential_with_winner(trace.bids_at(t), &rho, trace.winner_at(t))
            .map_err(|e| e.to_string())?;
        emit(json!({
            "round": t,
            "f_value": state.f_value,
            "dist_one": state.dist_one,
            "dist_avg": state.dist_avg,
            "b_avg": state.b_avg,
            "b_max": state.b_max,
            "b_min": state.b_min,
            "maximizer": state.maximizer,
        }));
    }
    Ok(true)
}

fn analyze_milestones(args: &AnalyzeArgs) -> Result<bool, String> {
    let trace = load_trace(args)?;
    let rho_min = trace
        .config()
        .agents
        .iter()
        .map(|a| a.rho)
        .fold(f64::INFINITY, f64::min);
    let d = args
        .d
        .unwrap_or_else(|| dynamics::default_first_pass_d(rho_min, trace.config().eta));
    let m = dynamics::milestones(&trace, d).map_err(|e| e.to_string())?;
    emit(serde_json::to_string(&m).unwrap());
    Ok(m.band_holds)
}

fn analyze_discrepancy(args: &AnalyzeArgs) -> Result<bool, String> {
    let trace = load_trace(args)?;
    if args.window + 1 > trace.horizon() + 1 {
        return Err(format!(
            "window {} does not fit a trace of {} rounds",
            args.window,
            trace.horizon()
        ));
    }
    let stride = args.stride.max(1);
    let mut all_ok = true;
    for agent in 0..trace.n_agents() {
        if !trace.config().agents[agent].policy.is_pacing() {
            continue;
        }
        let scan =
            dynamics::scan_windows(&trace, agent, args.window, 1).map_err(|e| e.to_string())?;
        for stats in scan.step_by(stride) {
            all_ok &= stats.wins as f64 >= stats.guaranteed_floor - 1e-9;
            emit(serde_json::to_string(&stats).unwrap());
        }
    }
    Ok(all_ok)
}

fn analyze_roundrobin(args: &AnalyzeArgs) -> Result<bool, String> {
    let trace = load_trace(args)?;
    match dynamics::detect_round_robin(&trace) {
        Ok(report) => {
            let ok = report.period_start.is_some();
            emit(serde_json::to_string(&report).unwrap());
            Ok(ok)
        }
        Err(dynamics::DynamicsError::TheoremViolation(msg)) => {
            emit(json!({ "theorem_violation": msg }));
            Ok(false)
        }
        Err(e) => Err(e.to_string()),
    }
}
