//! Sweep execution: one deterministic simulation per run point, traces
//! persisted in the engine's CSV schema with a JSON config sidecar, metrics
//! as JSON Lines, and an aggregate `records.jsonl`.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use pacing_core::dynamics;
use pacing_core::engine::{simulate, Trace};
use serde::Serialize;
use serde_json::json;

use crate::config::{ConfigError, ExperimentConfig, Metrics, PointSidecar, RunPoint};

#[derive(Debug)]
pub enum RunnerError {
    Config(ConfigError),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl fmt::Display for RunnerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunnerError::Config(e) => write!(f, "{e}"),
            RunnerError::Io { path, source } => {
                write!(f, "i/o error at {}: {source}", path.display())
            }
        }
    }
}

impl std::error::Error for RunnerError {}

impl From<ConfigError> for RunnerError {
    fn from(e: ConfigError) -> Self {
        RunnerError::Config(e)
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunnerError + '_ {
    move |source| RunnerError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Outcome of one run point. Failures are recorded (`error` set) and the
/// sweep continues.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub config_hash: String,
    pub label: String,
    pub seed: u64,
    pub trace_path: PathBuf,
    pub metrics: Metrics,
    pub wall_time_ms: u64,
    pub schema_version: u32,
    pub error: Option<String>,
}

pub const SCHEMA_VERSION: u32 = 1;

/// Worker cap: `PACING_DYN_WORKERS` when set, otherwise the machine's
/// available parallelism.
fn worker_count(points: usize) -> usize {
    let configured = std::env::var("PACING_DYN_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|w| *w > 0);
    let fallback = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    configured.unwrap_or(fallback).min(points.max(1))
}

/// Runs every sweep point, persisting traces and metrics under
/// `<output_dir>/<name>/`. Points execute concurrently up to the worker
/// cap; each point owns its files, and the aggregate record file is written
/// after all points finish, in point order, so results are independent of
/// scheduling.
pub fn run(config: &ExperimentConfig) -> Result<Vec<RunRecord>, RunnerError> {
    let points = config.points()?;
    let dir = config.output_dir.join(&config.name);
    std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;

    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<RunRecord>>> = Mutex::new(vec![None; points.len()]);
    let workers = worker_count(points.len());

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= points.len() {
                    break;
                }
                let record = run_point(config, &points[i], &dir);
                slots.lock().unwrap()[i] = Some(record);
            });
        }
    });

    let records: Vec<RunRecord> = slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every point produces a record"))
        .collect();

    let aggregate_path = dir.join("records.jsonl");
    let mut out = std::fs::File::create(&aggregate_path).map_err(io_err(&aggregate_path))?;
    for record in &records {
        serde_json::to_writer(&mut out, record).expect("records serialize");
        out.write_all(b"\n").map_err(io_err(&aggregate_path))?;
    }
    Ok(records)
}

/// Horizon above which traces stream to disk row by row instead of being
/// materialized; `PACING_DYN_STREAM_THRESHOLD` overrides for testing.
fn streaming_threshold() -> usize {
    std::env::var("PACING_DYN_STREAM_THRESHOLD")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(10_000_000)
}

fn run_point(config: &ExperimentConfig, point: &RunPoint, dir: &Path) -> RunRecord {
    let started = Instant::now();
    let trace_path = dir.join(format!("{}.trace.csv", point.config_hash));
    let mut record = RunRecord {
        config_hash: point.config_hash.clone(),
        label: point.label.clone(),
        seed: point.seed,
        trace_path: trace_path.clone(),
        metrics: Metrics::new(),
        wall_time_ms: 0,
        schema_version: SCHEMA_VERSION,
        error: None,
    };

    let outcome = (|| -> Result<Metrics, String> {
        let metrics = if point.market.horizon > streaming_threshold() {
            stream_point(point, &trace_path)?
        } else {
            let trace = simulate(&point.market).map_err(|e| e.to_string())?;
            let file = std::fs::File::create(&trace_path)
                .map_err(|e| format!("{}: {e}", trace_path.display()))?;
            let mut writer = std::io::BufWriter::new(file);
            trace
                .write_csv(&mut writer)
                .and_then(|()| writer.flush())
                .map_err(|e| format!("{}: {e}", trace_path.display()))?;
            analysis_metrics(&trace, config)
        };

        let sidecar_path = dir.join(format!("{}.config.json", point.config_hash));
        let sidecar = PointSidecar {
            name: config.name.clone(),
            label: point.label.clone(),
            seed: point.seed,
            config_hash: point.config_hash.clone(),
            market: point.market.clone(),
        };
        std::fs::write(
            &sidecar_path,
            serde_json::to_string_pretty(&sidecar).expect("sidecar serializes"),
        )
        .map_err(|e| format!("{}: {e}", sidecar_path.display()))?;

        let metrics_path = dir.join(format!("{}.metrics.jsonl", point.config_hash));
        let mut out = String::new();
        for (key, value) in &metrics {
            out.push_str(&serde_json::json!({ "metric": key, "value": value }).to_string());
            out.push('\n');
        }
        std::fs::write(&metrics_path, out)
            .map_err(|e| format!("{}: {e}", metrics_path.display()))?;
        Ok(metrics)
    })();

    match outcome {
        Ok(metrics) => record.metrics = metrics,
        Err(e) => record.error = Some(e),
    }
    record.wall_time_ms = started.elapsed().as_millis() as u64;
    record
}

/// Long-horizon path: the trace goes to disk row by row during simulation
/// (memory stays `O(n)`), identical byte-for-byte to `Trace::write_csv`.
/// Only streaming-friendly tallies are reported; trace-resident analyses
/// are skipped with a note.
fn stream_point(point: &RunPoint, trace_path: &Path) -> Result<Metrics, String> {
    use pacing_core::engine::simulate_with;

    let n = point.market.n_agents();
    let file =
        std::fs::File::create(trace_path).map_err(|e| format!("{}: {e}", trace_path.display()))?;
    let mut writer = std::io::BufWriter::with_capacity(1 << 20, file);
    let mut io_error: Option<std::io::Error> = None;
    let mut spent = vec![0.0f64; n];
    let mut wins = vec![0usize; n];

    writeln!(
        writer,
        "round,agent,bid,winner_flag,payment,spent_cumulative"
    )
    .map_err(|e| format!("{}: {e}", trace_path.display()))?;
    simulate_with(&point.market, |view| {
        if io_error.is_some() {
            return;
        }
        for (i, bid) in view.bids.iter().enumerate() {
            let payment = view.payment(i);
            spent[i] += payment;
            if i == view.winner {
                wins[i] += 1;
            }
            if let Err(e) = writeln!(
                writer,
                "{},{},{:.16e},{},{:.16e},{:.16e}",
                view.round,
                i,
                bid,
                u8::from(view.winner == i),
                payment,
                spent[i],
            ) {
                io_error = Some(e);
            }
        }
    })
    .map_err(|e| e.to_string())?;
    writer
        .flush()
        .map_err(|e| format!("{}: {e}", trace_path.display()))?;
    if let Some(e) = io_error {
        return Err(format!("{}: {e}", trace_path.display()));
    }

    let mut metrics = Metrics::new();
    metrics.insert("wins".into(), json!(wins));
    metrics.insert("total_payment".into(), json!(spent));
    metrics.insert(
        "note".into(),
        json!("trace streamed to disk; trace-resident analyses skipped"),
    );
    Ok(metrics)
}

/// Executes the configured analyses on one trace. Analyzer errors become
/// string-valued metrics rather than failing the point.
fn analysis_metrics(trace: &Trace, config: &ExperimentConfig) -> Metrics {
    let plan = &config.analyses;
    let mut metrics = Metrics::new();
    metrics.insert(
        "wins".into(),
        json!((0..trace.n_agents())
            .map(|i| trace.wins(i))
            .collect::<Vec<_>>()),
    );
    metrics.insert(
        "total_payment".into(),
        json!((0..trace.n_agents())
            .map(|i| trace.total_payment(i))
            .collect::<Vec<_>>()),
    );

    if plan.potential {
        let rho = trace.config().rho();
        match dynamics::potential(trace.final_bids(), &rho) {
            Ok(state) => {
                metrics.insert(
                    "final_potential".into(),
                    json!({
                        "f_value": state.f_value,
                        "dist_one": state.dist_one,
                        "dist_avg": state.dist_avg,
                        "b_max": state.b_max,
                        "b_min": state.b_min,
                    }),
                );
            }
            Err(e) => {
                metrics.insert("final_potential_error".into(), json!(e.to_string()));
            }
        }
    }

    if plan.milestones {
        let rho_min = trace
            .config()
            .agents
            .iter()
            .map(|a| a.rho)
            .fold(f64::INFINITY, f64::min);
        let d = plan
            .milestones_d
            .unwrap_or_else(|| dynamics::default_first_pass_d(rho_min, trace.config().eta));
        match dynamics::milestones(trace, d) {
            Ok(m) => metrics.insert("milestones".into(), json!(m)),
            Err(e) => metrics.insert("milestones_error".into(), json!(e.to_string())),
        };
    }

    for &tau in &plan.discrepancy_windows {
        let key = format!("discrepancy_tau_{tau}");
        if tau + 1 > trace.horizon() + 1 {
            metrics.insert(key, json!("window longer than trace"));
            continue;
        }
        let mut worst_shortfall = f64::INFINITY;
        let mut max_abs_discrepancy = 0.0f64;
        let mut floor_violations = 0usize;
        for agent in 0..trace.n_agents() {
            if !trace.config().agents[agent].policy.is_pacing() {
                continue;
            }
            for stats in dynamics::scan_windows(trace, agent, tau, 1).expect("bounds checked") {
                let margin = stats.wins as f64 - stats.guaranteed_floor;
                if margin < worst_shortfall {
                    worst_shortfall = margin;
                }
                if margin < -1e-9 {
                    floor_violations += 1;
                }
                max_abs_discrepancy = max_abs_discrepancy.max(stats.discrepancy.abs());
            }
        }
        metrics.insert(
            key,
            json!({
                "max_abs_discrepancy": max_abs_discrepancy,
                "min_floor_margin": worst_shortfall,
                "floor_violations": floor_violations,
            }),
        );
    }

    if plan.round_robin {
        match dynamics::detect_round_robin(trace) {
            Ok(report) => metrics.insert("round_robin".into(), json!(report)),
            Err(e) => metrics.insert("round_robin_error".into(), json!(e.to_string())),
        };
    }

    if plan.sum_bound {
        match dynamics::sum_bound_check(trace) {
            Ok(ok) => metrics.insert("sum_bound_holds".into(), json!(ok)),
            Err(e) => metrics.insert("sum_bound_error".into(), json!(e.to_string())),
        };
    }

    metrics
}
