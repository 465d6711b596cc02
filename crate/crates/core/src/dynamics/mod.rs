//! Analyzers for first-price self-play traces.
//!
//! Self-play of the pacing update is subgradient descent with constant step
//! `η` on the convex potential `f(b) = ½ max_i b_i² − ρᵀb + ½`, whose unique
//! minimum sits at the all-ones bid vector. This module evaluates that
//! potential, checks the per-round descent inequalities the convergence
//! proof is built from, locates the convergence milestones on concrete
//! traces, measures win discrepancy over sliding windows, and detects the
//! round-robin regime that equal-budget markets settle into.

mod descent;
mod milestones;
mod potential;
mod roundrobin;
mod windows;

pub use descent::{
    check_avg_inequality, check_descent_inequality, verify_subgradient_step, violates, AvgCheck,
};
pub use milestones::{default_first_pass_d, milestones, ConvergenceMilestones};
pub use potential::{potential, potential_with_winner, PotentialState};
pub use roundrobin::{
    detect_round_robin, round_robin_condition, sum_bound_check, RoundRobinCondition,
    RoundRobinReport,
};
pub use windows::{scan_windows, window_discrepancy, wins_floor, WindowScan, WindowStats};

use std::fmt;

/// Strictness tolerance for the round-robin bid ordering; the dynamics keep
/// distinct bids separated far above this.
pub const STRICT_ORDER_TOLERANCE: f64 = 1e-12;

/// Slack accepted when asserting proved inequalities on floating-point
/// traces.
pub const INEQUALITY_SLACK: f64 = 1e-9;

#[derive(Debug)]
pub enum DynamicsError {
    InvalidInput(String),
    /// The trace is too short to cover the schedule being verified.
    ScheduleExceedsHorizon {
        needed: usize,
        horizon: usize,
    },
    /// A proved statement failed on the trace; points at an engine or
    /// analyzer bug, or a trace outside the statement's hypotheses.
    TheoremViolation(String),
}

impl fmt::Display for DynamicsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynamicsError::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            DynamicsError::ScheduleExceedsHorizon { needed, horizon } => write!(
                f,
                "trace horizon {horizon} shorter than the {needed} rounds the schedule needs"
            ),
            DynamicsError::TheoremViolation(msg) => write!(f, "theorem violation: {msg}"),
        }
    }
}

impl std::error::Error for DynamicsError {}

pub(crate) fn require_first_price_self_play(
    trace: &crate::engine::Trace,
) -> Result<(), DynamicsError> {
    if !trace.config().is_self_play() {
        return Err(DynamicsError::InvalidInput(
            "analyzer needs a trace where every agent runs the pacing update".into(),
        ));
    }
    if trace.config().format != crate::engine::AuctionFormat::FirstPrice {
        return Err(DynamicsError::InvalidInput(
            "analyzer needs a first-price trace".into(),
        ));
    }
    Ok(())
}
