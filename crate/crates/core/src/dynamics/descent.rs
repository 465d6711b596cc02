//! Per-round checks tying the engine's self-play updates to the subgradient
//! descent analysis: the update–subgradient identity, the distance-from-one
//! descent inequality, and the distance-from-average inequality.

use crate::engine::Trace;

use super::potential::{dist_avg_sq, dist_one_sq};
use super::{require_first_price_self_play, DynamicsError, INEQUALITY_SLACK};

/// Per-coordinate tolerance for the update–subgradient identity. The two
/// sides are computed by algebraically identical floating-point expressions,
/// so observed deviations are zero; the tolerance is headroom.
const STEP_TOLERANCE: f64 = 1e-9;

/// Verifies that every round of a first-price self-play trace satisfies
/// `b^(t+1) = b^(t) − η (b_winner · e_winner − ρ)`, i.e. that the market
/// update is exactly a constant-step subgradient step. Returns the rounds
/// that violate it (expected empty).
pub fn verify_subgradient_step(trace: &Trace) -> Result<Vec<usize>, DynamicsError> {
    require_first_price_self_play(trace)?;
    let config = trace.config();
    let eta = config.eta;
    let n = trace.n_agents();
    let mut violations = Vec::new();
    for t in 1..=trace.horizon() {
        let bids = trace.bids_at(t);
        let winner = trace.winner_at(t);
        let winner_bid = bids[winner];
        for (i, bid) in bids.iter().enumerate().take(n) {
            let g_i = if i == winner { winner_bid } else { 0.0 } - config.agents[i].rho;
            let expected = bid - eta * g_i;
            let actual = trace.bid_boundary(t + 1, i);
            if (expected - actual).abs() > STEP_TOLERANCE {
                violations.push(t);
                break;
            }
        }
    }
    Ok(violations)
}

/// Both sides of the descent inequality at round `t`:
/// `‖b^(t+1) − 1‖² ≤ (1 − ηρ_min + 2η²)‖b^(t) − 1‖² + 3η²`.
/// The caller checks `lhs ≤ rhs + slack`.
pub fn check_descent_inequality(trace: &Trace, t: usize) -> Result<(f64, f64), DynamicsError> {
    require_first_price_self_play(trace)?;
    if t == 0 || t > trace.horizon() {
        return Err(DynamicsError::InvalidInput(format!(
            "round {t} out of range 1..={}",
            trace.horizon()
        )));
    }
    let config = trace.config();
    let eta = config.eta;
    let rho_min = config
        .agents
        .iter()
        .map(|a| a.rho)
        .fold(f64::INFINITY, f64::min);
    let n = trace.n_agents();

    let cur_sq = dist_one_sq(trace.bids_at(t));
    let next: Vec<f64> = (0..n).map(|i| trace.bid_boundary(t + 1, i)).collect();
    let lhs = dist_one_sq(&next);
    let rhs = (1.0 - eta * rho_min + 2.0 * eta * eta) * cur_sq + 3.0 * eta * eta;
    Ok((lhs, rhs))
}

/// Outcome of the distance-from-average inequality at one round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AvgCheck {
    /// Hypothesis held; caller checks `lhs ≤ rhs + slack`.
    Checked { lhs: f64, rhs: f64 },
    /// `‖b^(t) − 1‖ ≤ D√η ≤ √(1/2n)` failed, so the inequality is not
    /// asserted at this round.
    HypothesisNotMet,
}

/// The averaging inequality at round `t`, parametrized by `D`:
/// under `‖b^(t) − 1‖₂ ≤ D√η ≤ √(1/2n)`,
/// `‖b^(t+1) − avg‖² ≤ ‖b^(t) − avg‖² − 2ρ_min η ‖b^(t) − avg‖ + 4η²(D²+1)`.
pub fn check_avg_inequality(
    trace: &Trace,
    t: usize,
    d_param: f64,
) -> Result<AvgCheck, DynamicsError> {
    require_first_price_self_play(trace)?;
    if t == 0 || t > trace.horizon() {
        return Err(DynamicsError::InvalidInput(format!(
            "round {t} out of range 1..={}",
            trace.horizon()
        )));
    }
    let config = trace.config();
    let eta = config.eta;
    let n = trace.n_agents() as f64;
    let rho_min = config
        .agents
        .iter()
        .map(|a| a.rho)
        .fold(f64::INFINITY, f64::min);

    let bids = trace.bids_at(t);
    let dist_one = dist_one_sq(bids).sqrt();
    let gate = d_param * eta.sqrt();
    let hypothesis = dist_one <= gate && gate <= (1.0 / (2.0 * n)).sqrt();
    if !hypothesis {
        return Ok(AvgCheck::HypothesisNotMet);
    }

    let cur_sq = dist_avg_sq(bids);
    let next: Vec<f64> = (0..trace.n_agents())
        .map(|i| trace.bid_boundary(t + 1, i))
        .collect();
    let lhs = dist_avg_sq(&next);
    let rhs =
        cur_sq - 2.0 * rho_min * eta * cur_sq.sqrt() + 4.0 * eta * eta * (d_param * d_param + 1.0);
    Ok(AvgCheck::Checked { lhs, rhs })
}

/// True when the pair returned by the inequality checks violates the bound
/// beyond the accepted slack.
pub fn violates(lhs: f64, rhs: f64) -> bool {
    lhs > rhs + INEQUALITY_SLACK
}
