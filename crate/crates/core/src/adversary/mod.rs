//! The learner-vs-optimizer game: one agent runs the pacing update while a
//! budgeted opponent chooses, round by round, whether to take the win at the
//! learner's bid.
//!
//! After the bid-matching reduction the opponent's entire strategy is a
//! binary win sequence, and its problem is
//!
//! ```text
//! max Σ x^(t)   s.t.  Σ x^(t) b^(t) ≤ ρ_O T,
//!               where b^(t+1) = b^(t) + η(ρ_L − b^(t)(1 − x^(t)))
//! ```
//!
//! This module solves that program exactly (branch and bound over win
//! sequences with dyadic-rational feasibility), brackets it with a certified
//! optimistic/pessimistic DP, and verifies the Lagrangian certificates that
//! cap the opponent's win count.

mod dp;
mod dyadic;
mod exact;
mod lagrangian;
mod reduction;

pub use dp::{dp_optimal, DpRounding, DpSolution};
pub use exact::enumerate_optimal;
pub use lagrangian::{
    interval_lagrangian_bound, lagrangian_value, theorem_win_cap, LagrangianCertificate,
};
pub use reduction::match_bids_reduction;

use crate::engine::EngineError;
use std::fmt;

/// Feasibility slack used when classifying a floating-point cost against the
/// budget; anything closer than this is resolved in exact arithmetic.
pub const FEASIBILITY_SLACK: f64 = 1e-12;

/// An instance of the optimizer's problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdversaryProblem {
    /// Learner budget share ρ_L.
    pub rho_l: f64,
    /// Optimizer budget share ρ_O; budget is `rho_o * horizon`.
    pub rho_o: f64,
    pub horizon: usize,
    pub eta: f64,
    /// Learner bid of round 1.
    pub initial_bid: f64,
}

impl AdversaryProblem {
    pub fn new(rho_l: f64, rho_o: f64, horizon: usize, eta: f64, initial_bid: f64) -> Self {
        AdversaryProblem {
            rho_l,
            rho_o,
            horizon,
            eta,
            initial_bid,
        }
    }

    /// Instance under the main theorem's hypotheses: `b^(1) = ρ_L` and
    /// `η = 1/√T`.
    pub fn theorem_instance(rho_l: f64, rho_o: f64, horizon: usize) -> Self {
        AdversaryProblem {
            rho_l,
            rho_o,
            horizon,
            eta: 1.0 / (horizon as f64).sqrt(),
            initial_bid: rho_l,
        }
    }

    pub fn budget(&self) -> f64 {
        self.rho_o * self.horizon as f64
    }

    pub fn validate(&self) -> Result<(), AdversaryError> {
        if !(self.rho_l > 0.0 && self.rho_o > 0.0) {
            return Err(AdversaryError::InvalidInput(format!(
                "budget shares must be positive, got rho_l={} rho_o={}",
                self.rho_l, self.rho_o
            )));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(AdversaryError::InvalidInput(format!(
                "eta must lie in (0,1), got {}",
                self.eta
            )));
        }
        if !(self.initial_bid.is_finite() && self.initial_bid >= 0.0) {
            return Err(AdversaryError::InvalidInput(format!(
                "initial bid must be nonnegative, got {}",
                self.initial_bid
            )));
        }
        Ok(())
    }

    /// Learner bid after one round: wins by the optimizer leave the learner
    /// unpaid, losses make her pay her own bid.
    pub fn next_bid(&self, bid: f64, optimizer_won: bool) -> f64 {
        let x = if optimizer_won { 1.0 } else { 0.0 };
        bid + self.eta * (self.rho_l - bid * (1.0 - x))
    }
}

/// A candidate optimizer strategy with its induced learner bid path.
#[derive(Debug, Clone, PartialEq)]
pub struct WinSequence {
    /// Win indicators x^(1..T).
    pub x: Vec<bool>,
    pub wins: usize,
    /// Σ x^(t) b^(t): what the optimizer pays.
    pub cost: f64,
    /// Learner bids b^(1..T+1).
    pub bid_path: Vec<f64>,
}

impl WinSequence {
    /// Replays the learner recurrence for the given indicator vector.
    pub fn from_indicators(problem: &AdversaryProblem, x: Vec<bool>) -> Self {
        let mut bid_path = Vec::with_capacity(x.len() + 1);
        let mut bid = problem.initial_bid;
        let mut cost = 0.0;
        let mut wins = 0usize;
        for &xt in &x {
            bid_path.push(bid);
            if xt {
                cost += bid;
                wins += 1;
            }
            bid = problem.next_bid(bid, xt);
        }
        bid_path.push(bid);
        WinSequence {
            x,
            wins,
            cost,
            bid_path,
        }
    }

    pub fn empty(problem: &AdversaryProblem) -> Self {
        WinSequence::from_indicators(problem, Vec::new())
    }

    pub fn is_feasible(&self, problem: &AdversaryProblem) -> bool {
        self.cost <= problem.budget() + FEASIBILITY_SLACK
    }
}

/// Errors out of the adversary solvers.
#[derive(Debug)]
pub enum AdversaryError {
    InvalidInput(String),
    /// Exhaustive enumeration refuses horizons beyond 24 rounds.
    InstanceTooLarge(usize),
    /// A pessimistic DP transition pushed the bid state past the grid cap.
    GridOverflow(String),
    /// A certified property of the reduction or a solver failed to hold.
    PostconditionViolated(String),
    Engine(EngineError),
}

impl fmt::Display for AdversaryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdversaryError::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            AdversaryError::InstanceTooLarge(t) => {
                write!(f, "horizon {t} too large for exact enumeration (max 24)")
            }
            AdversaryError::GridOverflow(msg) => write!(f, "grid overflow: {msg}"),
            AdversaryError::PostconditionViolated(msg) => {
                write!(f, "postcondition violated: {msg}")
            }
            AdversaryError::Engine(e) => write!(f, "engine error: {e}"),
        }
    }
}

impl std::error::Error for AdversaryError {}

impl From<EngineError> for AdversaryError {
    fn from(e: EngineError) -> Self {
        AdversaryError::Engine(e)
    }
}
