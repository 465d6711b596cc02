//! Win discrepancy over time windows.
//!
//! For a pacing agent, telescoping the update over a window of `τ` rounds
//! bounds the wins from below by `ρτ/M − (M−m)/(ηM)`, where `m` and `M` are
//! the agent's extreme bids across the window. No hypothesis is needed
//! beyond the agent running the pacing update; the bound is sharpest once
//! bids have collapsed to `1 ± O(η)`.

use std::collections::VecDeque;

use crate::engine::Trace;

use super::{DynamicsError, INEQUALITY_SLACK};

/// Lower bound `ρτ/M − (M−m)/(ηM)` on the wins of a pacing agent whose bids
/// stay within `[m, M]` across a window of length `τ`.
pub fn wins_floor(
    m: f64,
    big_m: f64,
    rho: f64,
    tau: usize,
    eta: f64,
) -> Result<f64, DynamicsError> {
    if !(m > 0.0 && m <= big_m) {
        return Err(DynamicsError::InvalidInput(format!(
            "bid range needs 0 < m <= M, got m={m} M={big_m}"
        )));
    }
    Ok(rho * tau as f64 / big_m - (big_m - m) / (eta * big_m))
}

/// Wins, discrepancy, and the realized-bid-range floor for one agent over
/// one window `[start, start+length)`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct WindowStats {
    pub agent: usize,
    /// First round of the window (1-based).
    pub start: usize,
    /// Window length τ.
    pub length: usize,
    pub wins: usize,
    /// Signed `wins − ρτ`.
    pub discrepancy: f64,
    /// `wins_floor` evaluated at the realized bid range; `-inf` when the
    /// window's extreme bids make the formula degenerate (`m ≤ 0`).
    pub guaranteed_floor: f64,
    /// Realized minimum bid over rounds `start ..= start+length` (the bid at
    /// the window's right boundary participates in the telescoping).
    pub min_bid: f64,
    pub max_bid: f64,
}

/// Single-window variant of the scan; checks the realized floor and errors
/// with `TheoremViolation` if the wins fall below it.
pub fn window_discrepancy(
    trace: &Trace,
    agent: usize,
    t1: usize,
    tau: usize,
) -> Result<WindowStats, DynamicsError> {
    if agent >= trace.n_agents() {
        return Err(DynamicsError::InvalidInput(format!(
            "agent {agent} out of range"
        )));
    }
    if !trace.config().agents[agent].policy.is_pacing() {
        return Err(DynamicsError::InvalidInput(format!(
            "agent {agent} does not run the pacing update"
        )));
    }
    if t1 == 0 || t1 + tau > trace.horizon() + 1 {
        return Err(DynamicsError::InvalidInput(format!(
            "window [{t1}, {t1}+{tau}) outside trace of {} rounds",
            trace.horizon()
        )));
    }
    let mut scan = scan_windows(trace, agent, tau, t1)?;
    let stats = scan.next().expect("window bounds were checked");
    if (stats.wins as f64) < stats.guaranteed_floor - INEQUALITY_SLACK {
        return Err(DynamicsError::TheoremViolation(format!(
            "agent {agent} window [{t1}, {}) wins {} below floor {}",
            t1 + tau,
            stats.wins,
            stats.guaranteed_floor
        )));
    }
    Ok(stats)
}

/// Sliding scan over every window of length `tau` starting at `from`,
/// `O(1)` amortized per window. Yields one [`WindowStats`] per start round;
/// floors are reported, not asserted.
pub fn scan_windows(
    trace: &Trace,
    agent: usize,
    tau: usize,
    from: usize,
) -> Result<WindowScan<'_>, DynamicsError> {
    if agent >= trace.n_agents() {
        return Err(DynamicsError::InvalidInput(format!(
            "agent {agent} out of range"
        )));
    }
    if from == 0 || from + tau > trace.horizon() + 1 {
        return Err(DynamicsError::InvalidInput(format!(
            "no window of length {tau} starts at {from} in a trace of {} rounds",
            trace.horizon()
        )));
    }
    let mut scan = WindowScan {
        trace,
        agent,
        tau,
        next_start: from,
        last_start: trace.horizon() + 1 - tau,
        wins: 0,
        min_deque: VecDeque::new(),
        max_deque: VecDeque::new(),
    };
    for t in from..from + tau {
        if scan.trace.winner_at(t) == agent {
            scan.wins += 1;
        }
    }
    for u in from..=from + tau {
        scan.push_bid(u);
    }
    Ok(scan)
}

pub struct WindowScan<'a> {
    trace: &'a Trace,
    agent: usize,
    tau: usize,
    next_start: usize,
    last_start: usize,
    wins: usize,
    /// Monotonic deques over bid boundaries `[t1, t1+tau]`.
    min_deque: VecDeque<(usize, f64)>,
    max_deque: VecDeque<(usize, f64)>,
}

impl WindowScan<'_> {
    fn push_bid(&mut self, u: usize) {
        let b = self.trace.bid_boundary(u, self.agent);
        while self.min_deque.back().is_some_and(|&(_, v)| v >= b) {
            self.min_deque.pop_back();
        }
        self.min_deque.push_back((u, b));
        while self.max_deque.back().is_some_and(|&(_, v)| v <= b) {
            self.max_deque.pop_back();
        }
        self.max_deque.push_back((u, b));
    }
}

impl Iterator for WindowScan<'_> {
    type Item = WindowStats;

    fn next(&mut self) -> Option<WindowStats> {
        if self.next_start > self.last_start {
            return None;
        }
        let t1 = self.next_start;
        while self.min_deque.front().is_some_and(|&(u, _)| u < t1) {
            self.min_deque.pop_front();
        }
        while self.max_deque.front().is_some_and(|&(u, _)| u < t1) {
            self.max_deque.pop_front();
        }
        let min_bid = self.min_deque.front().expect("window is nonempty").1;
        let max_bid = self.max_deque.front().expect("window is nonempty").1;

        let config = self.trace.config();
        let rho = config.agents[self.agent].rho;
        let guaranteed_floor = if min_bid > 0.0 {
            rho * self.tau as f64 / max_bid - (max_bid - min_bid) / (config.eta * max_bid)
        } else {
            f64::NEG_INFINITY
        };
        let stats = WindowStats {
            agent: self.agent,
            start: t1,
            length: self.tau,
            wins: self.wins,
            discrepancy: self.wins as f64 - rho * self.tau as f64,
            guaranteed_floor,
            min_bid,
            max_bid,
        };

        // Slide to the next start.
        self.next_start += 1;
        if self.next_start <= self.last_start {
            if self.tau > 0 {
                if self.trace.winner_at(t1) == self.agent {
                    self.wins -= 1;
                }
                if self.trace.winner_at(t1 + self.tau) == self.agent {
                    self.wins += 1;
                }
            }
            self.push_bid(t1 + self.tau + 1);
        }
        Some(stats)
    }
}
