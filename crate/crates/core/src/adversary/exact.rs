//! Exact maximization of the optimizer's win count by branch and bound over
//! binary win sequences.
//!
//! The search runs on floating-point state for speed; any budget comparison
//! that lands closer than an epsilon to the boundary is re-decided in exact
//! dyadic arithmetic (the inputs, being `f64`s, are dyadic rationals, and the
//! recurrence only adds and multiplies). Two passes: the first finds the
//! maximum win count, the second retrieves the lexicographically smallest
//! indicator vector attaining it.

use super::dyadic::Dyadic;
use super::lagrangian::LagrangianCertificate;
use super::{AdversaryError, AdversaryProblem, WinSequence};

/// Cost-vs-budget gaps below this are re-checked exactly. Accumulated f64
/// error over at most 24 rounds is orders of magnitude smaller.
const AMBIGUITY_MARGIN: f64 = 1e-9;

const MAX_ENUM_HORIZON: usize = 24;

/// Exact solution of the optimizer's problem for `T ≤ 24`.
///
/// Returns a feasible sequence maximizing wins; among maximizers the
/// lexicographically smallest indicator vector (`0 < 1`) is returned.
pub fn enumerate_optimal(problem: &AdversaryProblem) -> Result<WinSequence, AdversaryError> {
    problem.validate()?;
    if problem.horizon > MAX_ENUM_HORIZON {
        return Err(AdversaryError::InstanceTooLarge(problem.horizon));
    }
    if problem.horizon == 0 {
        return Ok(WinSequence::empty(problem));
    }

    let ctx = SearchContext::new(problem);
    let mut best = 0usize; // all-zeros is always feasible
    let mut xs = Vec::with_capacity(problem.horizon);
    ctx.max_wins(problem.initial_bid, 0.0, 0, &mut xs, &mut best);

    let mut xs = Vec::with_capacity(problem.horizon);
    let found = ctx.lex_smallest(problem.initial_bid, 0.0, 0, best, &mut xs);
    debug_assert!(found, "phase 2 must reach the win count proven in phase 1");
    let seq = WinSequence::from_indicators(problem, xs);
    debug_assert_eq!(seq.wins, best);
    Ok(seq)
}

struct SearchContext<'a> {
    problem: &'a AdversaryProblem,
    certificate: LagrangianCertificate,
    budget: f64,
    budget_exact: Dyadic,
    eta_exact: Dyadic,
    rho_l_exact: Dyadic,
    initial_bid_exact: Dyadic,
}

impl<'a> SearchContext<'a> {
    fn new(problem: &'a AdversaryProblem) -> Self {
        SearchContext {
            problem,
            certificate: LagrangianCertificate::new(problem.rho_l, problem.rho_o, problem.eta),
            budget: problem.budget(),
            budget_exact: Dyadic::from_f64(problem.rho_o).mul_int(problem.horizon as i64),
            eta_exact: Dyadic::from_f64(problem.eta),
            rho_l_exact: Dyadic::from_f64(problem.rho_l),
            initial_bid_exact: Dyadic::from_f64(problem.initial_bid),
        }
    }

    /// Admissible upper bound on wins still collectible from this state.
    fn wins_upper_bound(&self, bid: f64, cost: f64, rounds_left: usize) -> usize {
        let mut ub = rounds_left;

        let remaining = self.budget - cost;
        // Future bids never drop below min(bid, rho_l), so each further win
        // costs at least that much.
        let floor_bid = bid.min(self.problem.rho_l);
        if floor_bid > 1e-15 {
            let afford = ((remaining + AMBIGUITY_MARGIN) / floor_bid).floor();
            if afford < ub as f64 {
                ub = ub.min(afford.max(0.0) as usize);
            }
        }

        // Lagrangian cap on the remaining window: Σ x(1 − λb) ≤ lin·τ + g(b)
        // and Σ xb ≤ remaining budget give Σ x ≤ lin·τ + g(b) + λ·R.
        let cert = &self.certificate;
        let lag =
            cert.linear_coeff * rounds_left as f64 + cert.g(bid) + cert.lambda * remaining.max(0.0);
        if lag + 1e-6 < ub as f64 {
            ub = ub.min(lag.max(0.0).floor() as usize + 1);
        }
        ub
    }

    /// Exact feasibility of winning round `t+1` after prefix `xs`:
    /// replays the prefix in dyadic arithmetic.
    fn win_feasible_exact(&self, xs: &[bool]) -> bool {
        let mut bid = self.initial_bid_exact.clone();
        let mut cost = Dyadic::zero();
        for &x in xs {
            if x {
                cost = cost.add(&bid);
                // b' = b + η ρ_L
                bid = bid.add(&self.eta_exact.mul(&self.rho_l_exact));
            } else {
                // b' = b + η(ρ_L − b)
                bid = bid.add(&self.eta_exact.mul(&self.rho_l_exact.sub(&bid)));
            }
        }
        cost = cost.add(&bid);
        cost.le(&self.budget_exact)
    }

    /// Three-way feasibility of adding a win at the current bid: fast f64
    /// classification, exact on the boundary.
    fn win_feasible(&self, bid: f64, cost: f64, xs: &[bool]) -> bool {
        let new_cost = cost + bid;
        if new_cost <= self.budget - AMBIGUITY_MARGIN {
            true
        } else if new_cost >= self.budget + AMBIGUITY_MARGIN {
            false
        } else {
            self.win_feasible_exact(xs)
        }
    }

    /// Phase 1: depth-first, win branch first, pruned by the admissible
    /// bound. Updates `best` with the maximum feasible win count.
    fn max_wins(&self, bid: f64, cost: f64, wins: usize, xs: &mut Vec<bool>, best: &mut usize) {
        let t = xs.len();
        let rounds_left = self.problem.horizon - t;
        if wins > *best {
            *best = wins;
        }
        if rounds_left == 0 {
            return;
        }
        if wins + self.wins_upper_bound(bid, cost, rounds_left) <= *best {
            return;
        }
        if self.win_feasible(bid, cost, xs) {
            xs.push(true);
            self.max_wins(
                self.problem.next_bid(bid, true),
                cost + bid,
                wins + 1,
                xs,
                best,
            );
            xs.pop();
        }
        xs.push(false);
        self.max_wins(self.problem.next_bid(bid, false), cost, wins, xs, best);
        xs.pop();
    }

    /// Phase 2: depth-first, lose branch first, so the first sequence that
    /// reaches `target` wins is the lexicographically smallest maximizer.
    fn lex_smallest(
        &self,
        bid: f64,
        cost: f64,
        wins: usize,
        target: usize,
        xs: &mut Vec<bool>,
    ) -> bool {
        if wins == target {
            // Losing for free is always feasible; pad with zeros.
            xs.resize(self.problem.horizon, false);
            return true;
        }
        let t = xs.len();
        let rounds_left = self.problem.horizon - t;
        if rounds_left == 0 || wins + self.wins_upper_bound(bid, cost, rounds_left) < target {
            return false;
        }
        xs.push(false);
        if self.lex_smallest(self.problem.next_bid(bid, false), cost, wins, target, xs) {
            return true;
        }
        xs.pop();
        if self.win_feasible(bid, cost, xs) {
            xs.push(true);
            if self.lex_smallest(
                self.problem.next_bid(bid, true),
                cost + bid,
                wins + 1,
                target,
                xs,
            ) {
                return true;
            }
            xs.pop();
        }
        false
    }
}
