//! Discretized dynamic program bracketing the optimizer's exact optimum from
//! both sides, for instances beyond exhaustive enumeration.
//!
//! State is (rounds remaining, discretized learner bid, discretized remaining
//! budget). The bid axis spans `[0, max(2, b^(1)+1)]`, the budget axis
//! `[0, ρ_O T]`; the grid parameters count intervals, so doubling a grid
//! nests the old points inside the new ones and refinement can only improve
//! the pessimistic value.
//!
//! Rounding directions are what make the brackets certified:
//!
//! - `Optimistic` represents a real state by a bid at most the true bid and
//!   a budget at least the true budget, rounds win costs down and bid
//!   transitions down. Every really-feasible action has a grid counterpart,
//!   so the DP value dominates the true optimum.
//! - `Pessimistic` is the mirror image; the sequence it extracts is feasible
//!   for the real dynamics and its win count is a lower bound.

use super::{AdversaryError, AdversaryProblem, WinSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpRounding {
    /// Certified upper bound on the exact win count.
    Optimistic,
    /// Certified lower bound; the returned sequence is feasible.
    Pessimistic,
}

/// Result of [`dp_optimal`]: the certified bound and a witness sequence.
/// For `Pessimistic` the sequence is feasible and attains `wins_bound`; for
/// `Optimistic` it is the DP's trace and need not be feasible.
#[derive(Debug, Clone)]
pub struct DpSolution {
    pub wins_bound: usize,
    pub sequence: WinSequence,
}

/// Smallest grid index `k` with `k·step ≥ value` (exact, with fix-up against
/// division rounding). `None` when the index would exceed `top`.
fn round_up_index(value: f64, step: f64, top: usize) -> Option<usize> {
    let mut k = (value / step).ceil() as i64;
    while k > 0 && (k - 1) as f64 * step >= value {
        k -= 1;
    }
    while (k as f64) * step < value {
        k += 1;
    }
    let k = k.max(0);
    if k as usize > top {
        None
    } else {
        Some(k as usize)
    }
}

/// Largest grid index `k ≤ top` with `k·step ≤ value`.
fn round_down_index(value: f64, step: f64, top: usize) -> usize {
    let mut k = (value / step).floor() as i64;
    while (k + 1) as f64 * step <= value {
        k += 1;
    }
    while k > 0 && (k as f64) * step > value {
        k -= 1;
    }
    k.clamp(0, top as i64) as usize
}

struct Transitions {
    /// Bid index after losing, per bid index.
    lose: Vec<usize>,
    /// Bid index after winning; `None` marks a pessimistic overflow past the
    /// bid cap.
    win: Vec<Option<usize>>,
    /// Smallest budget index from which a win is affordable.
    jmin: Vec<usize>,
    /// Budget indices charged per win.
    charge: Vec<usize>,
}

pub fn dp_optimal(
    problem: &AdversaryProblem,
    bid_grid: usize,
    budget_grid: usize,
    rounding: DpRounding,
) -> Result<DpSolution, AdversaryError> {
    problem.validate()?;
    if bid_grid < 2 || budget_grid < 2 {
        return Err(AdversaryError::InvalidInput(format!(
            "grids must be at least 2, got ({bid_grid}, {budget_grid})"
        )));
    }
    let t_len = problem.horizon;
    if t_len == 0 {
        return Ok(DpSolution {
            wins_bound: 0,
            sequence: WinSequence::empty(problem),
        });
    }

    if t_len > u16::MAX as usize {
        return Err(AdversaryError::InvalidInput(format!(
            "horizon {t_len} beyond the DP's 65535-round value range"
        )));
    }

    let nb = bid_grid;
    let nr = budget_grid;
    let states = (nb + 1) * (nr + 1);
    if (t_len + 1).saturating_mul(states) > (1usize << 28) {
        return Err(AdversaryError::InvalidInput(format!(
            "state space too large: horizon {t_len} with {states} grid states"
        )));
    }

    let b_cap = 2.0f64.max(problem.initial_bid + 1.0);
    let db = b_cap / nb as f64;
    let budget = problem.budget();
    let dr = budget / nr as f64;

    // Per-bid-index transition tables.
    let mut tr = Transitions {
        lose: Vec::with_capacity(nb + 1),
        win: Vec::with_capacity(nb + 1),
        jmin: Vec::with_capacity(nb + 1),
        charge: Vec::with_capacity(nb + 1),
    };
    for i in 0..=nb {
        let bi = i as f64 * db;
        let after_win = bi + problem.eta * problem.rho_l;
        let after_lose = (1.0 - problem.eta) * bi + problem.eta * problem.rho_l;
        let (lose, win) = match rounding {
            DpRounding::Optimistic => (
                round_down_index(after_lose, db, nb),
                Some(round_down_index(after_win, db, nb)),
            ),
            DpRounding::Pessimistic => (
                // The lose map contracts toward rho_l ≤ b_cap, so it cannot
                // overflow; the win map can.
                round_up_index(after_lose, db, nb).unwrap_or(nb),
                round_up_index(after_win, db, nb),
            ),
        };
        let jmin = round_up_index(bi, dr, nr).unwrap_or(nr + 1);
        let charge = match rounding {
            DpRounding::Pessimistic => jmin,
            DpRounding::Optimistic => round_down_index(bi, dr, nr),
        };
        tr.lose.push(lose);
        tr.win.push(win);
        tr.jmin.push(jmin);
        tr.charge.push(charge);
    }

    // Start state: rounding directions applied to (b^(1), full budget).
    let i0 = match rounding {
        DpRounding::Optimistic => round_down_index(problem.initial_bid, db, nb),
        DpRounding::Pessimistic => round_up_index(problem.initial_bid, db, nb)
            .expect("b_cap >= initial_bid + 1 covers the starting bid"),
    };
    let j0 = nr; // both directions may start at the exact budget point

    if rounding == DpRounding::Pessimistic {
        check_reachable_overflow(&tr, t_len, nb, nr, i0, j0)?;
    }

    // value[s] = max additional wins with s rounds remaining; u16 covers
    // the largest horizon the guard above admits.
    let mut layers: Vec<Vec<u16>> = Vec::with_capacity(t_len + 1);
    layers.push(vec![0u16; states]);
    for s in 1..=t_len {
        let prev = &layers[s - 1];
        let mut cur = vec![0u16; states];
        for i in 0..=nb {
            let lose_row = tr.lose[i] * (nr + 1);
            let row = i * (nr + 1);
            let jmin = tr.jmin[i];
            let win_target = tr.win[i];
            for j in 0..=nr {
                let mut v = prev[lose_row + j];
                if j >= jmin {
                    if let Some(iw) = win_target {
                        let w = 1 + prev[iw * (nr + 1) + j - tr.charge[i]];
                        if w > v {
                            v = w;
                        }
                    }
                }
                cur[row + j] = v;
            }
        }
        layers.push(cur);
    }

    let wins_bound = layers[t_len][i0 * (nr + 1) + j0] as usize;

    // Extract a witness by walking the table forward, preferring losses so
    // wins land as late as possible.
    let mut x = Vec::with_capacity(t_len);
    let (mut i, mut j) = (i0, j0);
    for s in (1..=t_len).rev() {
        let v = layers[s][i * (nr + 1) + j];
        let lose_v = layers[s - 1][tr.lose[i] * (nr + 1) + j];
        if lose_v == v {
            x.push(false);
            i = tr.lose[i];
        } else {
            let iw = tr.win[i].expect("win transition chosen by DP must exist");
            x.push(true);
            j -= tr.charge[i];
            i = iw;
        }
    }

    let sequence = WinSequence::from_indicators(problem, x);
    if rounding == DpRounding::Pessimistic {
        debug_assert!(sequence.is_feasible(problem));
        debug_assert_eq!(sequence.wins, wins_bound);
    }
    Ok(DpSolution {
        wins_bound,
        sequence,
    })
}

/// Forward reachability check for the pessimistic DP: error out if any
/// reachable, affordable win would push the bid past the grid cap.
fn check_reachable_overflow(
    tr: &Transitions,
    t_len: usize,
    nb: usize,
    nr: usize,
    i0: usize,
    j0: usize,
) -> Result<(), AdversaryError> {
    let states = (nb + 1) * (nr + 1);
    let mut reach = vec![false; states];
    reach[i0 * (nr + 1) + j0] = true;
    for _ in 0..t_len {
        let mut next = vec![false; states];
        for i in 0..=nb {
            let row = i * (nr + 1);
            for j in 0..=nr {
                if !reach[row + j] {
                    continue;
                }
                next[tr.lose[i] * (nr + 1) + j] = true;
                if j >= tr.jmin[i] {
                    match tr.win[i] {
                        Some(iw) => next[iw * (nr + 1) + j - tr.charge[i]] = true,
                        None => {
                            return Err(AdversaryError::GridOverflow(format!(
                                "bid bin {i} escapes the bid cap on a win; refine the grid"
                            )));
                        }
                    }
                }
            }
        }
        reach = next;
    }
    Ok(())
}
