use super::{AuctionFormat, EngineError, TieBreak};
use crate::rng;

/// Bids within this distance of the maximum count as tied. Exact-equality
/// ties only arise from identical arithmetic; the tolerance keeps tie-break
/// policies reproducible across platforms.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Resolves one round: winner, price, and the per-agent payment vector
/// (losers pay zero in both formats).
///
/// The winner is a maximal bidder chosen by `tie_break` among all bids within
/// [`TIE_TOLERANCE`] of the maximum. First price charges the winner its own
/// bid; second price charges the highest non-winner bid, or 0 with a single
/// bidder.
pub fn resolve_round(
    bids: &[f64],
    format: AuctionFormat,
    tie_break: &TieBreak,
) -> Result<(usize, f64, Vec<f64>), EngineError> {
    if bids.is_empty() {
        return Err(EngineError::InvalidInput("empty bid vector".into()));
    }
    if let Some(bad) = bids.iter().find(|b| !(b.is_finite() && **b >= 0.0)) {
        return Err(EngineError::InvalidInput(format!(
            "bid {bad} is not a nonnegative finite number"
        )));
    }

    let max = bids.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<usize> = (0..bids.len())
        .filter(|&i| bids[i] >= max - TIE_TOLERANCE)
        .collect();

    let winner = match tie_break {
        TieBreak::LowestIndex => tied[0],
        TieBreak::HighestIndex => *tied.last().unwrap(),
        TieBreak::FavorAgent(id) => {
            if tied.contains(id) {
                *id
            } else {
                tied[0]
            }
        }
        TieBreak::SeededRandom(seed) => tied[(rng::splitmix64(*seed) % tied.len() as u64) as usize],
    };

    let price = match format {
        AuctionFormat::FirstPrice => bids[winner],
        AuctionFormat::SecondPrice => bids
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != winner)
            .map(|(_, b)| *b)
            .fold(0.0, f64::max),
    };

    let mut payments = vec![0.0; bids.len()];
    payments[winner] = price;
    Ok((winner, price, payments))
}

/// The pacing update `b ← b + η(ρ − p)`.
///
/// Rejects payments above the bid (beyond the tie tolerance): in both
/// auction formats an agent never pays more than its own bid, except that a
/// second-price tie can price up to [`TIE_TOLERANCE`] above it.
pub fn pacing_update(bid: f64, rho: f64, payment: f64, eta: f64) -> Result<f64, EngineError> {
    if !(bid.is_finite() && bid >= 0.0) {
        return Err(EngineError::InvalidInput(format!(
            "bid must be nonnegative, got {bid}"
        )));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(EngineError::InvalidInput(format!(
            "eta must lie in (0,1), got {eta}"
        )));
    }
    if !(payment >= 0.0 && payment <= bid + TIE_TOLERANCE) {
        return Err(EngineError::InvalidInput(format!(
            "payment {payment} outside [0, bid={bid}]"
        )));
    }
    Ok(bid + eta * (rho - payment))
}
