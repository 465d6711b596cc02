use super::auction::resolve_round;
use super::trace::Trace;
use super::{EngineError, MarketConfig, Policy, TieBreak};
use crate::rng;

/// Mutable per-agent bookkeeping during a run.
#[derive(Debug, Clone)]
pub struct AgentState {
    /// Current bid `b^(t)`; for pacing agents this is the bid of the next
    /// round after the update has been applied.
    pub bid: f64,
    /// Cumulative payments.
    pub spent: f64,
    /// Rounds won so far.
    pub wins: u64,
}

/// Borrowed view of one resolved round, handed to streaming observers.
#[derive(Debug, Clone, Copy)]
pub struct RoundView<'a> {
    /// 1-based round number.
    pub round: usize,
    pub bids: &'a [f64],
    pub winner: usize,
    pub price: f64,
}

impl RoundView<'_> {
    pub fn payment(&self, agent: usize) -> f64 {
        if agent == self.winner {
            self.price
        } else {
            0.0
        }
    }
}

/// Runs the market and collects the full trace.
///
/// Deterministic given the config (including any tie-break seed): repeated
/// invocations produce bit-identical traces.
pub fn simulate(config: &MarketConfig) -> Result<Trace, EngineError> {
    let n = config.n_agents();
    let t_len = config.horizon;
    let mut winners = Vec::with_capacity(t_len);
    let mut prices = Vec::with_capacity(t_len);
    let mut bids = Vec::with_capacity(t_len.saturating_mul(n));
    let final_bids = simulate_with(config, |view| {
        winners.push(view.winner as u32);
        prices.push(view.price);
        bids.extend_from_slice(view.bids);
    })?;
    Ok(Trace::from_parts(
        config.clone(),
        winners,
        prices,
        bids,
        final_bids,
    ))
}

/// Streaming form of [`simulate`]: drives `observer` once per round and
/// returns only the final bid vector `b^(T+1)`. Memory stays `O(n)` no matter
/// the horizon.
pub fn simulate_with<F>(config: &MarketConfig, mut observer: F) -> Result<Vec<f64>, EngineError>
where
    F: FnMut(RoundView<'_>),
{
    config.validate()?;
    let n = config.n_agents();
    let eta = config.eta;
    let horizon_budget = config.horizon as f64;

    let mut states: Vec<AgentState> = config
        .agents
        .iter()
        .map(|a| AgentState {
            bid: match a.policy {
                Policy::MatchLearner(target) => config.agents[target].initial_bid,
                _ => a.initial_bid,
            },
            spent: 0.0,
            wins: 0,
        })
        .collect();

    let mut bids = vec![0.0; n];
    for t in 1..=config.horizon {
        for (i, agent) in config.agents.iter().enumerate() {
            bids[i] = match &agent.policy {
                Policy::PrimalPacing => states[i].bid,
                Policy::Scripted(schedule) => {
                    // Hard budget enforcement: never bid more than what is
                    // left of rho * T.
                    let remaining = agent.rho * horizon_budget - states[i].spent;
                    schedule[t - 1].min(remaining).max(0.0)
                }
                Policy::MatchLearner(target) => states[*target].bid,
            };
        }

        let round_tie_break = match config.tie_break {
            TieBreak::SeededRandom(seed) => TieBreak::SeededRandom(rng::mix(seed, t as u64)),
            other => other,
        };
        let (winner, price, _) = resolve_round(&bids, config.format, &round_tie_break)?;

        observer(RoundView {
            round: t,
            bids: &bids,
            winner,
            price,
        });

        for (i, agent) in config.agents.iter().enumerate() {
            let payment = if i == winner { price } else { 0.0 };
            states[i].spent += payment;
            if i == winner {
                states[i].wins += 1;
            }
            match agent.policy {
                // Same arithmetic as `pacing_update`; preconditions hold by
                // construction of resolve_round.
                Policy::PrimalPacing => states[i].bid = bids[i] + eta * (agent.rho - payment),
                _ => states[i].bid = bids[i],
            }
        }
    }

    let final_bids = config
        .agents
        .iter()
        .enumerate()
        .map(|(i, a)| match a.policy {
            Policy::MatchLearner(target) => states[target].bid,
            _ => states[i].bid,
        })
        .collect();
    Ok(final_bids)
}
