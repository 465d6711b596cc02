use serde::{Deserialize, Serialize};

use super::EngineError;

/// Payment rule of the repeated auction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuctionFormat {
    FirstPrice,
    SecondPrice,
}

/// How a round resolves when several bids are maximal (within
/// [`TIE_TOLERANCE`](super::TIE_TOLERANCE)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    LowestIndex,
    HighestIndex,
    /// Deterministic pseudo-random pick among the tied agents. The simulator
    /// derives a fresh sub-seed per round, so identical bid vectors in
    /// different rounds can resolve differently while full runs stay
    /// reproducible.
    SeededRandom(u64),
    /// The named agent wins every tie it participates in; ties without it
    /// fall back to lowest index. This realizes the convention that the
    /// optimizing opponent picks the winner on equal bids.
    FavorAgent(usize),
}

/// Bidding behavior of one agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// The pacing update `b ← b + η(ρ − p)`.
    PrimalPacing,
    /// Fixed bid schedule, hard-capped at remaining budget each round.
    Scripted(Vec<f64>),
    /// Bids exactly the current bid of the designated pacing agent.
    MatchLearner(usize),
}

impl Policy {
    pub fn is_pacing(&self) -> bool {
        matches!(self, Policy::PrimalPacing)
    }
}

/// One agent of the market.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentSpec {
    /// Index of the agent; must equal its position in the agent list.
    pub id: usize,
    /// Budget share: the agent may spend at most `rho * T` over the run.
    pub rho: f64,
    /// Bid of round 1. Pacing agents must start at or below `rho`,
    /// which guarantees they never exhaust their budget.
    pub initial_bid: f64,
    pub policy: Policy,
}

/// Full specification of a simulation instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketConfig {
    pub agents: Vec<AgentSpec>,
    /// Number of rounds `T`.
    pub horizon: usize,
    /// Learning rate of the pacing update, in `(0, 1)`.
    pub eta: f64,
    pub format: AuctionFormat,
    pub tie_break: TieBreak,
    /// When set, budget shares are required to sum to 1 (within 1e-12).
    pub normalize_budgets: bool,
}

impl MarketConfig {
    /// Self-play market: `n` pacing agents with the given shares and
    /// initial bids.
    pub fn self_play(
        rho: &[f64],
        initial_bids: &[f64],
        horizon: usize,
        eta: f64,
        format: AuctionFormat,
        tie_break: TieBreak,
    ) -> Self {
        let agents = rho
            .iter()
            .zip(initial_bids)
            .enumerate()
            .map(|(id, (&rho, &initial_bid))| AgentSpec {
                id,
                rho,
                initial_bid,
                policy: Policy::PrimalPacing,
            })
            .collect();
        MarketConfig {
            agents,
            horizon,
            eta,
            format,
            tie_break,
            normalize_budgets: true,
        }
    }

    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn rho(&self) -> Vec<f64> {
        self.agents.iter().map(|a| a.rho).collect()
    }

    pub fn initial_bids(&self) -> Vec<f64> {
        self.agents.iter().map(|a| a.initial_bid).collect()
    }

    pub fn is_self_play(&self) -> bool {
        self.agents.iter().all(|a| a.policy.is_pacing())
    }

    /// Checks every structural invariant; simulation refuses configs that
    /// fail here.
    pub fn validate(&self) -> Result<(), EngineError> {
        let n = self.agents.len();
        if n == 0 {
            return Err(EngineError::InvalidInput("market has no agents".into()));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(EngineError::InvalidInput(format!(
                "eta must lie in (0,1), got {}",
                self.eta
            )));
        }
        for (pos, agent) in self.agents.iter().enumerate() {
            if agent.id != pos {
                return Err(EngineError::InvalidInput(format!(
                    "agent at position {pos} has id {}",
                    agent.id
                )));
            }
            if !(agent.rho.is_finite() && agent.rho > 0.0) {
                return Err(EngineError::InvalidInput(format!(
                    "agent {pos}: rho must be positive and finite, got {}",
                    agent.rho
                )));
            }
            if !(agent.initial_bid.is_finite() && agent.initial_bid >= 0.0) {
                return Err(EngineError::InvalidInput(format!(
                    "agent {pos}: initial bid must be nonnegative, got {}",
                    agent.initial_bid
                )));
            }
            match &agent.policy {
                Policy::PrimalPacing => {
                    // Starting above rho can exhaust the budget, so the
                    // engine rejects it for pacing agents.
                    if agent.initial_bid > agent.rho {
                        return Err(EngineError::InvalidInput(format!(
                            "agent {pos}: pacing agents need initial_bid <= rho \
                             ({} > {})",
                            agent.initial_bid, agent.rho
                        )));
                    }
                }
                Policy::Scripted(schedule) => {
                    if schedule.len() < self.horizon {
                        return Err(EngineError::InvalidInput(format!(
                            "agent {pos}: scripted schedule has {} bids but horizon is {}",
                            schedule.len(),
                            self.horizon
                        )));
                    }
                    if let Some(bad) = schedule.iter().find(|b| !(b.is_finite() && **b >= 0.0)) {
                        return Err(EngineError::InvalidInput(format!(
                            "agent {pos}: scripted bid {bad} is not a nonnegative finite number"
                        )));
                    }
                }
                Policy::MatchLearner(target) => {
                    if *target >= n || *target == pos {
                        return Err(EngineError::InvalidInput(format!(
                            "agent {pos}: match_learner target {target} out of range"
                        )));
                    }
                    if !self.agents[*target].policy.is_pacing() {
                        return Err(EngineError::InvalidInput(format!(
                            "agent {pos}: match_learner target {target} is not a pacing agent"
                        )));
                    }
                }
            }
        }
        if self.normalize_budgets {
            let sum: f64 = self.agents.iter().map(|a| a.rho).sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(EngineError::InvalidInput(format!(
                    "normalized budgets must sum to 1 within 1e-12, got {sum}"
                )));
            }
        }
        if let TieBreak::FavorAgent(id) = self.tie_break {
            if id >= n {
                return Err(EngineError::InvalidInput(format!(
                    "favored agent {id} out of range"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> MarketConfig {
        MarketConfig::self_play(
            &[0.5, 0.5],
            &[0.5, 0.4],
            10,
            0.1,
            AuctionFormat::FirstPrice,
            TieBreak::LowestIndex,
        )
    }

    #[test]
    fn valid_self_play_passes() {
        base().validate().unwrap();
    }

    #[test]
    fn eta_out_of_range_rejected() {
        let mut c = base();
        c.eta = 1.0;
        assert!(c.validate().is_err());
        c.eta = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn pacing_initial_bid_above_rho_rejected() {
        let mut c = base();
        c.agents[1].initial_bid = 0.6;
        assert!(c.validate().is_err());
    }

    #[test]
    fn scripted_schedule_too_short_rejected() {
        let mut c = base();
        c.normalize_budgets = false;
        c.agents[1].policy = Policy::Scripted(vec![0.3; 9]);
        assert!(c.validate().is_err());
        c.agents[1].policy = Policy::Scripted(vec![0.3; 10]);
        c.agents[1].initial_bid = 0.3;
        c.validate().unwrap();
    }

    #[test]
    fn unnormalized_budgets_rejected_when_flagged() {
        let mut c = base();
        c.agents[0].rho = 0.4;
        c.agents[0].initial_bid = 0.3;
        assert!(c.validate().is_err());
        c.normalize_budgets = false;
        c.validate().unwrap();
    }
}
