use std::io::{BufRead, Write};

use super::simulate::RoundView;
use super::{EngineError, MarketConfig, Policy};

/// Materialized record of one round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    /// 1-based round number.
    pub round: usize,
    pub bids: Vec<f64>,
    pub winner: usize,
    /// What the winner pays; losers pay 0 in both formats.
    pub price: f64,
    pub payments: Vec<f64>,
}

/// Immutable record of a full run.
///
/// Storage is columnar (one flat bid array of `T × n` entries) so multi-
/// million-round traces stay compact; [`RoundRecord`]s are materialized on
/// demand.
#[derive(Debug, Clone)]
pub struct Trace {
    config: MarketConfig,
    winners: Vec<u32>,
    prices: Vec<f64>,
    bids: Vec<f64>,
    final_bids: Vec<f64>,
}

impl Trace {
    pub(crate) fn from_parts(
        config: MarketConfig,
        winners: Vec<u32>,
        prices: Vec<f64>,
        bids: Vec<f64>,
        final_bids: Vec<f64>,
    ) -> Self {
        let n = config.n_agents();
        debug_assert_eq!(winners.len(), config.horizon);
        debug_assert_eq!(prices.len(), config.horizon);
        debug_assert_eq!(bids.len(), config.horizon * n);
        debug_assert_eq!(final_bids.len(), n);
        Trace {
            config,
            winners,
            prices,
            bids,
            final_bids,
        }
    }

    pub fn config(&self) -> &MarketConfig {
        &self.config
    }

    /// Number of recorded rounds `T`.
    pub fn horizon(&self) -> usize {
        self.winners.len()
    }

    pub fn n_agents(&self) -> usize {
        self.config.n_agents()
    }

    /// Bid vector of round `t` (1-based).
    pub fn bids_at(&self, t: usize) -> &[f64] {
        let n = self.n_agents();
        &self.bids[(t - 1) * n..t * n]
    }

    pub fn winner_at(&self, t: usize) -> usize {
        self.winners[t - 1] as usize
    }

    pub fn price_at(&self, t: usize) -> f64 {
        self.prices[t - 1]
    }

    pub fn payment(&self, t: usize, agent: usize) -> f64 {
        if self.winner_at(t) == agent {
            self.price_at(t)
        } else {
            0.0
        }
    }

    /// Bid of `agent` at boundary `t ∈ 1..=T+1`; `T+1` reads the final bid
    /// vector `b^(T+1)`.
    pub fn bid_boundary(&self, t: usize, agent: usize) -> f64 {
        if t == self.horizon() + 1 {
            self.final_bids[agent]
        } else {
            self.bids_at(t)[agent]
        }
    }

    /// `b^(T+1)` — for pacing agents the post-update bid after round `T`.
    pub fn final_bids(&self) -> &[f64] {
        &self.final_bids
    }

    pub fn record(&self, t: usize) -> RoundRecord {
        let n = self.n_agents();
        let winner = self.winner_at(t);
        let price = self.price_at(t);
        let mut payments = vec![0.0; n];
        payments[winner] = price;
        RoundRecord {
            round: t,
            bids: self.bids_at(t).to_vec(),
            winner,
            price,
            payments,
        }
    }

    pub fn rounds(&self) -> impl Iterator<Item = RoundView<'_>> {
        (1..=self.horizon()).map(move |t| RoundView {
            round: t,
            bids: self.bids_at(t),
            winner: self.winner_at(t),
            price: self.price_at(t),
        })
    }

    pub fn total_payment(&self, agent: usize) -> f64 {
        (1..=self.horizon()).map(|t| self.payment(t, agent)).sum()
    }

    pub fn wins(&self, agent: usize) -> usize {
        self.winners
            .iter()
            .filter(|w| **w as usize == agent)
            .count()
    }

    /// Writes the trace as CSV: `round,agent,bid,winner_flag,payment,
    /// spent_cumulative`, one row per (round, agent), header mandatory.
    /// Floats use 17 significant digits so values round-trip bit-exactly.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "round,agent,bid,winner_flag,payment,spent_cumulative")?;
        let n = self.n_agents();
        let mut spent = vec![0.0f64; n];
        for t in 1..=self.horizon() {
            let bids = self.bids_at(t);
            for i in 0..n {
                let payment = self.payment(t, i);
                spent[i] += payment;
                writeln!(
                    w,
                    "{},{},{:.16e},{},{:.16e},{:.16e}",
                    t,
                    i,
                    bids[i],
                    u8::from(self.winner_at(t) == i),
                    payment,
                    spent[i],
                )?;
            }
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is ascii")
    }

    /// Reads a trace back from CSV produced by [`Trace::write_csv`]. The
    /// market config is not part of the CSV and must be supplied (the runner
    /// persists it as a JSON sidecar).
    ///
    /// Final bids are reconstructed by replaying the round-`T` update, which
    /// reproduces the simulator's arithmetic bit-for-bit.
    pub fn read_csv<R: BufRead>(config: MarketConfig, reader: R) -> Result<Trace, EngineError> {
        config.validate()?;
        let n = config.n_agents();
        let t_len = config.horizon;

        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| EngineError::MalformedTrace("missing header row".into()))?
            .map_err(EngineError::Io)?;
        if header.trim() != "round,agent,bid,winner_flag,payment,spent_cumulative" {
            return Err(EngineError::MalformedTrace(format!(
                "unexpected header: {header}"
            )));
        }

        let mut winners: Vec<Option<u32>> = vec![None; t_len];
        let mut prices = vec![0.0f64; t_len];
        let mut bids = vec![f64::NAN; t_len * n];
        let mut seen = vec![false; t_len * n];
        let mut spent_check = vec![0.0f64; n];

        for (lineno, line) in lines.enumerate() {
            let line = line.map_err(EngineError::Io)?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 6 {
                return Err(EngineError::MalformedTrace(format!(
                    "line {}: expected 6 fields, got {}",
                    lineno + 2,
                    fields.len()
                )));
            }
            let parse_err = |what: &str| {
                EngineError::MalformedTrace(format!("line {}: bad {what}", lineno + 2))
            };
            let t: usize = fields[0].trim().parse().map_err(|_| parse_err("round"))?;
            let agent: usize = fields[1].trim().parse().map_err(|_| parse_err("agent"))?;
            let bid: f64 = fields[2].trim().parse().map_err(|_| parse_err("bid"))?;
            let flag: u8 = fields[3]
                .trim()
                .parse()
                .map_err(|_| parse_err("winner_flag"))?;
            let payment: f64 = fields[4].trim().parse().map_err(|_| parse_err("payment"))?;
            let spent: f64 = fields[5].trim().parse().map_err(|_| parse_err("spent"))?;

            if t == 0 || t > t_len || agent >= n {
                return Err(EngineError::MalformedTrace(format!(
                    "line {}: round {t} / agent {agent} out of range",
                    lineno + 2
                )));
            }
            let idx = (t - 1) * n + agent;
            if seen[idx] {
                return Err(EngineError::MalformedTrace(format!(
                    "duplicate row for round {t} agent {agent}"
                )));
            }
            seen[idx] = true;
            bids[idx] = bid;
            if flag == 1 {
                if winners[t - 1].is_some() {
                    return Err(EngineError::MalformedTrace(format!(
                        "round {t} has two winners"
                    )));
                }
                winners[t - 1] = Some(agent as u32);
                prices[t - 1] = payment;
            } else if payment != 0.0 {
                return Err(EngineError::MalformedTrace(format!(
                    "round {t}: loser {agent} has nonzero payment"
                )));
            }
            spent_check[agent] += payment;
            if spent_check[agent].to_bits() != spent.to_bits() {
                return Err(EngineError::MalformedTrace(format!(
                    "round {t} agent {agent}: cumulative spend mismatch"
                )));
            }
        }

        if seen.iter().any(|s| !s) {
            return Err(EngineError::MalformedTrace(format!(
                "expected {} rows, some are missing",
                t_len * n
            )));
        }
        let winners: Vec<u32> = winners
            .into_iter()
            .enumerate()
            .map(|(t, w)| {
                w.ok_or_else(|| {
                    EngineError::MalformedTrace(format!("round {} has no winner", t + 1))
                })
            })
            .collect::<Result<_, _>>()?;

        // Rebuild b^(T+1) from the last recorded round.
        let mut final_bids = Vec::with_capacity(n);
        for (i, agent) in config.agents.iter().enumerate() {
            let value = if t_len == 0 {
                agent.initial_bid
            } else {
                match agent.policy {
                    Policy::PrimalPacing => {
                        let last_bid = bids[(t_len - 1) * n + i];
                        let payment = if winners[t_len - 1] as usize == i {
                            prices[t_len - 1]
                        } else {
                            0.0
                        };
                        last_bid + config.eta * (agent.rho - payment)
                    }
                    _ => f64::NAN, // resolved below; may depend on another agent
                }
            };
            final_bids.push(value);
        }
        if t_len > 0 {
            for (i, agent) in config.agents.iter().enumerate() {
                match agent.policy {
                    Policy::Scripted(_) => final_bids[i] = bids[(t_len - 1) * n + i],
                    Policy::MatchLearner(target) => final_bids[i] = final_bids[target],
                    Policy::PrimalPacing => {}
                }
            }
        }

        Ok(Trace {
            config,
            winners,
            prices,
            bids,
            final_bids,
        })
    }

    pub fn read_csv_str(config: MarketConfig, csv: &str) -> Result<Trace, EngineError> {
        Self::read_csv(config, csv.as_bytes())
    }
}

/// Both sides of the total-payment identity for a pacing agent:
/// `lhs = Σ_t p^(t)` and `rhs = ρT + (b^(1) − b^(T+1))/η`. Callers assert
/// `|lhs − rhs| ≤ 1e-6 · T`.
pub fn payment_identity(trace: &Trace, agent: usize) -> Result<(f64, f64), EngineError> {
    let config = trace.config();
    let spec = config
        .agents
        .get(agent)
        .ok_or_else(|| EngineError::InvalidInput(format!("agent {agent} out of range")))?;
    if !spec.policy.is_pacing() {
        return Err(EngineError::InvalidInput(format!(
            "agent {agent} does not run the pacing update"
        )));
    }
    let lhs = trace.total_payment(agent);
    let rhs = spec.rho * trace.horizon() as f64
        + (spec.initial_bid - trace.final_bids()[agent]) / config.eta;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{simulate, AuctionFormat, MarketConfig, TieBreak};

    fn sample_config() -> MarketConfig {
        MarketConfig::self_play(
            &[0.5, 0.5],
            &[0.5, 0.4],
            7,
            0.1,
            AuctionFormat::FirstPrice,
            TieBreak::LowestIndex,
        )
    }

    #[test]
    fn csv_round_trips_bit_exactly() {
        let trace = simulate(&sample_config()).unwrap();
        let csv = trace.to_csv_string();
        let back = Trace::read_csv_str(sample_config(), &csv).unwrap();
        assert_eq!(trace.horizon(), back.horizon());
        for t in 1..=trace.horizon() {
            assert_eq!(trace.winner_at(t), back.winner_at(t));
            assert_eq!(trace.price_at(t).to_bits(), back.price_at(t).to_bits());
            for i in 0..2 {
                assert_eq!(trace.bids_at(t)[i].to_bits(), back.bids_at(t)[i].to_bits());
            }
        }
        for i in 0..2 {
            assert_eq!(
                trace.final_bids()[i].to_bits(),
                back.final_bids()[i].to_bits()
            );
        }
    }

    // Golden copy of the wire format: schema, column order, and the
    // 17-significant-digit float rendering are load-bearing for replay.
    #[test]
    fn csv_matches_golden_output() {
        let mut config = sample_config();
        config.horizon = 2;
        let golden = "\
round,agent,bid,winner_flag,payment,spent_cumulative
1,0,5.0000000000000000e-1,1,5.0000000000000000e-1,5.0000000000000000e-1
1,1,4.0000000000000002e-1,0,0.0000000000000000e0,0.0000000000000000e0
2,0,5.0000000000000000e-1,1,5.0000000000000000e-1,1.0000000000000000e0
2,1,4.5000000000000001e-1,0,0.0000000000000000e0,0.0000000000000000e0
";
        assert_eq!(simulate(&config).unwrap().to_csv_string(), golden);
    }

    #[test]
    fn csv_rejects_missing_header() {
        let trace = simulate(&sample_config()).unwrap();
        let csv = trace.to_csv_string();
        let body = csv.split_once('\n').unwrap().1;
        assert!(Trace::read_csv_str(sample_config(), body).is_err());
    }

    #[test]
    fn payment_identity_on_fixed_point_run() {
        // Single agent at the fixed point: pays 1.0 every round.
        let config = MarketConfig::self_play(
            &[1.0],
            &[1.0],
            10,
            0.5,
            AuctionFormat::FirstPrice,
            TieBreak::LowestIndex,
        );
        let trace = simulate(&config).unwrap();
        let (lhs, rhs) = payment_identity(&trace, 0).unwrap();
        assert_eq!(lhs, 10.0);
        assert_eq!(rhs, 10.0);
    }

    #[test]
    fn payment_identity_zero_horizon() {
        let mut config = sample_config();
        config.horizon = 0;
        let trace = simulate(&config).unwrap();
        let (lhs, rhs) = payment_identity(&trace, 0).unwrap();
        assert_eq!(lhs, 0.0);
        assert_eq!(rhs, 0.0);
    }

    #[test]
    fn payment_identity_two_round_example() {
        let trace = simulate(&sample_config()).unwrap();
        let (lhs, rhs) = payment_identity(&trace, 0).unwrap();
        assert!((lhs - rhs).abs() <= 1e-6 * trace.horizon() as f64);

        // The hand-derived T=2 case: agent 0 pays 1.0 total, and
        // rho*T + (b1 - b3)/eta = 1.0.
        let mut config = sample_config();
        config.horizon = 2;
        let short = simulate(&config).unwrap();
        let (lhs, rhs) = payment_identity(&short, 0).unwrap();
        assert!((lhs - 1.0).abs() < 1e-15);
        assert!((rhs - 1.0).abs() < 1e-12);
    }
}
