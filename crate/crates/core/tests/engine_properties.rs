//! Property tests for the market engine: budget feasibility, the monotone
//! bid floor, the payment identity, determinism, and CSV round-tripping,
//! across randomized markets with scripted opponents and both formats.

use pacing_core::engine::{
    payment_identity, simulate, AgentSpec, AuctionFormat, MarketConfig, Policy, TieBreak, Trace,
};
use proptest::prelude::*;

#[derive(Debug, Clone)]
struct MarketCase {
    config: MarketConfig,
}

fn market_strategy() -> impl Strategy<Value = MarketCase> {
    let agent_count = 1usize..=5;
    (
        agent_count,
        0usize..=60,
        0.01f64..0.9,
        any::<bool>(),
        0u8..4,
        any::<u64>(),
    )
        .prop_flat_map(|(n, horizon, eta, first_price, tie_kind, seed)| {
            let shares = proptest::collection::vec(0.05f64..1.0, n);
            let bid_fractions = proptest::collection::vec(0.0f64..=1.0, n);
            let scripted_mask = proptest::collection::vec(any::<bool>(), n);
            let schedules =
                proptest::collection::vec(proptest::collection::vec(0.0f64..1.5, horizon), n);
            (
                Just((n, horizon, eta, first_price, tie_kind, seed)),
                shares,
                bid_fractions,
                scripted_mask,
                schedules,
            )
        })
        .prop_map(
            |(
                (n, horizon, eta, first_price, tie_kind, seed),
                shares,
                fractions,
                scripted,
                schedules,
            )| {
                let total: f64 = shares.iter().sum();
                let mut rho: Vec<f64> = shares.iter().map(|s| s / total).collect();
                let correction: f64 = 1.0 - rho.iter().sum::<f64>();
                rho[0] += correction;

                let agents = (0..n)
                    .map(|i| {
                        // agent 0 always paces so every case exercises the update
                        if i > 0 && scripted[i] {
                            AgentSpec {
                                id: i,
                                rho: rho[i],
                                initial_bid: schedules[i].first().copied().unwrap_or(0.0),
                                policy: Policy::Scripted(schedules[i].clone()),
                            }
                        } else {
                            AgentSpec {
                                id: i,
                                rho: rho[i],
                                initial_bid: fractions[i] * rho[i],
                                policy: Policy::PrimalPacing,
                            }
                        }
                    })
                    .collect();
                let tie_break = match tie_kind {
                    0 => TieBreak::LowestIndex,
                    1 => TieBreak::HighestIndex,
                    2 => TieBreak::SeededRandom(seed),
                    _ => TieBreak::FavorAgent((seed as usize) % n),
                };
                MarketCase {
                    config: MarketConfig {
                        agents,
                        horizon,
                        eta,
                        format: if first_price {
                            AuctionFormat::FirstPrice
                        } else {
                            AuctionFormat::SecondPrice
                        },
                        tie_break,
                        normalize_budgets: true,
                    },
                }
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(192))]

    #[test]
    fn pacing_invariants_hold(case in market_strategy()) {
        let config = case.config;
        let trace = simulate(&config).unwrap();
        let t_len = trace.horizon();
        let eta_t = 1e-6 * t_len as f64 + 1e-9;

        for (i, agent) in config.agents.iter().enumerate() {
            // Bids stay nonnegative for everyone.
            for t in 1..=t_len {
                prop_assert!(trace.bids_at(t)[i] >= 0.0);
            }
            if !agent.policy.is_pacing() {
                continue;
            }
            // Monotone floor: b^(t+1) ≥ min(b^(t), ρ).
            for t in 1..=t_len {
                let cur = trace.bid_boundary(t, i);
                let next = trace.bid_boundary(t + 1, i);
                prop_assert!(
                    next >= cur.min(agent.rho) - 1e-12,
                    "floor broken for agent {i} at round {t}: {cur} -> {next}"
                );
            }
            // Budget feasibility under arbitrary opposition.
            let spent = trace.total_payment(i);
            prop_assert!(spent <= agent.rho * t_len as f64 + 1e-9);
            // Total payment identity.
            let (lhs, rhs) = payment_identity(&trace, i).unwrap();
            prop_assert!((lhs - rhs).abs() <= eta_t, "identity off: {lhs} vs {rhs}");
        }

        // Per-round payment structure.
        for t in 1..=t_len {
            let rec = trace.record(t);
            prop_assert_eq!(rec.payments[rec.winner], rec.price);
            for (i, p) in rec.payments.iter().enumerate() {
                if i != rec.winner {
                    prop_assert_eq!(*p, 0.0);
                }
            }
            match config.format {
                AuctionFormat::FirstPrice => prop_assert_eq!(rec.price, rec.bids[rec.winner]),
                AuctionFormat::SecondPrice => {
                    let others = rec
                        .bids
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != rec.winner)
                        .map(|(_, b)| *b)
                        .fold(0.0, f64::max);
                    prop_assert_eq!(rec.price, others);
                }
            }
        }
    }

    #[test]
    fn simulation_is_bit_deterministic(case in market_strategy()) {
        let a = simulate(&case.config).unwrap();
        let b = simulate(&case.config).unwrap();
        prop_assert_eq!(a.horizon(), b.horizon());
        for t in 1..=a.horizon() {
            prop_assert_eq!(a.winner_at(t), b.winner_at(t));
            prop_assert_eq!(a.price_at(t).to_bits(), b.price_at(t).to_bits());
            for i in 0..a.n_agents() {
                prop_assert_eq!(a.bids_at(t)[i].to_bits(), b.bids_at(t)[i].to_bits());
            }
        }
        for i in 0..a.n_agents() {
            prop_assert_eq!(a.final_bids()[i].to_bits(), b.final_bids()[i].to_bits());
        }
    }

    #[test]
    fn csv_round_trip_is_bit_exact(case in market_strategy()) {
        let trace = simulate(&case.config).unwrap();
        let csv = trace.to_csv_string();
        let back = Trace::read_csv_str(case.config.clone(), &csv).unwrap();
        for t in 1..=trace.horizon() {
            prop_assert_eq!(trace.winner_at(t), back.winner_at(t));
            prop_assert_eq!(trace.price_at(t).to_bits(), back.price_at(t).to_bits());
            for i in 0..trace.n_agents() {
                prop_assert_eq!(trace.bids_at(t)[i].to_bits(), back.bids_at(t)[i].to_bits());
            }
        }
        for i in 0..trace.n_agents() {
            prop_assert_eq!(trace.final_bids()[i].to_bits(), back.final_bids()[i].to_bits());
        }
    }
}
