//! Cross-checks between the adversary solvers and their independent bounds:
//! weak duality, windowed certificate dominance, DP brackets against the
//! exact optimum, and format invariance of the matched-bid market.

use pacing_core::adversary::{
    dp_optimal, enumerate_optimal, interval_lagrangian_bound, lagrangian_value, theorem_win_cap,
    AdversaryProblem, DpRounding, LagrangianCertificate, WinSequence,
};
use pacing_core::engine::{simulate, AgentSpec, AuctionFormat, MarketConfig, Policy, TieBreak};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    // Weak duality: every feasible sequence's win count is dominated by its
    // Lagrangian value at λ = ρ_L/(ρ_L+ρ_O)².
    #[test]
    fn weak_duality(
        rho_l in 0.05f64..1.0,
        rho_o in 0.05f64..1.0,
        eta in 0.02f64..0.9,
        b1_frac in 0.0f64..=1.0,
        x in proptest::collection::vec(any::<bool>(), 0..=14),
    ) {
        let problem = AdversaryProblem::new(rho_l, rho_o, x.len(), eta, b1_frac * rho_l);
        let seq = WinSequence::from_indicators(&problem, x);
        prop_assume!(seq.is_feasible(&problem));
        let cert = LagrangianCertificate::for_problem(&problem);
        let value = lagrangian_value(&problem, &seq, cert.lambda);
        prop_assert!(seq.wins as f64 <= value + 1e-9, "wins {} > lagrangian {value}", seq.wins);
    }

    // The DP brackets must enclose the exact optimum on random instances.
    // Large η can legitimately push the bid past the grid cap, in which case
    // the pessimistic side reports GridOverflow and only the optimistic
    // bound applies.
    #[test]
    fn dp_brackets_random_instances(
        rho_o in 0.05f64..0.95,
        t in 1usize..=12,
        eta in 0.05f64..0.9,
    ) {
        use pacing_core::adversary::AdversaryError;
        let problem = AdversaryProblem::new(1.0 - rho_o, rho_o, t, eta, 1.0 - rho_o);
        let exact = enumerate_optimal(&problem).unwrap().wins;
        let hi = dp_optimal(&problem, 96, 96, DpRounding::Optimistic).unwrap();
        prop_assert!(exact <= hi.wins_bound);
        match dp_optimal(&problem, 96, 96, DpRounding::Pessimistic) {
            Ok(lo) => {
                prop_assert!(lo.wins_bound <= exact);
                prop_assert!(lo.sequence.is_feasible(&problem));
            }
            Err(AdversaryError::GridOverflow(_)) => {}
            Err(e) => return Err(TestCaseError::fail(format!("unexpected error: {e}"))),
        }
    }

    // The bid path stored in a WinSequence obeys the stated recurrence with
    // exact floating-point equality, not just up to tolerance.
    #[test]
    fn bid_path_recurrence_is_bit_exact(
        rho_l in 0.05f64..1.0,
        eta in 0.02f64..0.9,
        b1_frac in 0.0f64..=1.0,
        x in proptest::collection::vec(any::<bool>(), 0..=20),
    ) {
        let problem = AdversaryProblem::new(rho_l, 0.5, x.len(), eta, b1_frac * rho_l);
        let seq = WinSequence::from_indicators(&problem, x);
        prop_assert_eq!(seq.bid_path.len(), problem.horizon + 1);
        for t in 0..problem.horizon {
            let xf = if seq.x[t] { 1.0 } else { 0.0 };
            let expect = seq.bid_path[t] + eta * (rho_l - seq.bid_path[t] * (1.0 - xf));
            prop_assert_eq!(expect.to_bits(), seq.bid_path[t + 1].to_bits());
        }
    }

    // The learner's bids in the transformed (matched-bid) market and the
    // adversary recurrence are the same computation: replaying the win
    // pattern of a reduction through WinSequence reproduces the transformed
    // trace's learner bids bit for bit.
    #[test]
    fn reduction_and_recurrence_agree_bitwise(
        bids in proptest::collection::vec(0.0f64..1.3, 1..=14),
        first_price in any::<bool>(),
    ) {
        use pacing_core::adversary::match_bids_reduction;
        let learner = AgentSpec { id: 0, rho: 0.5, initial_bid: 0.5, policy: Policy::PrimalPacing };
        let format = if first_price { AuctionFormat::FirstPrice } else { AuctionFormat::SecondPrice };
        let (original, transformed) = match_bids_reduction(&learner, 0.1, &bids, format).unwrap();
        let x: Vec<bool> = (1..=original.horizon()).map(|t| original.winner_at(t) == 1).collect();
        let problem = AdversaryProblem::new(0.5, 0.5, bids.len(), 0.1, 0.5);
        let seq = WinSequence::from_indicators(&problem, x);
        for t in 1..=transformed.horizon() {
            prop_assert_eq!(
                transformed.bids_at(t)[0].to_bits(),
                seq.bid_path[t - 1].to_bits(),
                "learner bid diverges at round {}", t
            );
        }
        prop_assert_eq!(
            transformed.final_bids()[0].to_bits(),
            seq.bid_path[bids.len()].to_bits()
        );
    }
}

// Windowed certificate dominance at a desk-checkable size: every binary
// sequence of length 10 and every suffix window satisfies
// Σ x (1 − λ b) ≤ linear_coeff·τ + g(b).
#[test]
fn certificate_dominates_all_suffix_windows() {
    let t_len = 10usize;
    for i in 1..=9 {
        let rho_o = i as f64 / 10.0;
        let rho_l = 1.0 - rho_o;
        for eta in [0.1, 0.5] {
            let problem = AdversaryProblem::new(rho_l, rho_o, t_len, eta, rho_l);
            let cert = LagrangianCertificate::for_problem(&problem);
            for mask in 0u32..(1 << t_len) {
                let x: Vec<bool> = (0..t_len).map(|k| mask >> k & 1 == 1).collect();
                let seq = WinSequence::from_indicators(&problem, x);
                let mut windowed = 0.0;
                for tau in 0..=t_len {
                    // window [T-tau+1, T]; b is the bid entering it
                    if tau > 0 {
                        let t = t_len - tau; // 0-based index of the round joining the window
                        if seq.x[t] {
                            windowed += 1.0 - cert.lambda * seq.bid_path[t];
                        }
                    }
                    let b = seq.bid_path[t_len - tau];
                    let bound = interval_lagrangian_bound(&cert, tau, b);
                    assert!(
                        windowed <= bound + 1e-9,
                        "window tau={tau} rho_o={rho_o} eta={eta} mask={mask}: {windowed} > {bound}"
                    );
                }
            }
        }
    }
}

// Full 2^16 scan oracle at a size the branch-and-bound prunes heavily:
// win counts and the lexicographic tie-break must match an unpruned
// enumeration.
#[test]
fn branch_and_bound_matches_full_scan_at_t16() {
    for rho_o in [0.3, 0.6] {
        let problem = AdversaryProblem::new(1.0 - rho_o, rho_o, 16, 0.25, 1.0 - rho_o);
        let fast = enumerate_optimal(&problem).unwrap();
        let mut best: Option<WinSequence> = None;
        for mask in 0u32..(1 << 16) {
            let x: Vec<bool> = (0..16).map(|i| mask >> i & 1 == 1).collect();
            let seq = WinSequence::from_indicators(&problem, x);
            if !seq.is_feasible(&problem) {
                continue;
            }
            let better = match &best {
                None => true,
                Some(b) => seq.wins > b.wins || (seq.wins == b.wins && seq.x < b.x),
            };
            if better {
                best = Some(seq);
            }
        }
        let slow = best.unwrap();
        assert_eq!(fast.wins, slow.wins, "rho_o={rho_o}");
        assert_eq!(fast.x, slow.x, "rho_o={rho_o}");
    }
}

// The theorem's cap must dominate the exact optimum under its hypotheses.
#[test]
fn exact_optimum_below_theorem_cap_small_grid() {
    for t in [4usize, 8, 12] {
        for i in 1..=9 {
            let rho_o = i as f64 / 10.0;
            let rho_l = 1.0 - rho_o;
            let problem = AdversaryProblem::theorem_instance(rho_l, rho_o, t);
            let wins = enumerate_optimal(&problem).unwrap().wins;
            let cap = theorem_win_cap(rho_l, rho_o, t, problem.eta);
            assert!(
                (wins as f64) <= cap + 1e-9,
                "T={t} rho_o={rho_o}: wins {wins} above cap {cap}"
            );
        }
    }
}

// A matched-bid market prices identically under both formats: the optimizer
// mirrors the learner, every round ties, and second price pays the other
// side's (equal) bid.
#[test]
fn matched_market_is_format_invariant() {
    let build = |format| {
        let config = MarketConfig {
            agents: vec![
                AgentSpec {
                    id: 0,
                    rho: 0.4,
                    initial_bid: 0.35,
                    policy: Policy::PrimalPacing,
                },
                AgentSpec {
                    id: 1,
                    rho: 0.6,
                    initial_bid: 0.0,
                    policy: Policy::MatchLearner(0),
                },
            ],
            horizon: 50,
            eta: 0.1,
            format,
            tie_break: TieBreak::FavorAgent(1),
            normalize_budgets: true,
        };
        simulate(&config).unwrap()
    };
    let fp = build(AuctionFormat::FirstPrice);
    let sp = build(AuctionFormat::SecondPrice);
    assert_eq!(fp.wins(1), sp.wins(1));
    for t in 1..=fp.horizon() {
        assert_eq!(fp.winner_at(t), sp.winner_at(t));
        assert_eq!(fp.price_at(t).to_bits(), sp.price_at(t).to_bits());
    }
}
