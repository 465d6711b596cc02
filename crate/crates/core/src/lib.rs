//! Lab for repeated first/second-price auctions with budget-paced bidders.
//!
//! Three subsystems:
//!
//! - [`engine`] — deterministic market mechanics: bid collection, winner and
//!   price resolution, the primal pacing update `b ← b + η(ρ − p)`, budget
//!   accounting, and CSV trace export/import.
//! - [`adversary`] — the single-learner-vs-optimizer game: exact win
//!   maximization by branch-and-bound over binary win sequences, a certified
//!   two-sided DP relaxation, Lagrangian win-cap certificates, and the
//!   bid-matching reduction.
//! - [`dynamics`] — self-play analyzers: the potential function driving the
//!   dynamics, per-round descent inequalities, convergence milestones, window
//!   win discrepancy, and round-robin detection.

pub mod adversary;
pub mod dynamics;
pub mod engine;
pub mod rng;

pub use engine::{simulate, AgentSpec, AuctionFormat, MarketConfig, Policy, TieBreak, Trace};
