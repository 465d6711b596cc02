//! Deterministic mechanics of one repeated-auction market.
//!
//! A market is `n` agents bidding over `T` rounds. Each round every agent
//! submits a bid, the highest bid wins (ties resolved by a configurable
//! policy), and the winner pays its own bid (first price) or the highest
//! losing bid (second price). Pacing agents then update their bid by
//! `b ← b + η(ρ − p)` where `ρT` is their total budget and `p` the payment
//! they just made.

mod auction;
mod config;
mod simulate;
mod trace;

pub use auction::{pacing_update, resolve_round, TIE_TOLERANCE};
pub use config::{AgentSpec, AuctionFormat, MarketConfig, Policy, TieBreak};
pub use simulate::{simulate, simulate_with, AgentState, RoundView};
pub use trace::{payment_identity, RoundRecord, Trace};

use std::fmt;

/// Errors out of the market engine.
#[derive(Debug)]
pub enum EngineError {
    /// A precondition on inputs or configuration does not hold.
    InvalidInput(String),
    /// A trace CSV could not be parsed or is internally inconsistent.
    MalformedTrace(String),
    Io(std::io::Error),
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            EngineError::MalformedTrace(msg) => write!(f, "malformed trace: {msg}"),
            EngineError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for EngineError {}

impl From<std::io::Error> for EngineError {
    fn from(e: std::io::Error) -> Self {
        EngineError::Io(e)
    }
}
