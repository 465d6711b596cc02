//! Locates the convergence milestones of a self-play run and compares the
//! attainment rounds against the analysis schedule.
//!
//! The argument proceeds in phases: first all bids reach `1 ± O(√η)`
//! (quadratic growth of the potential), then the bids collapse to within
//! `O(η)` of their average, then the average drifts to within `O(η)` of 1.
//! Re-applying the last two phases with the improved distance gives the
//! final band `[1 − 12η/ρ_min − η², 1 + 6η/ρ_min + 2η³]` from round
//! `(11/(ηρ_min)) log(1/η)` on.

use crate::engine::Trace;

use super::potential::{dist_avg_sq, dist_one_sq};
use super::{require_first_price_self_play, DynamicsError};

/// First-attainment rounds of the three convergence milestones, their
/// schedule bounds, and the final-band verdict.
///
/// Milestones are searched sequentially (each from the previous one's
/// attainment round on), mirroring the bootstrap structure of the analysis,
/// so `t_sqrt_eta ≤ t_avg ≤ t_one` whenever all are attained.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ConvergenceMilestones {
    /// First round with `‖b − 1‖² ≤ 15η/(4ρ_min) + η³‖b^(1) − 1‖²`.
    pub t_sqrt_eta: Option<usize>,
    /// First round from `t_sqrt_eta` with `‖b − b_avg·1‖ ≤ 3(D²+1)η/ρ_min`.
    pub t_avg: Option<usize>,
    /// First round from `t_avg` with all bids in `[1−2Aη−η², 1+Aη+2η³]`.
    pub t_one: Option<usize>,
    pub d_param: f64,
    /// `A = 3(D²+1)/ρ_min`.
    pub a_param: f64,
    pub sched_sqrt_eta: f64,
    pub sched_avg: f64,
    pub sched_one: f64,
    pub sqrt_eta_within_schedule: bool,
    pub avg_within_schedule: bool,
    pub one_within_schedule: bool,
    /// From this round on every bid must sit in `[band_lo, band_hi]`.
    pub band_start: usize,
    pub band_lo: f64,
    pub band_hi: f64,
    pub band_holds: bool,
}

/// The `D` of the first analysis pass: `√(15/(4ρ_min) + η)`.
pub fn default_first_pass_d(rho_min: f64, eta: f64) -> f64 {
    (15.0 / (4.0 * rho_min) + eta).sqrt()
}

/// Scans a first-price self-play trace for the milestone rounds.
///
/// Requires normalized budgets and a horizon covering both the milestone
/// schedule and the final-band start; shorter traces get
/// `ScheduleExceedsHorizon`. The milestone fields report attainment; the
/// `*_within_schedule` flags compare against the analysis bounds so runs
/// outside the small-η hypotheses can still be studied.
pub fn milestones(trace: &Trace, d_param: f64) -> Result<ConvergenceMilestones, DynamicsError> {
    require_first_price_self_play(trace)?;
    let config = trace.config();
    let n = trace.n_agents();
    let eta = config.eta;
    let rho_sum: f64 = config.agents.iter().map(|a| a.rho).sum();
    if (rho_sum - 1.0).abs() > 1e-12 {
        return Err(DynamicsError::InvalidInput(format!(
            "budget shares must sum to 1, got {rho_sum}"
        )));
    }
    let rho_min = config
        .agents
        .iter()
        .map(|a| a.rho)
        .fold(f64::INFINITY, f64::min);
    let log_inv_eta = (1.0 / eta).ln();

    let sched_sqrt_eta = 1.0 + 15.0 / (4.0 * eta * rho_min) * log_inv_eta;
    let sched_avg = sched_sqrt_eta + 1.0 + 1.0 / (2.0 * eta);
    let sched_one = sched_avg + 3.0 * (n as f64 / eta) * log_inv_eta;

    let band_start = ((11.0 / (eta * rho_min)) * log_inv_eta).ceil().max(1.0) as usize;
    let band_lo = 1.0 - 12.0 * eta / rho_min - eta * eta;
    let band_hi = 1.0 + 6.0 * eta / rho_min + 2.0 * eta * eta * eta;

    let needed = sched_one.ceil().max(band_start as f64) as usize;
    if trace.horizon() < needed {
        return Err(DynamicsError::ScheduleExceedsHorizon {
            needed,
            horizon: trace.horizon(),
        });
    }

    let a_param = 3.0 * (d_param * d_param + 1.0) / rho_min;
    let thr_sqrt = 15.0 * eta / (4.0 * rho_min) + eta.powi(3) * dist_one_sq(trace.bids_at(1));
    let thr_avg = a_param * eta;
    let one_lo = 1.0 - 2.0 * a_param * eta - eta * eta;
    let one_hi = 1.0 + a_param * eta + 2.0 * eta.powi(3);

    let mut t_sqrt_eta = None;
    let mut t_avg = None;
    let mut t_one = None;
    let mut band_holds = true;

    let mut buf = vec![0.0f64; n];
    for t in 1..=trace.horizon() + 1 {
        let bids: &[f64] = if t <= trace.horizon() {
            trace.bids_at(t)
        } else {
            buf.copy_from_slice(trace.final_bids());
            &buf
        };
        if t_sqrt_eta.is_none() && dist_one_sq(bids) <= thr_sqrt {
            t_sqrt_eta = Some(t);
        }
        if t_sqrt_eta.is_some() && t_avg.is_none() && dist_avg_sq(bids).sqrt() <= thr_avg {
            t_avg = Some(t);
        }
        if t_avg.is_some() && t_one.is_none() && bids.iter().all(|b| (one_lo..=one_hi).contains(b))
        {
            t_one = Some(t);
        }
        if t >= band_start && !bids.iter().all(|b| (band_lo..=band_hi).contains(b)) {
            band_holds = false;
        }
    }

    let within = |att: Option<usize>, sched: f64| att.is_some_and(|t| t as f64 <= sched.ceil());
    Ok(ConvergenceMilestones {
        t_sqrt_eta,
        t_avg,
        t_one,
        d_param,
        a_param,
        sched_sqrt_eta,
        sched_avg,
        sched_one,
        sqrt_eta_within_schedule: within(t_sqrt_eta, sched_sqrt_eta),
        avg_within_schedule: within(t_avg, sched_avg),
        one_within_schedule: within(t_one, sched_one),
        band_start,
        band_lo,
        band_hi,
        band_holds,
    })
}
