//! Lagrangian certificates bounding the optimizer's win count.
//!
//! With multiplier `λ = ρ_L/(ρ_L+ρ_O)²`, any binary win sequence over a
//! window of `τ` rounds that starts at learner bid `b` satisfies
//!
//! ```text
//! Σ x^(t)(1 − λ b^(t)) ≤ linear_coeff · τ + g(b),
//! g(b) = (½b² − (2ρ_O + ρ_L)b) / (η(ρ_O+ρ_L)²) + 2/η
//! ```
//!
//! which, evaluated over the whole horizon with `b^(1) = ρ_L`, caps the wins
//! at `(ρ_O/(ρ_L+ρ_O) + η)T + 2/η` — and at `ρ_O/(ρ_L+ρ_O)·T + 3√T` for
//! `η = 1/√T`.

use super::{AdversaryProblem, WinSequence};

/// The multiplier λ, the per-round linear coefficient, and the coefficients
/// of the bid-dependent offset `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangianCertificate {
    pub rho_l: f64,
    pub rho_o: f64,
    pub eta: f64,
    /// λ = ρ_L / (ρ_L + ρ_O)².
    pub lambda: f64,
    /// (ρ_O² + (ρ_O² + ρ_L²)η) / (ρ_O + ρ_L)².
    pub linear_coeff: f64,
    pub g_quadratic: f64,
    pub g_linear: f64,
    pub g_constant: f64,
}

impl LagrangianCertificate {
    pub fn new(rho_l: f64, rho_o: f64, eta: f64) -> Self {
        let s2 = (rho_l + rho_o) * (rho_l + rho_o);
        LagrangianCertificate {
            rho_l,
            rho_o,
            eta,
            lambda: rho_l / s2,
            linear_coeff: (rho_o * rho_o + (rho_o * rho_o + rho_l * rho_l) * eta) / s2,
            g_quadratic: 0.5 / (eta * s2),
            g_linear: -(2.0 * rho_o + rho_l) / (eta * s2),
            g_constant: 2.0 / eta,
        }
    }

    pub fn for_problem(problem: &AdversaryProblem) -> Self {
        Self::new(problem.rho_l, problem.rho_o, problem.eta)
    }

    /// The bid-dependent offset; nonnegative for every real `b`.
    pub fn g(&self, b: f64) -> f64 {
        (self.g_quadratic * b + self.g_linear) * b + self.g_constant
    }

    /// Where `g` attains its minimum: `2ρ_O + ρ_L`.
    pub fn g_minimizer(&self) -> f64 {
        2.0 * self.rho_o + self.rho_l
    }

    /// Per-round increments of the optimal Lagrangian from the two choices,
    /// as closed forms: `(win, lose(b))`. Winning contributes the constant
    /// `(ηρ_L² + 2ρ_O²)/(2(ρ_L+ρ_O)²)`; losing contributes
    /// `(b−ρ_L)(4ρ_O − (2−η)(b−ρ_L))/(2(ρ_L+ρ_O)²)`. Both stay below
    /// `linear_coeff`, which is what drives the certificate's induction.
    pub fn branch_increments(&self, b: f64) -> (f64, f64) {
        let s2 = (self.rho_l + self.rho_o) * (self.rho_l + self.rho_o);
        let win = (self.eta * self.rho_l * self.rho_l + 2.0 * self.rho_o * self.rho_o) / (2.0 * s2);
        let d = b - self.rho_l;
        let lose = d * (4.0 * self.rho_o - (2.0 - self.eta) * d) / (2.0 * s2);
        (win, lose)
    }
}

/// Upper bound `linear_coeff·τ + g(b)` dominating the windowed Lagrangian sum
/// of every binary sequence on a window of length `tau` starting at learner
/// bid `b`.
pub fn interval_lagrangian_bound(cert: &LagrangianCertificate, tau: usize, b: f64) -> f64 {
    cert.linear_coeff * tau as f64 + cert.g(b)
}

/// The Lagrangian objective `λTρ_O + Σ x^(t)(1 − λ b^(t))` of a sequence.
/// For feasible sequences and λ ≥ 0 this dominates the win count.
pub fn lagrangian_value(problem: &AdversaryProblem, seq: &WinSequence, lambda: f64) -> f64 {
    debug_assert_eq!(seq.x.len(), problem.horizon);
    debug_assert_eq!(seq.bid_path.len(), problem.horizon + 1);
    let mut sum = lambda * problem.horizon as f64 * problem.rho_o;
    for (xt, bt) in seq.x.iter().zip(&seq.bid_path) {
        if *xt {
            sum += 1.0 - lambda * bt;
        }
    }
    sum
}

/// Cap on the optimizer's wins: the general form `(ρ_O/(ρ_L+ρ_O) + η)T + 2/η`
/// and, when `η` equals `1/√T` within 1e-12, the tighter
/// `ρ_O/(ρ_L+ρ_O)·T + 3√T`; returns the smaller applicable value.
pub fn theorem_win_cap(rho_l: f64, rho_o: f64, horizon: usize, eta: f64) -> f64 {
    let t = horizon as f64;
    let share = rho_o / (rho_l + rho_o);
    let general = (share + eta) * t + 2.0 / eta;
    if t > 0.0 && (eta - 1.0 / t.sqrt()).abs() <= 1e-12 {
        general.min(share * t + 3.0 * t.sqrt())
    } else {
        general
    }
}
