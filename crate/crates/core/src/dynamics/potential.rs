use super::DynamicsError;

/// The potential `f(b) = ½ max_i b_i² − ρᵀb + ½` evaluated at one bid
/// vector, together with the geometry the convergence analysis tracks.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PotentialState {
    pub b: Vec<f64>,
    pub rho: Vec<f64>,
    pub f_value: f64,
    /// The extreme subgradient `b_max · e_i* − ρ` at the designated
    /// maximizer `i*`.
    pub subgrad: Vec<f64>,
    /// Index the subgradient was taken at.
    pub maximizer: usize,
    /// ‖b − 1‖₂.
    pub dist_one: f64,
    /// ‖b − b_avg·1‖₂.
    pub dist_avg: f64,
    pub b_avg: f64,
    pub b_max: f64,
    pub b_min: f64,
}

/// Evaluates the potential with the lowest-index maximizer as the
/// subgradient's extreme point (the convention for evaluation off a trace).
pub fn potential(b: &[f64], rho: &[f64]) -> Result<PotentialState, DynamicsError> {
    let maximizer = lowest_argmax(b)?;
    potential_with_winner(b, rho, maximizer)
}

/// Evaluates the potential with the subgradient taken at the realized winner
/// of the round, which is the extreme point the self-play dynamics follow.
pub fn potential_with_winner(
    b: &[f64],
    rho: &[f64],
    winner: usize,
) -> Result<PotentialState, DynamicsError> {
    if b.len() != rho.len() || b.is_empty() {
        return Err(DynamicsError::InvalidInput(format!(
            "dimension mismatch: {} bids vs {} shares",
            b.len(),
            rho.len()
        )));
    }
    if winner >= b.len() {
        return Err(DynamicsError::InvalidInput(format!(
            "winner index {winner} out of range"
        )));
    }
    if let Some(bad) = b.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(DynamicsError::InvalidInput(format!(
            "bids must be nonnegative, got {bad}"
        )));
    }
    let rho_sum: f64 = rho.iter().sum();
    if (rho_sum - 1.0).abs() > 1e-12 {
        return Err(DynamicsError::InvalidInput(format!(
            "budget shares must sum to 1 within 1e-12, got {rho_sum}"
        )));
    }

    let n = b.len();
    let b_max = b.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let b_min = b.iter().cloned().fold(f64::INFINITY, f64::min);
    let b_avg = b.iter().sum::<f64>() / n as f64;
    let rho_dot_b: f64 = rho.iter().zip(b).map(|(r, x)| r * x).sum();
    let f_value = 0.5 * b_max * b_max - rho_dot_b + 0.5;

    let mut subgrad: Vec<f64> = rho.iter().map(|r| -r).collect();
    subgrad[winner] += b[winner];

    let dist_one = b.iter().map(|x| (x - 1.0) * (x - 1.0)).sum::<f64>().sqrt();
    let dist_avg = b
        .iter()
        .map(|x| (x - b_avg) * (x - b_avg))
        .sum::<f64>()
        .sqrt();

    Ok(PotentialState {
        b: b.to_vec(),
        rho: rho.to_vec(),
        f_value,
        subgrad,
        maximizer: winner,
        dist_one,
        dist_avg,
        b_avg,
        b_max,
        b_min,
    })
}

pub(crate) fn lowest_argmax(b: &[f64]) -> Result<usize, DynamicsError> {
    if b.is_empty() {
        return Err(DynamicsError::InvalidInput("empty bid vector".into()));
    }
    let mut best = 0;
    for (i, x) in b.iter().enumerate().skip(1) {
        if *x > b[best] {
            best = i;
        }
    }
    Ok(best)
}

/// ‖b − 1‖₂² without the square root, for the descent inequalities.
pub(crate) fn dist_one_sq(b: &[f64]) -> f64 {
    b.iter().map(|x| (x - 1.0) * (x - 1.0)).sum()
}

/// ‖b − b_avg·1‖₂² without the square root.
pub(crate) fn dist_avg_sq(b: &[f64]) -> f64 {
    let avg = b.iter().sum::<f64>() / b.len() as f64;
    b.iter().map(|x| (x - avg) * (x - avg)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_ones_has_zero_potential() {
        for rho in [vec![0.5, 0.5], vec![0.2, 0.3, 0.5]] {
            let b = vec![1.0; rho.len()];
            let s = potential(&b, &rho).unwrap();
            assert!(s.f_value.abs() < 1e-15);
            assert_eq!(s.dist_one, 0.0);
        }
    }

    #[test]
    fn all_zeros_has_half_potential() {
        let s = potential(&[0.0, 0.0], &[0.5, 0.5]).unwrap();
        assert_eq!(s.f_value, 0.5);
    }

    #[test]
    fn extreme_point_subgradient() {
        let s = potential(&[2.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((s.f_value - 1.5).abs() < 1e-15);
        assert_eq!(s.subgrad, vec![1.5, -0.5]);
        assert_eq!(s.maximizer, 0);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        assert!(potential(&[1.0, 1.0], &[1.0]).is_err());
    }

    #[test]
    fn unnormalized_shares_rejected() {
        assert!(potential(&[1.0, 1.0], &[0.5, 0.4]).is_err());
    }

    // Quadratic growth: ρ_min ‖b−1‖² ≤ 2 f(b) for nonnegative bids.
    #[test]
    fn quadratic_growth_on_random_grid() {
        use crate::rng::SplitMix64;
        let mut rng = SplitMix64::new(2024);
        for &n in &[2usize, 3, 5] {
            let mut rho: Vec<f64> = (0..n).map(|_| rng.uniform(0.1, 1.0)).collect();
            let sum: f64 = rho.iter().sum();
            for r in &mut rho {
                *r /= sum;
            }
            // force exact normalization for the precondition
            let correction: f64 = 1.0 - rho.iter().sum::<f64>();
            rho[0] += correction;
            let rho_min = rho.iter().cloned().fold(f64::INFINITY, f64::min);
            for _ in 0..100_000 {
                let b: Vec<f64> = (0..n).map(|_| rng.uniform(0.0, 2.0)).collect();
                let s = potential(&b, &rho).unwrap();
                assert!(
                    rho_min * s.dist_one * s.dist_one <= 2.0 * s.f_value + 1e-9,
                    "quadratic growth failed at b={b:?} rho={rho:?}"
                );
            }
        }
    }

    // f is nonnegative with a unique minimum: tiny values pin b near 1.
    #[test]
    fn near_zero_potential_pins_bids_near_one() {
        use crate::rng::SplitMix64;
        let mut rng = SplitMix64::new(77);
        let rho = [0.4, 0.6];
        for _ in 0..200_000 {
            let b = [rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0)];
            let s = potential(&b, &rho).unwrap();
            assert!(s.f_value >= -1e-15);
            if s.f_value <= 1e-12 {
                assert!(b.iter().all(|x| (x - 1.0).abs() <= 1e-5));
            }
        }
    }
}
