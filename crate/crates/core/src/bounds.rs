//! γ₂ / γ_F bounds for `M_f`, their closed forms, and the quantities they are
//! compared against (earlier γ₂ bounds, Gaussian-mechanism sensitivity, and
//! the sensitivity floor of the Bolot et al. polynomial-decay mechanism).

use std::f64::consts::PI;

use serde::Serialize;

use crate::decay::DecayFunction;
use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, sum_of_squares};
use crate::series::sqrt_series_for;

/// Generalized harmonic sum `H(T, p) = Σ_{n=1}^{T−1} n^{−p}`.
pub fn harmonic(horizon: usize, p: f64) -> f64 {
    // Smallest terms first.
    compensated_sum((1..horizon).rev().map(|n| (n as f64).powf(-p)))
}

/// `S(T, 2α) = Σ_{n=1}^{T−1} 1 / (n α^{2n})`.
pub fn exp_harmonic(horizon: usize, alpha: f64) -> f64 {
    let ratio = 1.0 / (alpha * alpha);
    let mut power = 1.0;
    let terms: Vec<f64> = (1..horizon)
        .map(|n| {
            power *= ratio;
            power / n as f64
        })
        .collect();
    compensated_sum(terms.into_iter().rev())
}

/// `ζ(2c)`. Closed forms for `c ≤ 5`, partial sums beyond.
pub fn zeta_even(c: u32) -> f64 {
    match c {
        1 => PI.powi(2) / 6.0,
        2 => PI.powi(4) / 90.0,
        3 => PI.powi(6) / 945.0,
        4 => PI.powi(8) / 9450.0,
        5 => PI.powi(10) / 93555.0,
        _ => {
            let p = 2.0 * c as f64;
            let mut terms = Vec::new();
            for n in 1.. {
                let term = (n as f64).powf(-p);
                terms.push(term);
                if term < 1e-15 {
                    break;
                }
            }
            compensated_sum(terms.into_iter().rev())
        }
    }
}

/// Geometric relaxation of `S(T, 2α)` for `α > 1`:
/// `α²/(α²−1)² − α² / (T (α²−1) α^{2T})`.
pub fn exp_harmonic_geometric_bound(horizon: usize, alpha: f64) -> Result<f64> {
    if alpha.is_nan() || alpha <= 1.0 {
        return Err(Error::Domain(format!("geometric bound needs α > 1, got {alpha}")));
    }
    let a2 = alpha * alpha;
    let t = horizon as f64;
    Ok(a2 / (a2 - 1.0).powi(2) - a2 / (t * (a2 - 1.0) * a2.powf(t)))
}

fn reject_window(f: &DecayFunction) -> Result<()> {
    if f.is_window() {
        Err(Error::UnsupportedDecay(format!(
            "{f}: sliding windows use the block factorization"
        )))
    } else {
        Ok(())
    }
}

/// `2 / √(4 − f(2)²)`.
pub fn gamma2_lower_bound(f: &DecayFunction) -> Result<f64> {
    reject_window(f)?;
    let f2 = f.value(2);
    if f2.abs() >= 2.0 {
        return Err(Error::Domain(format!("lower bound needs |f(2)| < 2, got {f2}")));
    }
    Ok(2.0 / (4.0 - f2 * f2).sqrt())
}

/// `1 + Σ_{n=1}^{T−1} aₙ²`, i.e. `‖L‖²_{1→2}` for the square-root factor.
pub fn gamma2_upper_bound(f: &DecayFunction, horizon: usize) -> Result<f64> {
    reject_window(f)?;
    let series = sqrt_series_for(f, horizon)?;
    Ok(sum_of_squares(series.coeffs()))
}

/// `gamma2_upper_bound(f, T)` for every `T = 1..=max_horizon` from one series.
pub fn gamma2_upper_profile(f: &DecayFunction, max_horizon: usize) -> Result<Vec<f64>> {
    reject_window(f)?;
    let series = sqrt_series_for(f, max_horizon)?;
    let coeffs = series.coeffs();
    Ok((1..=max_horizon).map(|t| sum_of_squares(&coeffs[..t])).collect())
}

/// Family-specific closed-form γ₂ upper bound.
///
/// * polynomial `n^{−c}`: `1 + Σ_{n=2}^{T} n^{−2c} / 4 = 1 + (H(T+1, 2c) − 1)/4`;
/// * exponential (constant is `α = 1`): `1 + S(T, 2α)/π`.
pub fn closed_form_upper(f: &DecayFunction, horizon: usize) -> Result<f64> {
    match f {
        DecayFunction::Polynomial { c } => {
            Ok(1.0 + (harmonic(horizon + 1, 2.0 * *c as f64) - 1.0) / 4.0)
        }
        DecayFunction::Constant => Ok(1.0 + exp_harmonic(horizon, 1.0) / PI),
        DecayFunction::Exponential { alpha } => Ok(1.0 + exp_harmonic(horizon, *alpha) / PI),
        other => Err(Error::UnsupportedDecay(format!("no closed form for {other}"))),
    }
}

/// `1 + 1/(4(2c−1)) − (T+1)^{1−2c} / (4(2c−1))`, the integral relaxation for `n^{−c}`.
pub fn polynomial_asymptotic_upper(c: u32, horizon: usize) -> f64 {
    let d = 4.0 * (2.0 * c as f64 - 1.0);
    1.0 + 1.0 / d - (horizon as f64 + 1.0).powf(1.0 - 2.0 * c as f64) / d
}

/// Earlier γ₂ bounds: `√(Σ_{n=1}^{T} n^{−c})` for polynomial decay and
/// `Σ_{n=0}^{T−1} α^{−2n}` for exponential decay (`T` for constant).
pub fn baseline_bounds(f: &DecayFunction, horizon: usize) -> Result<f64> {
    match f {
        DecayFunction::Polynomial { c } => Ok(harmonic(horizon + 1, *c as f64).sqrt()),
        DecayFunction::Constant => Ok(horizon as f64),
        DecayFunction::Exponential { alpha } => Ok(geometric_weight_sum(*alpha, horizon)),
        other => Err(Error::UnsupportedDecay(format!("no baseline bound for {other}"))),
    }
}

/// `Σ_{n=0}^{T−1} α^{−2n}`.
fn geometric_weight_sum(alpha: f64, horizon: usize) -> f64 {
    let ratio = 1.0 / (alpha * alpha);
    let mut power = 1.0;
    compensated_sum((0..horizon).map(|_| {
        let v = power;
        power *= ratio;
        v
    }))
}

/// Squared-γ_F comparison for exponential decay: returns
/// `((1 + S(T,2α)/π)², Σ_{n=0}^{T−1} α^{−2n})`; the first must be smaller.
pub fn exponential_gamma_f_comparison(alpha: f64, horizon: usize) -> Result<(f64, f64)> {
    if !(alpha.is_finite() && alpha >= 1.0) {
        return Err(Error::Domain(format!("α must be ≥ 1, got {alpha}")));
    }
    let ours = 1.0 + exp_harmonic(horizon, alpha) / PI;
    Ok((ours * ours, geometric_weight_sum(alpha, horizon)))
}

/// ℓ₂-sensitivity of the decaying-sum map, `√(Σ_{n=1}^{T} f(n)²)`.
pub fn gaussian_sensitivity(f: &DecayFunction, horizon: usize) -> f64 {
    sum_of_squares(&f.weights(horizon)).sqrt()
}

/// `1 + 1/c`, a strict lower bound on the Bolot et al. sensitivity for `n^{−c}`.
pub fn bolot_sensitivity_floor(c: u32) -> f64 {
    1.0 + 1.0 / c as f64
}

/// γ₂ / γ_F bounds for `M_f` at horizon `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormBounds {
    pub gamma2_lower: f64,
    pub gamma2_upper: f64,
    pub gamma_f_upper: f64,
    pub horizon: usize,
    pub baseline_gamma2: Option<f64>,
}

impl NormBounds {
    /// The lower bound needs a 2 × 2 submatrix; at `T = 1` everything is 1.
    pub fn compute(f: &DecayFunction, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::EmptyInput);
        }
        let gamma2_upper = gamma2_upper_bound(f, horizon)?;
        let gamma2_lower = if horizon >= 2 { gamma2_lower_bound(f)? } else { 1.0 };
        let baseline_gamma2 = match f {
            DecayFunction::Polynomial { .. }
            | DecayFunction::Exponential { .. }
            | DecayFunction::Constant => Some(baseline_bounds(f, horizon)?),
            _ => None,
        };
        Ok(Self {
            gamma2_lower,
            gamma2_upper,
            gamma_f_upper: (horizon as f64).sqrt() * gamma2_upper,
            horizon,
            baseline_gamma2,
        })
    }
}
