//! Coefficients of the square-root symbol.
//!
//! For a decay function with symbol `g(x) = Σ_{n≥0} f(n+1) xⁿ` we need the
//! power series `h(x) = Σ aₙ xⁿ` with `h(x)² = g(x)`. The coefficients of `h`
//! are the first column of a lower-triangular Toeplitz `L` with `L·L = M_f`.
//!
//! Three routes are provided:
//! * [`sqrt_series`]: coefficient matching, `O(T²)`, the production path;
//! * [`closed_form_coeff`]: Faà di Bruno / Bell-polynomial closed form, small `n` only;
//! * [`exponential_coeff`]: the analytic form for exponential decay.

mod bell;
mod dd;

pub use bell::{bell_polynomial, MAX_BELL_ORDER};

use bell::BellTable;
use dd::DoubleDouble;

use crate::decay::DecayFunction;
use crate::error::{Error, Result};

/// Symbol coefficients `g₀, …, g_{T−1}` with `gₙ = f(n + 1)` and `g₀ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesInput {
    g: Vec<f64>,
}

impl SeriesInput {
    pub fn new(g: Vec<f64>) -> Result<Self> {
        match g.first() {
            None => Err(Error::EmptyInput),
            Some(&g0) if g0 != 1.0 => Err(Error::NotNormalized(g0)),
            Some(_) => Ok(Self { g }),
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.g
    }

    pub fn horizon(&self) -> usize {
        self.g.len()
    }
}

/// Coefficients `a₀, …, a_{T−1}` of `√g`, with `a₀ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SqrtSeries {
    coeffs: Vec<f64>,
}

impl SqrtSeries {
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn horizon(&self) -> usize {
        self.coeffs.len()
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Convolution square `Σ_{k≤n} a_k a_{n−k}` for every `n < T`.
    pub fn square(&self) -> Vec<f64> {
        let a = &self.coeffs;
        (0..a.len())
            .map(|n| (0..=n).map(|k| a[k] * a[n - k]).sum())
            .collect()
    }
}

/// Solves `h² = g` term by term: `a₀ = 1`, `aₙ = (gₙ − Σ_{k=1}^{n−1} a_k a_{n−k}) / 2`.
pub fn sqrt_series(input: &SeriesInput) -> SqrtSeries {
    let g = input.coeffs();
    let mut a = Vec::with_capacity(g.len());
    a.push(1.0);
    for n in 1..g.len() {
        // The cross terms are symmetric in k ↔ n − k.
        let mut cross = 0.0;
        for k in 1..=(n - 1) / 2 {
            cross += a[k] * a[n - k];
        }
        cross *= 2.0;
        if n % 2 == 0 {
            cross += a[n / 2] * a[n / 2];
        }
        a.push((g[n] - cross) / 2.0);
    }
    SqrtSeries { coeffs: a }
}

/// `sqrt_series` applied to the first `horizon` symbol coefficients of `f`.
pub fn sqrt_series_for(f: &DecayFunction, horizon: usize) -> Result<SqrtSeries> {
    Ok(sqrt_series(&f.series_input(horizon)?))
}

/// `aₙ = (1/n!) Σ_{k=1}^{n} B_{n,k}(1!·f(2), 2!·f(3), …) · ∏_{m=0}^{k−1} (1/2 − m)`.
///
/// The alternating sum cancels heavily (terms reach ~10⁷ × the result at
/// `n = 30`), so the table and the sum are carried in double-double.
pub fn closed_form_coeff(f: &DecayFunction, n: usize) -> Result<f64> {
    if n > MAX_BELL_ORDER {
        return Err(Error::Range {
            what: "closed-form coefficient index",
            value: n,
            max: MAX_BELL_ORDER,
        });
    }
    if n == 0 {
        return Ok(1.0);
    }
    let mut factorial = DoubleDouble::ONE;
    let s: Vec<DoubleDouble> = (1..=n)
        .map(|j| {
            factorial = factorial.scale(j as f64);
            factorial * DoubleDouble::from_f64(f.value(j + 1))
        })
        .collect();
    let table = BellTable::new(&s, n);
    let mut falling = DoubleDouble::ONE;
    let mut total = DoubleDouble::ZERO;
    for k in 1..=n {
        falling = falling.scale(0.5 - (k - 1) as f64);
        total = total + table.get(n, k) * falling;
    }
    for j in 1..=n {
        total = total.div_f64(j as f64);
    }
    Ok(total.to_f64())
}

/// `aₙ = α^{−n} |C(−1/2, n)|` for `f(n) = α^{−(n−1)}`, as the running product
/// `∏_{j=1}^{n} (2j − 1) / (2jα)`.
pub fn exponential_coeff(alpha: f64, n: usize) -> Result<f64> {
    if !(alpha.is_finite() && alpha >= 1.0) {
        return Err(Error::Domain(format!("exponential coefficients need α ≥ 1, got {alpha}")));
    }
    let mut a = 1.0;
    for j in 1..=n {
        a *= (2 * j - 1) as f64 / (2 * j) as f64 / alpha;
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(g: &[f64]) -> Vec<f64> {
        sqrt_series(&SeriesInput::new(g.to_vec()).unwrap()).into_coeffs()
    }

    /// Independent check: square the candidate series by brute force.
    fn assert_squares_to(a: &[f64], g: &[f64], tol: f64) {
        for n in 0..g.len() {
            let sq: f64 = (0..=n).map(|k| a[k] * a[n - k]).sum();
            assert!((sq - g[n]).abs() <= tol * g[n].abs().max(1e-300), "n = {n}: {sq} vs {}", g[n]);
        }
    }

    #[test]
    fn identity_symbol() {
        assert_eq!(series(&[1.0, 0.0, 0.0, 0.0]), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn all_ones_matches_central_binomials() {
        let a = series(&[1.0; 4]);
        assert_eq!(a, [1.0, 0.5, 0.375, 0.3125]);
        assert_squares_to(&a, &[1.0; 4], 0.0);
    }

    #[test]
    fn harmonic_decay_first_terms() {
        let g = [1.0, 0.5, 1.0 / 3.0, 0.25];
        let a = series(&g);
        assert_eq!(a[1], 0.25);
        // a₂ = (1/3 − 1/16)/2, a₃ = (1/4 − 2·a₁·a₂)/2
        let a2 = (1.0 / 3.0 - 1.0 / 16.0) / 2.0;
        assert!((a[2] - a2).abs() < 1e-16);
        assert!((a[3] - (0.25 - 2.0 * 0.25 * a2) / 2.0).abs() < 1e-16);
        for n in 1..4 {
            assert!(2.0 * a[n] <= g[n]);
        }
    }

    #[test]
    fn input_validation() {
        assert_eq!(SeriesInput::new(vec![]), Err(Error::EmptyInput));
        assert_eq!(SeriesInput::new(vec![0.5, 0.1]), Err(Error::NotNormalized(0.5)));
        assert_eq!(series(&[1.0]), [1.0]);
    }

    #[test]
    fn non_family_symbols_may_go_negative() {
        // g = 1 + 0·x + 0·x² + … with a late bump: not in the positive family.
        let a = series(&[1.0, 1.0, 0.0, 0.0]);
        assert!(a.iter().any(|v| *v < 0.0));
        assert_squares_to(&a, &[1.0, 1.0, 0.0, 0.0], 1e-15);
    }

    #[test]
    fn closed_form_small_cases() {
        let one = DecayFunction::Constant;
        assert!((closed_form_coeff(&one, 1).unwrap() - 0.5).abs() < 1e-16);
        let inv_sq = DecayFunction::polynomial(2).unwrap();
        assert_eq!(closed_form_coeff(&inv_sq, 1).unwrap(), 0.125);
        let inv = DecayFunction::polynomial(1).unwrap();
        let exact = series(&inv.weights(3))[2];
        let closed = closed_form_coeff(&inv, 2).unwrap();
        assert!((closed - exact).abs() <= 1e-9 * exact);
        assert_eq!(closed_form_coeff(&inv, 0).unwrap(), 1.0);
        assert!(matches!(closed_form_coeff(&inv, 31), Err(Error::Range { .. })));
    }

    #[test]
    fn exponential_small_cases() {
        assert_eq!(exponential_coeff(1.0, 2).unwrap(), 0.375);
        assert_eq!(exponential_coeff(3.7, 0).unwrap(), 1.0);
        assert_eq!(exponential_coeff(2.0, 1).unwrap(), 0.25);
        assert!(exponential_coeff(0.99, 3).is_err());
        let a = series(&DecayFunction::exponential(2.0).unwrap().weights(4));
        assert_eq!(a[1], 0.25);
    }

    #[test]
    fn exponential_coefficients_obey_the_wallis_bound() {
        for alpha in [1.0, 1.25, 2.0] {
            for n in 1..=4096 {
                let a = exponential_coeff(alpha, n).unwrap();
                let bound = alpha.powi(-(n as i32)) / (std::f64::consts::PI * n as f64).sqrt();
                if bound < f64::MIN_POSITIVE {
                    break;
                }
                assert!(a <= bound, "α = {alpha}, n = {n}");
            }
        }
    }

    #[test]
    fn large_orders_do_not_overflow() {
        let a = exponential_coeff(1.0, 100_000).unwrap();
        assert!(a > 0.0 && a.is_finite());
    }
}
