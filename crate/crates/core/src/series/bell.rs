//! Partial exponential Bell polynomials `B_{n,k}(s₁, s₂, …)`.
//!
//! Evaluated with the recurrence
//! `B_{n,k} = (1/k) Σ_{ℓ=k−1}^{n−1} C(n, ℓ) s_{n−ℓ} B_{ℓ,k−1}`,
//! `B_{0,0} = 1`, `B_{n,0} = 0` for `n ≥ 1`, filled in as a DP table.

use std::ops::{Add, Mul};

use super::dd::DoubleDouble;
use crate::error::{Error, Result};

/// Largest `n` accepted by the Bell-polynomial routes.
pub const MAX_BELL_ORDER: usize = 30;

pub(crate) trait BellScalar: Copy + Add<Output = Self> + Mul<Output = Self> {
    const ZERO: Self;
    const ONE: Self;
    fn scale(self, v: f64) -> Self;
    fn div_f64(self, v: f64) -> Self;
}

impl BellScalar for f64 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;
    fn scale(self, v: f64) -> Self {
        self * v
    }
    fn div_f64(self, v: f64) -> Self {
        self / v
    }
}

impl BellScalar for DoubleDouble {
    const ZERO: Self = DoubleDouble::ZERO;
    const ONE: Self = DoubleDouble::ONE;
    fn scale(self, v: f64) -> Self {
        DoubleDouble::scale(self, v)
    }
    fn div_f64(self, v: f64) -> Self {
        DoubleDouble::div_f64(self, v)
    }
}

/// Binomial coefficients up to `MAX_BELL_ORDER`; all exact in `f64`.
fn binomial_row(n: usize) -> Vec<f64> {
    let mut row = vec![1.0; n + 1];
    for k in 1..n {
        row[k] = row[k - 1] * (n + 1 - k) as f64 / k as f64;
    }
    row
}

/// All `B_{m,j}` for `0 ≤ j ≤ m ≤ order`.
pub(crate) struct BellTable<S> {
    order: usize,
    values: Vec<S>,
}

impl<S: BellScalar> BellTable<S> {
    /// `s[i]` holds `s_{i+1}`; at least `order` entries are needed.
    pub(crate) fn new(s: &[S], order: usize) -> Self {
        debug_assert!(s.len() >= order);
        let width = order + 1;
        let mut values = vec![S::ZERO; width * width];
        values[0] = S::ONE;
        let binomials: Vec<Vec<f64>> = (0..=order).map(binomial_row).collect();
        for k in 1..=order {
            for n in k..=order {
                let mut acc = S::ZERO;
                for l in (k - 1)..n {
                    acc = acc + (s[n - l - 1] * values[l * width + k - 1]).scale(binomials[n][l]);
                }
                values[n * width + k] = acc.div_f64(k as f64);
            }
        }
        Self { order, values }
    }

    pub(crate) fn get(&self, n: usize, k: usize) -> S {
        debug_assert!(n <= self.order && k <= self.order);
        self.values[n * (self.order + 1) + k]
    }
}

/// `B_{n,k}(s₁, …, s_{n−k+1})` in double precision.
///
/// `s[0]` is `s₁`. Requires `1 ≤ k ≤ n ≤ 30` and `s.len() ≥ n − k + 1`.
pub fn bell_polynomial(n: usize, k: usize, s: &[f64]) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!(
            "B_{{n,k}} needs 1 ≤ k ≤ n, got n = {n}, k = {k}"
        )));
    }
    if n > MAX_BELL_ORDER {
        return Err(Error::Range {
            what: "Bell polynomial order",
            value: n,
            max: MAX_BELL_ORDER,
        });
    }
    let needed = n - k + 1;
    if s.len() < needed {
        return Err(Error::Dimension {
            expected: needed,
            actual: s.len(),
        });
    }
    // Entries past s_{n−k+1} never enter B_{n,k}; pad so the table is full.
    let mut padded = s[..needed].to_vec();
    padded.resize(n, 0.0);
    Ok(BellTable::new(&padded, n).get(n, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_column_is_the_sequence() {
        let s: Vec<f64> = (1..=30).map(|i| 1.0 / i as f64 + 0.3).collect();
        for n in 1..=30 {
            assert_eq!(bell_polynomial(n, 1, &s).unwrap(), s[n - 1]);
        }
    }

    #[test]
    fn diagonal_is_power_of_first_entry() {
        let s = [1.3, 0.7, -2.0, 5.0, 0.1, 0.2, 0.3, 0.4];
        for n in 1..=8 {
            let b = bell_polynomial(n, n, &s).unwrap();
            assert!((b - 1.3f64.powi(n as i32)).abs() < 1e-12 * b.abs());
        }
    }

    #[test]
    fn b32_counts_three_partitions() {
        let (s1, s2) = (0.7, -1.9);
        let b = bell_polynomial(3, 2, &[s1, s2]).unwrap();
        assert!((b - 3.0 * s1 * s2).abs() < 1e-15);
    }

    #[test]
    fn all_ones_gives_stirling_numbers() {
        // S(6, k) for k = 1..6.
        let stirling = [1.0, 31.0, 90.0, 65.0, 15.0, 1.0];
        let ones = [1.0; 6];
        for (k, want) in stirling.iter().enumerate() {
            assert_eq!(bell_polynomial(6, k + 1, &ones).unwrap(), *want);
        }
    }

    #[test]
    fn argument_errors() {
        let s = [1.0; 40];
        assert!(matches!(bell_polynomial(3, 0, &s), Err(Error::Domain(_))));
        assert!(matches!(bell_polynomial(3, 4, &s), Err(Error::Domain(_))));
        assert!(matches!(bell_polynomial(31, 2, &s), Err(Error::Range { .. })));
        assert!(matches!(bell_polynomial(5, 2, &s[..2]), Err(Error::Dimension { .. })));
    }
}
