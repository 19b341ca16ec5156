//! Small numeric helpers shared across modules.

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::new();
    acc.extend(values);
    acc.value()
}

/// Σ vᵢ², compensated.
pub fn sum_of_squares(values: &[f64]) -> f64 {
    compensated_sum(values.iter().map(|v| v * v))
}

/// SplitMix64 finalizer, used to derive independent per-trial seeds.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for `(master, index)`; distinct streams get distinct `salt`s.
pub fn derive_seed(master: u64, index: u64, salt: u64) -> u64 {
    splitmix64(splitmix64(master ^ salt.rotate_left(17)).wrapping_add(index))
}

/// Format with 17 significant digits, the shortest width that round-trips every `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensation_recovers_small_terms() {
        let mut values = vec![1.0];
        values.extend(std::iter::repeat_n(1e-16, 10_000));
        let naive: f64 = values.iter().sum();
        assert_eq!(naive, 1.0);
        assert!((compensated_sum(values) - (1.0 + 1e-12)).abs() < 1e-18);
    }

    #[test]
    fn seeds_differ_by_index_and_salt() {
        assert_ne!(derive_seed(7, 0, 1), derive_seed(7, 1, 1));
        assert_ne!(derive_seed(7, 0, 1), derive_seed(7, 0, 2));
        assert_eq!(derive_seed(7, 3, 1), derive_seed(7, 3, 1));
    }

    #[test]
    fn formatted_values_round_trip() {
        for v in [0.1, 1.0 / 3.0, 9.689_6e-300, -2.5, 0.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }
}
