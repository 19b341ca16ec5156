//! Shared fixtures for the criterion benches.

use decaysum::DecayFunction;

/// Constant, `n^{-1}`, `n^{-3}` and `1.5^{-(n-1)}` decay.
pub fn decay_grid() -> Vec<DecayFunction> {
    vec![
        DecayFunction::Constant,
        DecayFunction::Polynomial { c: 1 },
        DecayFunction::Polynomial { c: 3 },
        DecayFunction::Exponential { alpha: 1.5 },
    ]
}

/// Deterministic stream in `[-1, 1]`.
pub fn stream(len: usize) -> Vec<f64> {
    (0..len).map(|i| ((i * 7919) % 2001) as f64 / 1000.0 - 1.0).collect()
}
