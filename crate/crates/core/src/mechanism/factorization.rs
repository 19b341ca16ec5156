use super::{check_input, draw_noise, MechanismKind, PrivacyParams, StreamingMechanism};
use crate::decay::DecayFunction;
use crate::error::Result;
use crate::toeplitz::{build_factor, ToeplitzFactor};

/// Square-root factorization mechanism: outputs `L(Lx + b)` one coordinate
/// at a time, with `b` i.i.d. `N(0, (σ_{ε,δ} Δ ‖L‖_{1→2})²)`.
///
/// The correlated noise `z = L·b` has covariance `σ² L Lᵀ`. Each step costs
/// `O(t)`; the state holds the clamped prefix, the running `Lx + b` and `b`.
#[derive(Debug, Clone)]
pub struct FactorizationMechanism {
    factor: ToeplitzFactor,
    privacy: PrivacyParams,
    seed: u64,
    base_noise: Vec<f64>,
    inputs: Vec<f64>,
    inner: Vec<f64>,
    clip_events: usize,
}

impl FactorizationMechanism {
    pub fn new(f: &DecayFunction, horizon: usize, privacy: PrivacyParams, seed: u64) -> Result<Self> {
        let factor = build_factor(f, horizon)?;
        Ok(Self::with_factor(factor, privacy, seed))
    }

    pub fn with_factor(factor: ToeplitzFactor, privacy: PrivacyParams, seed: u64) -> Self {
        let std = privacy.effective_multiplier() * privacy.clip_bound() * factor.column_norm();
        let horizon = factor.horizon();
        Self {
            base_noise: draw_noise(seed, horizon, std),
            factor,
            privacy,
            seed,
            inputs: Vec::with_capacity(horizon),
            inner: Vec::with_capacity(horizon),
            clip_events: 0,
        }
    }

    pub fn factor(&self) -> &ToeplitzFactor {
        &self.factor
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn base_noise(&self) -> &[f64] {
        &self.base_noise
    }

    /// Standard deviation of each base-noise coordinate `b[i]`.
    pub fn base_noise_std(&self) -> f64 {
        self.privacy.effective_multiplier() * self.privacy.clip_bound() * self.factor.column_norm()
    }
}

impl StreamingMechanism for FactorizationMechanism {
    fn kind(&self) -> MechanismKind {
        MechanismKind::Factorization
    }

    fn step(&mut self, x: f64) -> Result<f64> {
        let t = self.inputs.len();
        check_input(t, self.factor.horizon(), x)?;
        let (x, clipped) = self.privacy.clamp(x);
        self.clip_events += usize::from(clipped);
        self.inputs.push(x);
        let v = self.factor.row_dot(t, &self.inputs) + self.base_noise[t];
        self.inner.push(v);
        Ok(self.factor.row_dot(t, &self.inner))
    }

    fn horizon(&self) -> usize {
        self.factor.horizon()
    }

    fn time(&self) -> usize {
        self.inputs.len()
    }

    fn clip_events(&self) -> usize {
        self.clip_events
    }

    fn output_noise_variance(&self, t: usize) -> f64 {
        let r = &self.factor.first_column()[..=t];
        self.base_noise_std().powi(2) * r.iter().map(|v| v * v).sum::<f64>()
    }
}
