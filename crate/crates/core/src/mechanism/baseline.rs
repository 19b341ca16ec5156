use super::{check_input, draw_noise, MechanismKind, PrivacyParams, StreamingMechanism};
use crate::bounds::gaussian_sensitivity;
use crate::decay::DecayFunction;
use crate::error::{Error, Result};

/// Exact decaying sum plus independent `N(0, (σ_{ε,δ} Δ L_CDS)²)` noise at
/// every step, where `L_CDS = √(Σ_{n≤T} f(n)²)` is the ℓ₂-sensitivity of the
/// whole output vector.
#[derive(Debug, Clone)]
pub struct GaussianBaseline {
    weights: Vec<f64>,
    privacy: PrivacyParams,
    sensitivity: f64,
    noise: Vec<f64>,
    inputs: Vec<f64>,
    clip_events: usize,
}

impl GaussianBaseline {
    pub fn new(f: &DecayFunction, horizon: usize, privacy: PrivacyParams, seed: u64) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::EmptyInput);
        }
        let sensitivity = gaussian_sensitivity(f, horizon);
        let std = privacy.effective_multiplier() * privacy.clip_bound() * sensitivity;
        Ok(Self {
            weights: f.weights(horizon),
            privacy,
            sensitivity,
            noise: draw_noise(seed, horizon, std),
            inputs: Vec::with_capacity(horizon),
            clip_events: 0,
        })
    }

    pub fn noise_std(&self) -> f64 {
        self.privacy.effective_multiplier() * self.privacy.clip_bound() * self.sensitivity
    }
}

impl StreamingMechanism for GaussianBaseline {
    fn kind(&self) -> MechanismKind {
        MechanismKind::GaussianBaseline
    }

    fn step(&mut self, x: f64) -> Result<f64> {
        let t = self.inputs.len();
        check_input(t, self.weights.len(), x)?;
        let (x, clipped) = self.privacy.clamp(x);
        self.clip_events += usize::from(clipped);
        self.inputs.push(x);
        let exact: f64 = (0..=t).map(|i| self.weights[t - i] * self.inputs[i]).sum();
        Ok(exact + self.noise[t])
    }

    fn horizon(&self) -> usize {
        self.weights.len()
    }

    fn time(&self) -> usize {
        self.inputs.len()
    }

    fn clip_events(&self) -> usize {
        self.clip_events
    }

    fn output_noise_variance(&self, _t: usize) -> f64 {
        self.noise_std().powi(2)
    }
}
