//! Streaming `(ε, δ)`-DP mechanisms for continual decaying sums.
//!
//! All mechanisms pre-draw their Gaussian noise at construction from a
//! ChaCha20 stream seeded with the caller's 64-bit seed, so a transcript
//! depends only on `(seed, inputs)`.

mod baseline;
mod factorization;
mod window;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::function::erf::erfc;

pub use baseline::GaussianBaseline;
pub use factorization::FactorizationMechanism;
pub use window::SlidingWindowMechanism;

use crate::decay::DecayFunction;
use crate::error::{Error, Result};

/// How `σ_{ε,δ}` is derived from `(ε, δ)` for unit sensitivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SigmaConvention {
    /// `2 √(2 ln(1.25/δ)) / ε`.
    #[default]
    MainText,
    /// `2 √(ln(1.25/δ)) / ε`.
    Appendix,
    /// Smallest σ satisfying the exact Gaussian-mechanism privacy profile
    /// (analytic Gaussian mechanism calibration).
    Analytic,
}

impl SigmaConvention {
    pub fn multiplier(self, epsilon: f64, delta: f64) -> f64 {
        match self {
            Self::MainText => 2.0 * (2.0 * (1.25 / delta).ln()).sqrt() / epsilon,
            Self::Appendix => 2.0 * (1.25 / delta).ln().sqrt() / epsilon,
            Self::Analytic => analytic_sigma(epsilon, delta),
        }
    }
}

impl fmt::Display for SigmaConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::MainText => "main-text",
            Self::Appendix => "appendix",
            Self::Analytic => "analytic",
        })
    }
}

impl FromStr for SigmaConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "main-text" | "main" => Ok(Self::MainText),
            "appendix" => Ok(Self::Appendix),
            "analytic" => Ok(Self::Analytic),
            other => Err(Error::Config(format!("unknown sigma convention `{other}`"))),
        }
    }
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// δ achieved by N(0, σ²) noise on a sensitivity-1 query at privacy level ε.
fn gaussian_privacy_profile(sigma: f64, epsilon: f64) -> f64 {
    let a = 1.0 / (2.0 * sigma);
    let b = epsilon * sigma;
    std_normal_cdf(a - b) - epsilon.exp() * std_normal_cdf(-a - b)
}

fn analytic_sigma(epsilon: f64, delta: f64) -> f64 {
    // The profile is decreasing in σ; bisect on log σ.
    let (mut lo, mut hi) = (1e-8f64.ln(), 1e8f64.ln());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gaussian_privacy_profile(mid.exp(), epsilon) > delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi.exp()
}

/// Privacy parameters `(ε, δ)`, the per-element clip bound `Δ`, and the σ convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyParams {
    epsilon: f64,
    delta: f64,
    clip_bound: f64,
    convention: SigmaConvention,
    noiseless: bool,
}

impl PrivacyParams {
    pub fn new(epsilon: f64, delta: f64, clip_bound: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Privacy(format!("ε must lie in (0, 1], got {epsilon}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Privacy(format!("δ must lie in (0, 1), got {delta}")));
        }
        if !(clip_bound > 0.0 && clip_bound.is_finite()) {
            return Err(Error::Privacy(format!("Δ must be positive and finite, got {clip_bound}")));
        }
        Ok(Self {
            epsilon,
            delta,
            clip_bound,
            convention: SigmaConvention::default(),
            noiseless: false,
        })
    }

    pub fn with_convention(mut self, convention: SigmaConvention) -> Self {
        self.convention = convention;
        self
    }

    /// Disables all noise. The output is then the exact decaying sum and
    /// provides no privacy; meant for testing and debugging only.
    pub fn unsafe_no_privacy(mut self) -> Self {
        self.noiseless = true;
        self
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn clip_bound(&self) -> f64 {
        self.clip_bound
    }

    pub fn convention(&self) -> SigmaConvention {
        self.convention
    }

    pub fn is_noiseless(&self) -> bool {
        self.noiseless
    }

    /// `σ_{ε,δ}` under the configured convention, ignoring the noiseless flag.
    pub fn sigma_multiplier(&self) -> f64 {
        self.convention.multiplier(self.epsilon, self.delta)
    }

    /// `σ_{ε,δ}` actually applied: zero in noiseless mode.
    pub fn effective_multiplier(&self) -> f64 {
        if self.noiseless {
            0.0
        } else {
            self.sigma_multiplier()
        }
    }

    /// Clamps to `[−Δ, Δ]`; the flag reports whether clamping happened.
    pub fn clamp(&self, x: f64) -> (f64, bool) {
        let c = x.clamp(-self.clip_bound, self.clip_bound);
        (c, c != x)
    }
}

/// A single-owner online mechanism consuming one stream element per step.
pub trait StreamingMechanism: Send {
    fn kind(&self) -> MechanismKind;

    /// Consumes `x_t` (clamped to `[−Δ, Δ]`) and returns the private output for step `t`.
    fn step(&mut self, x: f64) -> Result<f64>;

    fn horizon(&self) -> usize;

    /// Number of elements consumed so far.
    fn time(&self) -> usize;

    fn clip_events(&self) -> usize;

    /// Variance of the output noise at 0-based step `t`.
    fn output_noise_variance(&self, t: usize) -> f64;

    fn run(&mut self, xs: &[f64]) -> Result<Vec<f64>> {
        xs.iter().map(|&x| self.step(x)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MechanismKind {
    Factorization,
    SlidingWindow,
    GaussianBaseline,
}

impl MechanismKind {
    /// The square-root factorization mechanism suited to `f`.
    pub fn for_decay(f: &DecayFunction) -> Self {
        if f.is_window() {
            Self::SlidingWindow
        } else {
            Self::Factorization
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Factorization => "factorization",
            Self::SlidingWindow => "window",
            Self::GaussianBaseline => "gaussian",
        }
    }
}

impl fmt::Display for MechanismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MechanismKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "factorization" => Ok(Self::Factorization),
            "window" | "sliding-window" => Ok(Self::SlidingWindow),
            "gaussian" | "gaussian-baseline" => Ok(Self::GaussianBaseline),
            other => Err(Error::Config(format!("unknown mechanism `{other}`"))),
        }
    }
}

pub fn build_mechanism(
    kind: MechanismKind,
    f: &DecayFunction,
    horizon: usize,
    privacy: PrivacyParams,
    seed: u64,
) -> Result<Box<dyn StreamingMechanism>> {
    Ok(match (kind, f) {
        (MechanismKind::Factorization, _) => {
            Box::new(FactorizationMechanism::new(f, horizon, privacy, seed)?)
        }
        (MechanismKind::SlidingWindow, DecayFunction::SlidingWindow { w }) => {
            Box::new(SlidingWindowMechanism::new(*w, horizon, privacy, seed)?)
        }
        (MechanismKind::SlidingWindow, other) => {
            return Err(Error::UnsupportedDecay(format!(
                "the window mechanism needs a sliding-window decay, got {other}"
            )))
        }
        (MechanismKind::GaussianBaseline, _) => {
            Box::new(GaussianBaseline::new(f, horizon, privacy, seed)?)
        }
    })
}

/// `len` i.i.d. N(0, std²) draws; all zeros without drawing when `std == 0`.
pub(crate) fn draw_noise(seed: u64, len: usize, std: f64) -> Vec<f64> {
    if std == 0.0 {
        return vec![0.0; len];
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z * std
        })
        .collect()
}

pub(crate) fn check_input(t: usize, horizon: usize, x: f64) -> Result<()> {
    if t >= horizon {
        return Err(Error::StreamExhausted(horizon));
    }
    if !x.is_finite() {
        return Err(Error::NonFiniteInput(t + 1));
    }
    Ok(())
}
