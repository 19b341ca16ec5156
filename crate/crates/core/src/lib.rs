//! Differentially private continual decaying sums.
//!
//! Given a stream `x₁, x₂, …` and a non-increasing decay function `f` with
//! `f(1) = 1`, the goal is to release `Σ_{i≤t} x_i f(t − i + 1)` at every step
//! under `(ε, δ)`-differential privacy. The decaying-sum matrix `M_f` is
//! lower-triangular Toeplitz; its square root `L` (with `L·L = M_f`) is again
//! lower-triangular Toeplitz, with first column given by the power-series
//! square root of the symbol `Σ f(n+1) xⁿ`. The factorization mechanism
//! releases `L(Lx + b)` for Gaussian `b`.
//!
//! Module map:
//! * [`series`]: square-root coefficients (recurrence, Bell closed form, exponential form);
//! * [`decay`] and [`bounds`]: decay functions and γ₂ / γ_F bounds;
//! * [`toeplitz`]: factors, mat-vecs and the sliding-window block factor;
//! * [`mechanism`]: streaming mechanisms;
//! * [`evaluation`]: oracles, Monte Carlo error reports and comparison tables.

pub mod bounds;
pub mod decay;
pub mod error;
pub mod evaluation;
pub mod mechanism;
pub mod numeric;
pub mod series;
pub mod toeplitz;

pub use bounds::NormBounds;
pub use decay::DecayFunction;
pub use error::{Error, Result};
pub use evaluation::{ErrorReport, ExperimentConfig, StreamDistribution};
pub use mechanism::{
    build_mechanism, FactorizationMechanism, GaussianBaseline, MechanismKind, PrivacyParams,
    SigmaConvention, SlidingWindowMechanism, StreamingMechanism,
};
pub use series::{SeriesInput, SqrtSeries};
pub use toeplitz::{BlockFactor, ToeplitzFactor};
