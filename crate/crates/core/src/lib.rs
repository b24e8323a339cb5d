//! Numerical model of a two-stage atom-light SU(1,1) interferometer.
//!
//! Two stimulated Raman scattering stages act as two-mode squeezers between
//! an optical field and an atomic spin wave. Between them the light picks up
//! the probed phase and an optical loss `l`; the spin wave dephases at rate
//! `η`. The crate provides
//!
//! * [`analytic`]: large-seed closed forms for visibility, intensity- and
//!   homodyne-detection SNR, and the gain that restores the balance;
//! * [`moments`]: exact Gaussian moments via Bogoliubov vectors, plus a
//!   truncated Fock-space oracle for small gains;
//! * [`optimizer`]: gain optimization, the visibility/SNR coincidence
//!   check and parameter sweeps;
//! * [`verify`]: the cross-check suite tying the three paths together.
//!
//! Everything except the Fock oracle is generic over [`Scalar`]; the aliases
//! below fix the scalar to `f64` (or `f32` with an `F32` suffix).

pub mod analytic;
pub mod error;
pub mod model;
pub mod moments;
pub mod optimizer;
pub mod outcome;
pub mod scalar;
pub mod search;
pub mod verify;

pub use analytic::{DetectionScheme, G2Solution, GainBounds, NoiseTerms};
pub use error::{SalhiError, ValidationReport, Violation};
pub use model::{
    validate_config, ConfigDraft, GainFactor, GainSpec, InterferometerConfig, LossParams, ProbeSettings, SeedKind, SeedSpec,
};
pub use moments::{MomentReport, ModeCoefficients, OutputChannel};
pub use optimizer::{Objective, Optimum};
pub use outcome::{Outcome, Status};
pub use scalar::Scalar;

pub type Config = InterferometerConfig<f64>;
pub type Gain = GainFactor<f64>;
pub type Losses = LossParams<f64>;
pub type Seed = SeedSpec<f64>;
pub type Probe = ProbeSettings<f64>;
pub type Bounds = GainBounds<f64>;
pub type Moments = MomentReport<f64>;
pub type Value = Outcome<f64>;

pub type ConfigF32 = InterferometerConfig<f32>;
pub type GainF32 = GainFactor<f32>;
pub type LossesF32 = LossParams<f32>;
pub type SeedF32 = SeedSpec<f32>;
pub type ProbeF32 = ProbeSettings<f32>;
pub type BoundsF32 = GainBounds<f32>;
pub type MomentsF32 = MomentReport<f32>;
pub type ValueF32 = Outcome<f32>;
