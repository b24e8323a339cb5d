//! Exact Gaussian moment engine.
//!
//! Each output mode is carried as a Bogoliubov vector over the four input
//! modes: the optical seed port `â₀`, the atomic port `Ŝ₀`, and the vacuum
//! modes `v̂`, `F̂` that the optical loss and atomic dephasing couple in. All
//! inputs are vacuum apart from a coherent amplitude on the seeded port, so
//! photon-number and quadrature moments follow from Wick's theorem without
//! any large-seed approximation.

pub mod fock;

use num_complex::Complex;
use serde::Serialize;

use crate::analytic::DetectionScheme;
use crate::model::{InterferometerConfig, SeedKind, SeedSpec};
use crate::outcome::{Outcome, Status};
use crate::scalar::Scalar;
use crate::search;

pub use fock::{fock_oracle, FockOptions};

/// Input modes, in the order used by [`ModeCoefficients`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InputMode {
    /// Optical seed port `â₀`.
    Optical = 0,
    /// Atomic spin-wave port `Ŝ₀`.
    Atomic = 1,
    /// Vacuum admitted by the optical loss, `v̂`.
    OpticalLoss = 2,
    /// Vacuum admitted by atomic dephasing, `F̂`.
    AtomicLoss = 3,
}

impl InputMode {
    pub const ALL: [InputMode; 4] = [
        InputMode::Optical,
        InputMode::Atomic,
        InputMode::OpticalLoss,
        InputMode::AtomicLoss,
    ];

    pub fn seeded(kind: SeedKind) -> Self {
        match kind {
            SeedKind::Optical => InputMode::Optical,
            SeedKind::Atomic => InputMode::Atomic,
        }
    }
}

/// Which interferometer output is observed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputChannel {
    /// Optical output `â₂`.
    Optical,
    /// Atomic output `Ŝ₂`.
    Atomic,
}

/// `b̂ = Σ_k (c_k â_k + d_k â_k†)` over the four input modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoefficients<T> {
    pub annihilation: [Complex<T>; 4],
    pub creation: [Complex<T>; 4],
}

impl<T: Scalar> ModeCoefficients<T> {
    fn zero() -> Self {
        Self {
            annihilation: [Complex::new(T::zero(), T::zero()); 4],
            creation: [Complex::new(T::zero(), T::zero()); 4],
        }
    }

    /// The bare input operator `â_k`.
    pub fn input(mode: InputMode) -> Self {
        let mut out = Self::zero();
        out.annihilation[mode as usize] = Complex::new(T::one(), T::zero());
        out
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        Self {
            annihilation: self.annihilation.map(|c| c * factor),
            creation: self.creation.map(|d| d * factor),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = *self;
        for k in 0..4 {
            out.annihilation[k] = out.annihilation[k] + other.annihilation[k];
            out.creation[k] = out.creation[k] + other.creation[k];
        }
        out
    }

    /// Hermitian conjugate: `(c, d) → (d*, c*)`.
    pub fn dagger(&self) -> Self {
        Self {
            annihilation: self.creation.map(|d| d.conj()),
            creation: self.annihilation.map(|c| c.conj()),
        }
    }

    /// `[b̂, b̂†] = Σ|c_k|² − Σ|d_k|²`; equals 1 for a bosonic mode.
    pub fn commutator(&self) -> T {
        let c: T = self.annihilation.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr());
        let d: T = self.creation.iter().fold(T::zero(), |acc, d| acc + d.norm_sqr());
        c - d
    }

    pub fn annihilation_of(&self, mode: InputMode) -> Complex<T> {
        self.annihilation[mode as usize]
    }

    pub fn creation_of(&self, mode: InputMode) -> Complex<T> {
        self.creation[mode as usize]
    }
}

fn real<T: Scalar>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Propagates the chosen output through stage 1, the lossy arms with phase
/// `phi` on the optical arm, and stage 2.
pub fn build_output_coefficients<T: Scalar>(
    cfg: &InterferometerConfig<T>,
    phi: T,
    channel: OutputChannel,
) -> ModeCoefficients<T> {
    let (big1, small1) = cfg.stage1.pair();
    let (big2, small2) = cfg.stage2.pair();
    let a0 = ModeCoefficients::input(InputMode::Optical);
    let s0 = ModeCoefficients::input(InputMode::Atomic);
    let v = ModeCoefficients::input(InputMode::OpticalLoss);
    let f = ModeCoefficients::input(InputMode::AtomicLoss);

    // Stage 1: two-mode squeezing of the optical and atomic ports.
    let a1 = a0.scaled(real(big1)).plus(&s0.dagger().scaled(real(small1)));
    let s1 = s0.scaled(real(big1)).plus(&a0.dagger().scaled(real(small1)));

    // Arms: phase and loss on the light, dephasing on the spin wave.
    let l = cfg.losses.l.max(T::zero()).min(T::one());
    let eta = cfg.losses.eta.max(T::zero()).min(T::one());
    let a1 = a1
        .scaled(Complex::from_polar(cfg.losses.optical_keep(), phi))
        .plus(&v.scaled(real(l.sqrt())));
    let s1 = s1
        .scaled(real(cfg.losses.atomic_keep()))
        .plus(&f.scaled(real(eta.sqrt())));

    // Stage 2: recombination.
    match channel {
        OutputChannel::Optical => a1.scaled(real(big2)).plus(&s1.dagger().scaled(real(small2))),
        OutputChannel::Atomic => s1.scaled(real(big2)).plus(&a1.dagger().scaled(real(small2))),
    }
}

/// Photon-number and quadrature moments of one output mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentReport<T> {
    pub mean_intensity: T,
    pub intensity_variance: T,
    pub quadrature_mean: T,
    pub quadrature_variance: T,
}

/// Moments of `b̂` for a coherent seed and vacuum elsewhere.
///
/// With mean field `μ = c_s α + d_s α*` and fluctuation moments
/// `n = Σ|d_k|²`, `m = Σ c_k d_k`:
///
/// * `⟨N⟩ = |μ|² + n`
/// * `Var N = |μ|²(2n + 1) + 2 Re(μ*² m) + n(n + 1) + |m|²`
/// * `⟨X_θ⟩ = 2 Re(μ e^{−iθ})`, `Var X_θ = Σ |c_k e^{−iθ} + d_k* e^{iθ}|²`
///
/// where `X_θ = b̂ e^{−iθ} + b̂† e^{iθ}`.
pub fn compute_moments<T: Scalar>(mc: &ModeCoefficients<T>, seed: &SeedSpec<T>, lo_phase: T) -> MomentReport<T> {
    let mu = mean_field(mc, seed);
    let n = mc.creation.iter().fold(T::zero(), |acc, d| acc + d.norm_sqr());
    let m = mc
        .annihilation
        .iter()
        .zip(mc.creation.iter())
        .fold(Complex::new(T::zero(), T::zero()), |acc, (c, d)| acc + c * d);
    let two = T::lit(2.0);
    let mu2 = mu.norm_sqr();
    let mean_intensity = mu2 + n;
    let intensity_variance = mu2 * (two * n + T::one()) + two * (mu.conj() * mu.conj() * m).re + n * (n + T::one()) + m.norm_sqr();

    let lo = Complex::from_polar(T::one(), -lo_phase);
    let quadrature_mean = two * (mu * lo).re;
    let quadrature_variance = mc
        .annihilation
        .iter()
        .zip(mc.creation.iter())
        .fold(T::zero(), |acc, (c, d)| acc + (c * lo + d.conj() * lo.conj()).norm_sqr());

    MomentReport {
        mean_intensity,
        intensity_variance,
        quadrature_mean,
        quadrature_variance,
    }
}

/// `⟨b̂⟩` for the seeded coherent input.
pub fn mean_field<T: Scalar>(mc: &ModeCoefficients<T>, seed: &SeedSpec<T>) -> Complex<T> {
    let alpha = seed.alpha();
    let k = InputMode::seeded(seed.kind);
    mc.annihilation_of(k) * alpha + mc.creation_of(k) * alpha.conj()
}

fn mean_intensity_at<T: Scalar>(cfg: &InterferometerConfig<T>, phi: T, channel: OutputChannel) -> T {
    let mc = build_output_coefficients(cfg, phi, channel);
    compute_moments(&mc, &cfg.seed, T::zero()).mean_intensity
}

/// Grid points used for the coarse fringe scan.
pub const FRINGE_SCAN_POINTS: usize = 720;
/// Phase tolerance of the golden-section refinement of each fringe extremum.
pub const FRINGE_PHASE_TOL: f64 = 1e-10;

/// Fringe visibility `(I_max − I_min)/(I_max + I_min)` of the exact mean
/// intensity as `φ` is scanned over a full period.
pub fn exact_visibility<T: Scalar>(cfg: &InterferometerConfig<T>, channel: OutputChannel) -> Outcome<T> {
    let intensity = |phi: T| mean_intensity_at(cfg, phi, channel);
    let step = T::lit(2.0) * T::PI() / T::lit(FRINGE_SCAN_POINTS as f64);
    let phase = |i: usize| step * T::lit(i as f64);
    let samples: Vec<T> = (0..FRINGE_SCAN_POINTS).map(|i| intensity(phase(i))).collect();
    let (mut hi_i, mut lo_i) = (0, 0);
    for (i, &v) in samples.iter().enumerate() {
        if v > samples[hi_i] {
            hi_i = i;
        }
        if v < samples[lo_i] {
            lo_i = i;
        }
    }
    let tol = T::lit(FRINGE_PHASE_TOL);
    let around = |i: usize| (phase(i) - step, phase(i) + step);
    let (a, b) = around(hi_i);
    let (_, refined_max) = search::golden_max(intensity, a, b, tol);
    let (a, b) = around(lo_i);
    let (_, refined_min) = search::golden_min(intensity, a, b, tol);
    let i_max = refined_max.max(samples[hi_i]);
    let i_min = refined_min.min(samples[lo_i]);
    Outcome::ratio(i_max - i_min, i_max + i_min, Status::UndefinedFringe)
}

/// Default central-difference step for phase derivatives, radians.
pub const FD_STEP: f64 = 1e-5;
const VARIANCE_FLOOR: f64 = 1e-300;

/// `[(∂⟨Ô⟩/∂φ) δ]² / Var Ô` from the exact moments.
///
/// ID observes the photon number at the probe phase. BHD observes the
/// quadrature whose mean responds most strongly to `φ`, at the dark point
/// `φ = π`.
pub fn snr_numeric<T: Scalar>(cfg: &InterferometerConfig<T>, scheme: DetectionScheme, channel: OutputChannel) -> Outcome<T> {
    snr_numeric_with_step(cfg, scheme, channel, T::lit(FD_STEP))
}

pub fn snr_numeric_with_step<T: Scalar>(
    cfg: &InterferometerConfig<T>,
    scheme: DetectionScheme,
    channel: OutputChannel,
    h: T,
) -> Outcome<T> {
    let two = T::lit(2.0);
    let moments = |phi: T, lo: T| compute_moments(&build_output_coefficients(cfg, phi, channel), &cfg.seed, lo);
    let (slope, variance) = match scheme {
        DetectionScheme::Id => {
            let phi = cfg.probe.phi;
            let slope = (moments(phi + h, T::zero()).mean_intensity - moments(phi - h, T::zero()).mean_intensity) / (two * h);
            (slope, moments(phi, T::zero()).intensity_variance)
        }
        DetectionScheme::Bhd => {
            let phi = T::PI();
            let mu = |p: T| mean_field(&build_output_coefficients(cfg, p, channel), &cfg.seed);
            let dmu = (mu(phi + h) - mu(phi - h)).unscale(two * h);
            let lo = dmu.arg();
            let slope = (moments(phi + h, lo).quadrature_mean - moments(phi - h, lo).quadrature_mean) / (two * h);
            (slope, moments(phi, lo).quadrature_variance)
        }
    };
    let signal = slope * cfg.probe.delta;
    if variance < T::lit(VARIANCE_FLOOR) {
        return Outcome::unbounded();
    }
    Outcome::ok(signal * signal / variance)
}
