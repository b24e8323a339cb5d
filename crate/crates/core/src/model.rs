//! Domain types for the two-stage Raman interferometer and their validation.

use serde::{Deserialize, Serialize};

use crate::error::{SalhiError, ValidationReport};
use crate::scalar::Scalar;

/// Default phase offset from the dark point, in radians.
pub const DEFAULT_DARK_OFFSET: f64 = 1e-3;
/// Default modulation amplitude, in radians.
pub const DEFAULT_DELTA: f64 = 1e-3;
/// Default mean seed photon number.
pub const DEFAULT_PHOTONS: f64 = 1e6;

/// Gain of one Raman stage, `G = cosh r`, `g = sinh r`.
///
/// The squeeze argument is the stored quantity, so `G² − g² = 1` holds by
/// construction and cannot drift across sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainFactor<T> {
    r: T,
}

impl<T: Scalar> GainFactor<T> {
    /// Pass-through stage (`G = 1`, `g = 0`).
    pub fn identity() -> Self {
        Self { r: T::zero() }
    }

    pub fn from_squeeze(r: T) -> Result<Self, SalhiError> {
        if !r.is_finite() || r < T::zero() {
            return Err(SalhiError::Domain(format!(
                "squeeze argument must be finite and >= 0, got {r}"
            )));
        }
        Ok(Self { r })
    }

    pub fn from_amplitude(amplitude: T) -> Result<Self, SalhiError> {
        if !amplitude.is_finite() || amplitude < T::one() {
            return Err(SalhiError::Domain(format!("G < 1 (got {amplitude})")));
        }
        Ok(Self { r: amplitude.acosh() })
    }

    /// Builds the stage from its conversion gain `g`. Better conditioned than
    /// [`GainFactor::from_amplitude`] when `G` is close to 1.
    pub fn from_conversion(conversion: T) -> Result<Self, SalhiError> {
        if !conversion.is_finite() || conversion < T::zero() {
            return Err(SalhiError::Domain(format!("g < 0 (got {conversion})")));
        }
        Ok(Self { r: conversion.asinh() })
    }

    /// Amplitude gain `G`.
    #[inline]
    pub fn amplitude(&self) -> T {
        self.r.cosh()
    }

    /// Conversion gain `g`.
    #[inline]
    pub fn conversion(&self) -> T {
        self.r.sinh()
    }

    #[inline]
    pub fn squeeze(&self) -> T {
        self.r
    }

    /// `(G, g)`.
    #[inline]
    pub fn pair(&self) -> (T, T) {
        (self.amplitude(), self.conversion())
    }
}

/// `make_gain`: stage gains from the squeeze argument.
pub fn make_gain<T: Scalar>(r: T) -> Result<GainFactor<T>, SalhiError> {
    GainFactor::from_squeeze(r)
}

/// `gain_from_G`: stage gains from the quoted amplitude gain `G`.
pub fn gain_from_amplitude<T: Scalar>(amplitude: T) -> Result<GainFactor<T>, SalhiError> {
    GainFactor::from_amplitude(amplitude)
}

/// Internal losses between the two stages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossParams<T> {
    /// Optical loss fraction.
    pub l: T,
    /// Atomic spin-wave dephasing fraction.
    pub eta: T,
}

impl<T: Scalar> LossParams<T> {
    pub fn new(l: T, eta: T) -> Result<Self, SalhiError> {
        let losses = Self { l, eta };
        let mut report = ValidationReport::default();
        losses.check("losses", &mut report);
        if report.is_empty() {
            Ok(losses)
        } else {
            Err(report.into())
        }
    }

    pub fn lossless() -> Self {
        Self {
            l: T::zero(),
            eta: T::zero(),
        }
    }

    /// `√(1−l)`, the optical amplitude transmission.
    #[inline]
    pub fn optical_keep(&self) -> T {
        (T::one() - self.l).max(T::zero()).sqrt()
    }

    /// `√(1−η)`, the atomic amplitude transmission.
    #[inline]
    pub fn atomic_keep(&self) -> T {
        (T::one() - self.eta).max(T::zero()).sqrt()
    }

    fn check(&self, prefix: &str, report: &mut ValidationReport) {
        for (name, v) in [("l", self.l), ("eta", self.eta)] {
            if !(v >= T::zero() && v <= T::one()) {
                report.push(format!("{prefix}.{name}"), format!("{name} out of [0,1] (got {v})"));
            }
        }
    }
}

/// Which input mode carries the coherent seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedKind {
    /// Coherent optical seed, atomic spin wave in vacuum.
    Optical,
    /// Prepared atomic spin wave, optical input in vacuum.
    Atomic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedSpec<T> {
    pub kind: SeedKind,
    /// Mean photon (or excitation) number `|α|²`.
    pub mean_photon_number: T,
    /// Phase of the coherent amplitude, radians.
    pub alpha_phase: T,
}

impl<T: Scalar> SeedSpec<T> {
    pub fn optical(mean_photon_number: T) -> Self {
        Self {
            kind: SeedKind::Optical,
            mean_photon_number,
            alpha_phase: T::zero(),
        }
    }

    pub fn atomic(mean_photon_number: T) -> Self {
        Self {
            kind: SeedKind::Atomic,
            ..Self::optical(mean_photon_number)
        }
    }

    /// Coherent amplitude `α = √N e^{iθ}`.
    pub fn alpha(&self) -> num_complex::Complex<T> {
        num_complex::Complex::from_polar(self.mean_photon_number.max(T::zero()).sqrt(), self.alpha_phase)
    }
}

/// Operating phase and modulation of the probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSettings<T> {
    /// Interferometer phase `φ`.
    pub phi: T,
    /// Modulation amplitude `δ`.
    pub delta: T,
    /// Offset `Δφ` from the dark point.
    pub dark_offset: T,
}

impl<T: Scalar> ProbeSettings<T> {
    /// Probe parked at `φ = π + Δφ`.
    pub fn near_dark(dark_offset: T, delta: T) -> Self {
        Self {
            phi: T::PI() + dark_offset,
            delta,
            dark_offset,
        }
    }
}

impl<T: Scalar> Default for ProbeSettings<T> {
    fn default() -> Self {
        Self::near_dark(T::lit(DEFAULT_DARK_OFFSET), T::lit(DEFAULT_DELTA))
    }
}

/// Complete description of one interferometer operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferometerConfig<T> {
    pub stage1: GainFactor<T>,
    pub stage2: GainFactor<T>,
    pub losses: LossParams<T>,
    pub seed: SeedSpec<T>,
    pub probe: ProbeSettings<T>,
}

impl<T: Scalar> InterferometerConfig<T> {
    /// Optical seed of [`DEFAULT_PHOTONS`] photons with the default probe.
    pub fn with_amplitudes(g1: T, g2: T, l: T, eta: T) -> Result<Self, SalhiError> {
        let cfg = Self {
            stage1: GainFactor::from_amplitude(g1)?,
            stage2: GainFactor::from_amplitude(g2)?,
            losses: LossParams::new(l, eta)?,
            seed: SeedSpec::optical(T::lit(DEFAULT_PHOTONS)),
            probe: ProbeSettings::default(),
        };
        Ok(cfg)
    }

    pub fn with_stage1(mut self, stage1: GainFactor<T>) -> Self {
        self.stage1 = stage1;
        self
    }

    pub fn with_stage2(mut self, stage2: GainFactor<T>) -> Self {
        self.stage2 = stage2;
        self
    }

    pub fn with_losses(mut self, losses: LossParams<T>) -> Self {
        self.losses = losses;
        self
    }

    pub fn with_seed(mut self, seed: SeedSpec<T>) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_probe(mut self, probe: ProbeSettings<T>) -> Self {
        self.probe = probe;
        self
    }

    pub fn with_phi(mut self, phi: T) -> Self {
        self.probe.phi = phi;
        self
    }

    fn check(&self, report: &mut ValidationReport) {
        for (name, stage) in [("stage1", &self.stage1), ("stage2", &self.stage2)] {
            let r = stage.squeeze();
            if !(r.is_finite() && r >= T::zero()) {
                report.push(format!("{name}.r"), format!("squeeze argument must be finite and >= 0 (got {r})"));
            }
        }
        self.losses.check("losses", report);
        let n = self.seed.mean_photon_number;
        if !(n.is_finite() && n >= T::zero()) {
            report.push("seed.mean_photon_number", format!("N must be finite and >= 0 (got {n})"));
        }
        if !self.seed.alpha_phase.is_finite() {
            report.push("seed.alpha_phase", "phase must be finite");
        }
        let p = &self.probe;
        if !p.phi.is_finite() {
            report.push("probe.phi", "phi must be finite");
        }
        if !(p.delta.is_finite() && p.delta > T::zero()) {
            report.push("probe.delta", format!("delta must be > 0 (got {})", p.delta));
        }
        if !(p.dark_offset.is_finite() && p.dark_offset >= T::zero()) {
            report.push("probe.dark_offset", format!("dark_offset must be >= 0 (got {})", p.dark_offset));
        }
    }
}

/// Returns the configuration unchanged when every invariant holds, otherwise
/// a report naming each violated invariant. Never clamps.
pub fn validate_config<T: Scalar>(cfg: InterferometerConfig<T>) -> Result<InterferometerConfig<T>, ValidationReport> {
    let mut report = ValidationReport::default();
    cfg.check(&mut report);
    if report.is_empty() {
        Ok(cfg)
    } else {
        Err(report)
    }
}

/// A stage gain as it appears in user input, before domain checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GainSpec<T> {
    Amplitude(T),
    Squeeze(T),
}

/// Unchecked configuration, e.g. freshly parsed from a file. [`ConfigDraft::build`]
/// reports every problem at once instead of stopping at the first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfigDraft<T> {
    pub stage1: GainSpec<T>,
    pub stage2: GainSpec<T>,
    pub losses: LossParams<T>,
    pub seed: SeedSpec<T>,
    pub probe: ProbeSettings<T>,
}

impl<T: Scalar> ConfigDraft<T> {
    pub fn build(&self) -> Result<InterferometerConfig<T>, ValidationReport> {
        let mut report = ValidationReport::default();
        let mut stage = |name: &str, spec: GainSpec<T>| -> GainFactor<T> {
            let built = match spec {
                GainSpec::Amplitude(a) => GainFactor::from_amplitude(a).map_err(|_| ("G", format!("G < 1 (got {a})"))),
                GainSpec::Squeeze(r) => {
                    GainFactor::from_squeeze(r).map_err(|_| ("r", format!("r must be finite and >= 0 (got {r})")))
                }
            };
            built.unwrap_or_else(|(field, msg)| {
                report.push(format!("{name}.{field}"), msg);
                GainFactor::identity()
            })
        };
        let stage1 = stage("stage1", self.stage1);
        let stage2 = stage("stage2", self.stage2);
        let cfg = InterferometerConfig {
            stage1,
            stage2,
            losses: self.losses,
            seed: self.seed,
            probe: self.probe,
        };
        cfg.check(&mut report);
        if report.is_empty() {
            Ok(cfg)
        } else {
            Err(report)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn baseline() -> InterferometerConfig<f64> {
        InterferometerConfig::with_amplitudes(3.0, 5.0, 0.96, 0.4).unwrap()
    }

    #[test]
    fn identity_stage() {
        let g = make_gain(0.0_f64).unwrap();
        assert_eq!(g.pair(), (1.0, 0.0));
    }

    #[test]
    fn gain_examples() {
        let g = make_gain(3.0_f64.acosh()).unwrap();
        assert_abs_diff_eq!(g.amplitude(), 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.conversion(), 8.0_f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(g.squeeze(), 1.762747174039086, epsilon = 1e-12);

        let g = gain_from_amplitude(5.0_f64).unwrap();
        assert_abs_diff_eq!(g.conversion(), 24.0_f64.sqrt(), epsilon = 1e-12);
        assert_eq!(gain_from_amplitude(1.0_f64).unwrap().conversion(), 0.0);
    }

    #[test]
    fn rejects_bad_gains() {
        assert!(make_gain(-0.1_f64).is_err());
        assert!(make_gain(f64::NAN).is_err());
        assert!(make_gain(f64::INFINITY).is_err());
        assert!(gain_from_amplitude(0.5_f64).is_err());
        assert!(GainFactor::from_conversion(-1.0_f64).is_err());
    }

    #[test]
    fn baseline_is_valid() {
        let cfg = baseline();
        assert_eq!(validate_config(cfg), Ok(cfg));
    }

    #[test]
    fn loss_out_of_range_is_named() {
        let mut cfg = baseline();
        cfg.losses.l = 1.2;
        let report = validate_config(cfg).unwrap_err();
        assert!(report.mentions("l out of [0,1]"), "{report}");
        assert!(report.mentions("losses.l"));
    }

    #[test]
    fn draft_reports_every_violation() {
        let draft = ConfigDraft {
            stage1: GainSpec::Amplitude(3.0),
            stage2: GainSpec::Amplitude(0.5),
            losses: LossParams { l: 1.2, eta: -0.1 },
            seed: SeedSpec::optical(-1.0),
            probe: ProbeSettings { phi: 0.0, delta: 0.0, dark_offset: 0.0 },
        };
        let report = draft.build().unwrap_err();
        assert!(report.mentions("G < 1"));
        assert!(report.mentions("stage2.G"));
        assert!(report.mentions("losses.l"));
        assert!(report.mentions("losses.eta"));
        assert!(report.mentions("seed.mean_photon_number"));
        assert!(report.mentions("probe.delta"));
        assert_eq!(report.violations.len(), 5);
    }

    #[test]
    fn boundary_losses_are_legal() {
        assert!(LossParams::new(1.0_f64, 0.0).is_ok());
        assert!(LossParams::new(0.0_f64, 1.0).is_ok());
        assert!(LossParams::new(1.0_f64 + 1e-15, 0.0).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let g = gain_from_amplitude(3.0_f32).unwrap();
        let (a, c) = g.pair();
        assert!((a * a - c * c - 1.0).abs() < 1e-4);
    }

    proptest! {
        #[test]
        fn hyperbola_holds(r in 0.0f64..5.0) {
            let (a, c) = make_gain(r).unwrap().pair();
            // G and g each carry one rounding, so the residual scales with G²
            // (about 3e-12 absolute at r = 5).
            prop_assert!((a * a - c * c - 1.0).abs() <= 1e-12 * (a * a).max(1.0));
        }

        #[test]
        fn amplitude_round_trip(r in 0.0f64..5.0) {
            let back = gain_from_amplitude(make_gain(r).unwrap().amplitude()).unwrap();
            // acosh is ill-conditioned at G = 1: error there scales like eps/r.
            prop_assert!((back.squeeze() - r).abs() <= 1e-10f64.max(1e-15 / r.max(1e-300)));
        }

        #[test]
        fn validation_is_idempotent(l in 0.0f64..=1.0, eta in 0.0f64..=1.0, g1 in 1.0f64..10.0, g2 in 1.0f64..10.0) {
            let cfg = InterferometerConfig::with_amplitudes(g1, g2, l, eta).unwrap();
            let once = validate_config(cfg).unwrap();
            let twice = validate_config(once).unwrap();
            prop_assert_eq!(cfg, twice);
        }
    }
}
