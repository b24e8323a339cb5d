//! Cross-check suite: closed forms against exact moments, exact moments
//! against the Fock oracle, and the visibility/SNR optimum coincidence.
//!
//! Random configurations come from a seeded ChaCha8 stream, so a given
//! [`VerifyOptions`] always checks the same points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analytic::{self, DetectionScheme, GainBounds};
use crate::model::{GainFactor, InterferometerConfig, LossParams, ProbeSettings, SeedKind, SeedSpec};
use crate::moments::fock::fock_oracle_adaptive;
use crate::moments::{self, build_output_coefficients, compute_moments, OutputChannel};
use crate::optimizer::coincidence_report;
use crate::search;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Random large-seed configurations for the analytic-vs-moments checks.
    pub grid_size: usize,
    /// Random small-gain configurations for the moments-vs-Fock check.
    pub small_configs: usize,
    pub seed: u64,
    /// Flips the sign of the interference cross term in the closed-form SNR.
    pub inject_fault: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            grid_size: 100,
            small_configs: 20,
            seed: 1,
            inject_fault: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub tolerance: f64,
    /// Largest residual seen; compared against `tolerance` unless the check
    /// says otherwise in `detail`.
    pub worst: f64,
    pub samples: usize,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Large-seed configuration drawn from the acceptance ranges, probed just off
/// the dark fringe.
pub fn random_large_config(rng: &mut impl Rng) -> InterferometerConfig<f64> {
    let g1 = rng.random_range(1.1..5.0);
    let g2 = rng.random_range(1.1..5.0);
    let l = rng.random_range(0.0..0.99);
    let eta = rng.random_range(0.0..0.9);
    let kind = if rng.random_bool(0.5) { SeedKind::Optical } else { SeedKind::Atomic };
    let seed = SeedSpec { kind, ..SeedSpec::optical(1e6) };
    InterferometerConfig::with_amplitudes(g1, g2, l, eta)
        .expect("sampled inside the domain")
        .with_seed(seed)
        .with_probe(ProbeSettings::near_dark(1e-3, 1e-3))
}

/// Small-gain configuration for the Fock oracle: `r ≤ 0.5`, `|α| ≤ 1`.
pub fn random_small_config(rng: &mut impl Rng) -> InterferometerConfig<f64> {
    let tau = std::f64::consts::TAU;
    let stage1 = GainFactor::from_squeeze(rng.random_range(0.0..=0.5)).expect("r >= 0");
    let stage2 = GainFactor::from_squeeze(rng.random_range(0.0..=0.5)).expect("r >= 0");
    let losses = LossParams::new(rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0)).expect("in [0, 1]");
    let kind = if rng.random_bool(0.5) { SeedKind::Optical } else { SeedKind::Atomic };
    let seed = SeedSpec {
        kind,
        mean_photon_number: rng.random_range(0.0..=1.0),
        alpha_phase: rng.random_range(0.0..tau),
    };
    let probe = ProbeSettings {
        phi: rng.random_range(0.0..tau),
        ..ProbeSettings::default()
    };
    InterferometerConfig {
        stage1,
        stage2,
        losses,
        seed,
        probe,
    }
}

/// Relative difference `|a − b| / |b|`.
fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn check(name: &'static str, tolerance: f64, worst: f64, samples: usize, detail: String) -> CheckResult {
    CheckResult {
        name,
        tolerance,
        worst,
        samples,
        passed: worst <= tolerance,
        detail,
    }
}

/// Largest cutoff the verification suite lets the Fock oracle grow to.
pub const FOCK_MAX_CUTOFF: usize = 60;

pub fn run_verification(opts: &VerifyOptions) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let large: Vec<_> = (0..opts.grid_size).map(|_| random_large_config(&mut rng)).collect();
    let small: Vec<_> = (0..opts.small_configs).map(|_| random_small_config(&mut rng)).collect();
    let sign = if opts.inject_fault { -1.0 } else { 1.0 };

    let mut checks = Vec::new();

    let mut worst = (0.0f64, 0usize);
    for (i, cfg) in large.iter().enumerate() {
        let exact = moments::snr_numeric(cfg, DetectionScheme::Id, OutputChannel::Optical).value;
        let closed = analytic::snr_su_id_signed(cfg, sign).value;
        let r = rel(closed, exact);
        if !(r <= worst.0) {
            worst = (r, i);
        }
    }
    checks.push(check(
        "analytic_vs_moments_id_snr",
        1e-3,
        worst.0,
        large.len(),
        format!("relative; worst at sample {}", worst.1),
    ));

    let mut worst = (0.0f64, 0usize);
    for (i, cfg) in large.iter().enumerate() {
        let exact = moments::exact_visibility(cfg, OutputChannel::Optical).value;
        let closed = analytic::visibility_su(cfg).value;
        let r = (closed - exact).abs();
        if !(r <= worst.0) {
            worst = (r, i);
        }
    }
    checks.push(check(
        "analytic_vs_moments_visibility",
        1e-3,
        worst.0,
        large.len(),
        format!("absolute; worst at sample {}", worst.1),
    ));

    let mut worst = (0.0f64, String::new());
    let mut failure = None;
    for (i, cfg) in small.iter().enumerate() {
        for channel in [OutputChannel::Optical, OutputChannel::Atomic] {
            let lo_phase = cfg.probe.phi * 0.5;
            let wick = compute_moments(&build_output_coefficients(cfg, cfg.probe.phi, channel), &cfg.seed, lo_phase);
            match fock_oracle_adaptive(cfg, channel, lo_phase, FOCK_MAX_CUTOFF) {
                Ok((fock, n_max)) => {
                    let d = [
                        (fock.mean_intensity - wick.mean_intensity).abs(),
                        (fock.intensity_variance - wick.intensity_variance).abs(),
                        (fock.quadrature_mean - wick.quadrature_mean).abs(),
                        (fock.quadrature_variance - wick.quadrature_variance).abs(),
                    ]
                    .into_iter()
                    .fold(0.0, f64::max);
                    if !(d <= worst.0) {
                        worst = (d, format!("sample {i} {channel:?} at n_max = {n_max}"));
                    }
                }
                Err(e) => failure = Some(format!("sample {i} {channel:?}: {e}")),
            }
        }
    }
    let mut fock = check("moments_vs_fock", 1e-8, worst.0, small.len(), format!("absolute; worst {}", worst.1));
    if let Some(f) = failure {
        fock.passed = false;
        fock.detail = f;
    }
    checks.push(fock);

    let mut worst = 0.0f64;
    for cfg in &large {
        for channel in [OutputChannel::Optical, OutputChannel::Atomic] {
            let phi = cfg.probe.phi;
            worst = worst.max((build_output_coefficients(cfg, phi, channel).commutator() - 1.0).abs());
        }
    }
    checks.push(check("bogoliubov_commutator", 1e-10, worst, large.len(), "absolute".into()));

    let base = InterferometerConfig::with_amplitudes(3.0, 5.0, 0.5, 0.4)
        .expect("fixed config")
        .with_probe(ProbeSettings::near_dark(1e-3, 1e-3));
    let grid = search::linspace(0.1, 0.9, 9);
    let id = coincidence_report(&base, &grid, GainBounds::default(), DetectionScheme::Id);
    let worst = id.iter().map(|r| r.difference).fold(0.0, f64::max);
    checks.push(check("coincidence_id", 1e-3, worst, id.len(), "max |G2*_V - G2*_SNR|".into()));

    let bhd = coincidence_report(&base, &grid, GainBounds::default(), DetectionScheme::Bhd);
    let largest = bhd.iter().map(|r| r.difference).fold(0.0, f64::max);
    checks.push(CheckResult {
        name: "coincidence_bhd_diverges",
        tolerance: 1e-2,
        worst: largest,
        samples: bhd.len(),
        passed: largest > 1e-2,
        detail: "passes when the largest difference exceeds the tolerance".into(),
    });

    VerifyReport { checks }
}
