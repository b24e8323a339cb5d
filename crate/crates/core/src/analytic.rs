//! Closed-form visibility, SNR and gain-balance expressions.
//!
//! Every function here is a direct evaluation of a large-seed formula. The
//! exact reference lives in [`crate::moments`]; agreement between the two is
//! expected only when the seed photon number dominates the vacuum terms.
//!
//! Notation used in the comments: `s = √(1−l)`, `t = √(1−η)`, stage gains
//! `(G₁, g₁)` and `(G₂, g₂)`.

use serde::{Deserialize, Serialize};

use crate::model::{GainFactor, InterferometerConfig, LossParams, ProbeSettings, SeedKind};
use crate::outcome::{Outcome, Status};
use crate::scalar::Scalar;
use crate::search;

/// Detection scheme applied to the optical output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionScheme {
    /// Intensity (photon-number) detection.
    Id,
    /// Balanced homodyne detection of a quadrature.
    Bhd,
}

/// Noise quadrances entering the SNR expressions.
///
/// `a2`, `b2` carry the `cos φ` cross term at the probe phase; the `zeta*`
/// terms are evaluated at the dark point `φ = π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseTerms<T> {
    pub a2: T,
    pub b2: T,
    pub c2: T,
    pub zeta1_2: T,
    pub zeta2_2: T,
    pub zeta3_2: T,
}

/// Range searched for the second-stage amplitude gain `G₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainBounds<T> {
    pub min: T,
    pub max: T,
}

impl<T: Scalar> Default for GainBounds<T> {
    fn default() -> Self {
        Self {
            min: T::one(),
            max: T::lit(10.0),
        }
    }
}

impl<T: Scalar> GainBounds<T> {
    pub fn contains(&self, amplitude: T) -> bool {
        amplitude >= self.min && amplitude <= self.max
    }

    fn clamp(&self, amplitude: T) -> T {
        amplitude.max(self.min).min(self.max)
    }
}

/// Second-stage gain returned by [`solve_g2`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G2Solution<T> {
    pub gain: GainFactor<T>,
    /// True when the balance condition holds exactly at `gain`.
    pub exact: bool,
}

struct Arms<T> {
    big1: T,
    small1: T,
    big2: T,
    small2: T,
    s: T,
    t: T,
}

impl<T: Scalar> Arms<T> {
    fn of(stage1: &GainFactor<T>, stage2: &GainFactor<T>, losses: &LossParams<T>) -> Self {
        let (big1, small1) = stage1.pair();
        let (big2, small2) = stage2.pair();
        Self {
            big1,
            small1,
            big2,
            small2,
            s: losses.optical_keep(),
            t: losses.atomic_keep(),
        }
    }

    fn from_cfg(cfg: &InterferometerConfig<T>) -> Self {
        Self::of(&cfg.stage1, &cfg.stage2, &cfg.losses)
    }
}

fn two<T: Scalar>() -> T {
    T::one() + T::one()
}

/// `2pq / (p² + q²)` for two interfering amplitudes.
///
/// Written in terms of the gain products and amplitude transmissions so the
/// optical-seed form reads `balanced_visibility(G₁G₂, g₁g₂, s, t)`.
pub fn balanced_visibility<T: Scalar>(amp_product: T, conv_product: T, optical_keep: T, atomic_keep: T) -> Outcome<T> {
    let p = amp_product * optical_keep;
    let q = conv_product * atomic_keep;
    Outcome::ratio(two::<T>() * p * q, p * p + q * q, Status::UndefinedFringe)
}

/// Fringe visibility of the optical output for the configured seed.
pub fn visibility_su<T: Scalar>(cfg: &InterferometerConfig<T>) -> Outcome<T> {
    let a = Arms::from_cfg(cfg);
    let numerator = two::<T>() * a.big1 * a.big2 * a.small1 * a.small2 * a.s * a.t;
    let denominator = match cfg.seed.kind {
        SeedKind::Optical => {
            a.big1 * a.big1 * a.big2 * a.big2 * a.s * a.s + a.small1 * a.small1 * a.small2 * a.small2 * a.t * a.t
        }
        SeedKind::Atomic => {
            a.big2 * a.big2 * a.small1 * a.small1 * a.s * a.s + a.big1 * a.big1 * a.small2 * a.small2 * a.t * a.t
        }
    };
    Outcome::ratio(numerator, denominator, Status::UndefinedFringe)
}

/// Visibility of a Mach–Zehnder interferometer with the same arm losses.
pub fn visibility_mz<T: Scalar>(losses: &LossParams<T>) -> Outcome<T> {
    let two = two::<T>();
    let s = losses.optical_keep();
    let t = losses.atomic_keep();
    Outcome::ratio(two * s * t, two - losses.l - losses.eta, Status::UndefinedFringe)
}

/// `A²`, `B²`, `C²` at the probe phase and `ζ₁²`, `ζ₂²`, `ζ₃²` at the dark point.
pub fn noise_terms<T: Scalar>(cfg: &InterferometerConfig<T>) -> NoiseTerms<T> {
    noise_terms_signed(cfg, T::one())
}

/// `cross_sign` multiplies the `cos φ` interference term of `A²` and `B²`.
/// Anything other than `+1` is a deliberate fault used to check that the
/// verification suite notices.
pub(crate) fn noise_terms_signed<T: Scalar>(cfg: &InterferometerConfig<T>, cross_sign: T) -> NoiseTerms<T> {
    let a = Arms::from_cfg(cfg);
    let l = cfg.losses.l;
    let eta = cfg.losses.eta;
    let cross = cross_sign * two::<T>() * a.big1 * a.big2 * a.small1 * a.small2 * a.s * a.t * cfg.probe.phi.cos();
    let a2 = a.big1 * a.big1 * a.big2 * a.big2 * (T::one() - l) + a.small1 * a.small1 * a.small2 * a.small2 * (T::one() - eta) + cross;
    let b2 = a.big2 * a.big2 * a.small1 * a.small1 * (T::one() - l) + a.big1 * a.big1 * a.small2 * a.small2 * (T::one() - eta) + cross;
    let c2 = a.big2 * a.big2 * l + a.small2 * a.small2 * eta;
    let zeta1 = a.big1 * a.big2 * a.s - a.small1 * a.small2 * a.t;
    let zeta2 = a.big2 * a.small1 * a.s - a.big1 * a.small2 * a.t;
    NoiseTerms {
        // Rounding can push an exactly cancelling A² a hair below zero.
        a2: a2.max(T::zero()),
        b2: b2.max(T::zero()),
        c2,
        zeta1_2: zeta1 * zeta1,
        zeta2_2: zeta2 * zeta2,
        zeta3_2: c2,
    }
}

/// Phase SNR of intensity detection at the probe phase.
pub fn snr_su_id<T: Scalar>(cfg: &InterferometerConfig<T>) -> Outcome<T> {
    snr_su_id_signed(cfg, T::one())
}

pub(crate) fn snr_su_id_signed<T: Scalar>(cfg: &InterferometerConfig<T>, cross_sign: T) -> Outcome<T> {
    let a = Arms::from_cfg(cfg);
    let nt = noise_terms_signed(cfg, cross_sign);
    let sin_phi = cfg.probe.phi.sin();
    let delta = cfg.probe.delta;
    let numerator = T::lit(4.0)
        * a.big1 * a.big1 * a.big2 * a.big2 * a.small1 * a.small1 * a.small2 * a.small2
        * (T::one() - cfg.losses.l) * (T::one() - cfg.losses.eta)
        * cfg.seed.mean_photon_number * sin_phi * sin_phi * delta * delta;
    let total = nt.a2 + nt.b2 + nt.c2;
    let leading = match cfg.seed.kind {
        SeedKind::Optical => nt.a2,
        SeedKind::Atomic => nt.b2,
    };
    Outcome::ratio(numerator, leading * total, Status::Unbounded)
}

/// Phase SNR of homodyne detection at the dark point `φ = π`, with the local
/// oscillator on the quadrature that carries the phase signal.
pub fn snr_su_bhd<T: Scalar>(cfg: &InterferometerConfig<T>) -> Outcome<T> {
    let a = Arms::from_cfg(cfg);
    let nt = noise_terms(cfg);
    let signal_gain = match cfg.seed.kind {
        SeedKind::Optical => a.big1 * a.big2,
        SeedKind::Atomic => a.big2 * a.small1,
    };
    let delta = cfg.probe.delta;
    let numerator =
        T::lit(4.0) * (T::one() - cfg.losses.l) * signal_gain * signal_gain * cfg.seed.mean_photon_number * delta * delta;
    Outcome::ratio(numerator, nt.zeta1_2 + nt.zeta2_2 + nt.zeta3_2, Status::Unbounded)
}

/// Phase SNR of a Mach–Zehnder interferometer fed with the same
/// phase-sensitive photon number `N₀ = (2G₁² − 1)N`.
pub fn snr_mz<T: Scalar>(losses: &LossParams<T>, stage1: &GainFactor<T>, probe: &ProbeSettings<T>, photons: T) -> Outcome<T> {
    let two = two::<T>();
    let big1 = stage1.amplitude();
    let n0 = (two * big1 * big1 - T::one()) * photons;
    let sin_phi = probe.phi.sin();
    let numerator =
        (T::one() - losses.l) * (T::one() - losses.eta) * n0 * sin_phi * sin_phi * probe.delta * probe.delta;
    let denominator =
        (two - losses.l - losses.eta) - two * losses.optical_keep() * losses.atomic_keep() * probe.phi.cos();
    // Cancels to ~1e-16 rather than exactly 0 at l = η = 0, φ = 0.
    let denominator = if denominator.abs() <= T::epsilon() * T::lit(8.0) { T::zero() } else { denominator };
    Outcome::ratio(numerator, denominator, Status::Unbounded)
}

/// LHS − RHS of the gain-balance condition for the given scheme and seed.
///
/// * ID, optical seed: `G₁G₂s − g₁g₂t`
/// * ID, atomic seed: `G₂g₁s − G₁g₂t`
/// * BHD, either seed: `2stG₁G₂g₁g₂ − (2t²g₁²g₂² + g₂² + G₂²)`
pub fn condition_residual<T: Scalar>(cfg: &InterferometerConfig<T>, scheme: DetectionScheme) -> T {
    residual_parts(&Arms::from_cfg(cfg), scheme, cfg.seed.kind)
}

fn residual_parts<T: Scalar>(a: &Arms<T>, scheme: DetectionScheme, kind: SeedKind) -> T {
    match (scheme, kind) {
        (DetectionScheme::Id, SeedKind::Optical) => a.big1 * a.big2 * a.s - a.small1 * a.small2 * a.t,
        (DetectionScheme::Id, SeedKind::Atomic) => a.big2 * a.small1 * a.s - a.big1 * a.small2 * a.t,
        (DetectionScheme::Bhd, _) => {
            let two = two::<T>();
            two * a.s * a.t * a.big1 * a.big2 * a.small1 * a.small2
                - (two * a.t * a.t * a.small1 * a.small1 * a.small2 * a.small2 + a.small2 * a.small2 + a.big2 * a.big2)
        }
    }
}

/// Loss `l_B` at which fixed gains satisfy the ID balance condition, if any.
pub fn loss_balance_point<T: Scalar>(
    stage1: &GainFactor<T>,
    stage2: &GainFactor<T>,
    eta: T,
    kind: SeedKind,
) -> Option<T> {
    let (big1, small1) = stage1.pair();
    let (big2, small2) = stage2.pair();
    let ratio = match kind {
        SeedKind::Optical => small1 * small2 / (big1 * big2),
        SeedKind::Atomic => {
            if small1 == T::zero() {
                return None;
            }
            big1 * small2 / (big2 * small1)
        }
    };
    let l_b = T::one() - ratio * ratio * (T::one() - eta);
    (l_b >= T::zero() && l_b <= T::one()).then_some(l_b)
}

const BHD_SCAN_POINTS: usize = 64;

/// Second-stage gain that satisfies the balance condition.
///
/// ID conditions are solved in closed form for `g₂`; the BHD condition is
/// solved by scanning the residual over `bounds` and bisecting the lowest
/// sign change. When no exact solution exists inside `bounds` the closest
/// admissible gain is returned with `exact = false`.
pub fn solve_g2<T: Scalar>(
    stage1: &GainFactor<T>,
    losses: &LossParams<T>,
    scheme: DetectionScheme,
    kind: SeedKind,
    bounds: GainBounds<T>,
) -> G2Solution<T> {
    let (big1, small1) = stage1.pair();
    let s = losses.optical_keep();
    let t = losses.atomic_keep();
    match scheme {
        DetectionScheme::Id => {
            // Optical: G₂/g₂ = g₁t/(G₁s)  →  g₂ = G₁s / √(g₁²t² − G₁²s²).
            // Atomic:  g₂/G₂ = g₁s/(G₁t)  →  g₂ = g₁s / √(G₁²t² − g₁²s²).
            let (num, disc) = match kind {
                SeedKind::Optical => (big1 * s, small1 * small1 * t * t - big1 * big1 * s * s),
                SeedKind::Atomic => (small1 * s, big1 * big1 * t * t - small1 * small1 * s * s),
            };
            if disc <= T::zero() {
                return boundary(bounds.max);
            }
            let conversion = num / disc.sqrt();
            let Ok(gain) = GainFactor::from_conversion(conversion) else {
                return boundary(bounds.max);
            };
            let amplitude = gain.amplitude();
            if bounds.contains(amplitude) {
                G2Solution { gain, exact: true }
            } else {
                boundary(bounds.clamp(amplitude))
            }
        }
        DetectionScheme::Bhd => {
            let residual = |amplitude: T| {
                let stage2 = amplitude_gain(amplitude);
                residual_parts(&Arms::of(stage1, &stage2, losses), DetectionScheme::Bhd, kind)
            };
            let step = (bounds.max - bounds.min) / T::lit((BHD_SCAN_POINTS - 1) as f64);
            let grid: Vec<T> = (0..BHD_SCAN_POINTS)
                .map(|i| if i + 1 == BHD_SCAN_POINTS { bounds.max } else { bounds.min + step * T::lit(i as f64) })
                .collect();
            let values: Vec<T> = grid.iter().map(|&g| residual(g)).collect();
            for i in 0..grid.len() {
                if values[i] == T::zero() {
                    return G2Solution { gain: amplitude_gain(grid[i]), exact: true };
                }
                if i + 1 < grid.len() && (values[i] < T::zero()) != (values[i + 1] < T::zero()) {
                    let root = search::bisect_root(residual, grid[i], grid[i + 1], T::lit(1e-13));
                    return G2Solution { gain: amplitude_gain(root), exact: true };
                }
            }
            let (lo, hi) = (values[0].abs(), values[values.len() - 1].abs());
            let tie = T::lit(1e-12);
            boundary(if lo <= hi + tie { bounds.min } else { bounds.max })
        }
    }
}

fn amplitude_gain<T: Scalar>(amplitude: T) -> GainFactor<T> {
    GainFactor::from_amplitude(amplitude.max(T::one())).expect("amplitude clamped to >= 1")
}

fn boundary<T: Scalar>(amplitude: T) -> G2Solution<T> {
    G2Solution {
        gain: amplitude_gain(amplitude),
        exact: false,
    }
}
