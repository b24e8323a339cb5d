//! Second-stage gain optimization and the visibility/SNR coincidence check.
//!
//! Only `G₂` is varied; `G₁`, the losses and the probe stay at their base
//! values.

mod sweep;

pub use sweep::{run_sweep, Grid, SweepObjective, SweepResult, SweepRow, SweepSpec, Swept};

use serde::{Deserialize, Serialize};

use crate::analytic::{self, DetectionScheme, GainBounds};
use crate::model::{GainFactor, InterferometerConfig};
use crate::outcome::Outcome;
use crate::scalar::Scalar;
use crate::search;

/// Pre-scan grid size before golden-section refinement.
pub const SCAN_POINTS: usize = 64;
/// Golden-section tolerance in `G₂`.
pub const GOLDEN_TOL: f64 = 1e-6;
/// Objective spread below which the search reports a flat objective.
pub const FLAT_SPREAD: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Visibility,
    Snr,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum<T> {
    pub gain: GainFactor<T>,
    pub value: T,
    /// Visibility: the balance condition holds exactly at `gain`.
    /// SNR: the maximizer is a stationary point strictly inside the bounds.
    pub exact: bool,
    /// The objective varied by less than [`FLAT_SPREAD`] over the bounds.
    pub flat: bool,
}

fn objective_value<T: Scalar>(cfg: &InterferometerConfig<T>, objective: Objective, scheme: DetectionScheme) -> Outcome<T> {
    match (objective, scheme) {
        (Objective::Visibility, _) => analytic::visibility_su(cfg),
        (Objective::Snr, DetectionScheme::Id) => analytic::snr_su_id(cfg),
        (Objective::Snr, DetectionScheme::Bhd) => analytic::snr_su_bhd(cfg),
    }
}

/// Maximizes the chosen objective over the amplitude `G₂ ∈ bounds`.
///
/// The visibility objective uses the closed-form balance solution when it
/// lies inside `bounds`. Otherwise the objective is scanned on
/// [`SCAN_POINTS`] points and refined by golden section. The base `G₂` is
/// kept as a candidate whenever it lies inside `bounds`, so the result never
/// does worse than the base configuration.
pub fn optimize_g2<T: Scalar>(
    base: &InterferometerConfig<T>,
    objective: Objective,
    scheme: DetectionScheme,
    bounds: GainBounds<T>,
) -> Optimum<T> {
    let at = |amplitude: T| {
        let gain = GainFactor::from_amplitude(amplitude.max(T::one())).expect("amplitude >= 1");
        objective_value(&base.with_stage2(gain), objective, scheme).value
    };

    if objective == Objective::Visibility {
        let sol = analytic::solve_g2(&base.stage1, &base.losses, DetectionScheme::Id, base.seed.kind, bounds);
        if sol.exact {
            let value = objective_value(&base.with_stage2(sol.gain), objective, scheme).value;
            return Optimum {
                gain: sol.gain,
                value,
                exact: true,
                flat: false,
            };
        }
    }

    let scan = search::scan_then_golden_max(at, bounds.min, bounds.max, SCAN_POINTS, T::lit(GOLDEN_TOL));
    if scan.spread < T::lit(FLAT_SPREAD) {
        let gain = GainFactor::from_amplitude(bounds.min.max(T::one())).expect("amplitude >= 1");
        return Optimum {
            gain,
            value: at(bounds.min),
            exact: false,
            flat: true,
        };
    }
    let (mut best, mut value) = (scan.argmax, scan.max);
    let base_amp = base.stage2.amplitude();
    if bounds.contains(base_amp) {
        let base_value = at(base_amp);
        if base_value > value {
            best = base_amp;
            value = base_value;
        }
    }
    let gain = if best == base_amp {
        base.stage2
    } else {
        GainFactor::from_amplitude(best.max(T::one())).expect("amplitude >= 1")
    };
    let edge = T::lit(GOLDEN_TOL);
    let exact = objective == Objective::Snr && best > bounds.min + edge && best < bounds.max - edge;
    Optimum {
        gain,
        value,
        exact,
        flat: false,
    }
}

/// One row of [`coincidence_report`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoincidenceRow<T> {
    pub l: T,
    pub g2_visibility: T,
    pub g2_snr: T,
    pub difference: T,
    pub flat: bool,
}

/// Visibility-optimal and SNR-optimal `G₂` at each loss in `loss_grid`.
///
/// The SNR is that of `scheme`; the visibility optimum does not depend on
/// the scheme.
pub fn coincidence_report<T: Scalar>(
    base: &InterferometerConfig<T>,
    loss_grid: &[T],
    bounds: GainBounds<T>,
    scheme: DetectionScheme,
) -> Vec<CoincidenceRow<T>> {
    loss_grid
        .iter()
        .map(|&l| {
            let mut cfg = *base;
            cfg.losses.l = l;
            let v = optimize_g2(&cfg, Objective::Visibility, scheme, bounds);
            let s = optimize_g2(&cfg, Objective::Snr, scheme, bounds);
            let (gv, gs) = (v.gain.amplitude(), s.gain.amplitude());
            CoincidenceRow {
                l,
                g2_visibility: gv,
                g2_snr: gs,
                difference: (gv - gs).abs(),
                flat: v.flat || s.flat,
            }
        })
        .collect()
}
