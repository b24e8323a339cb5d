use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{optimize_g2, Objective};
use crate::analytic::{self, DetectionScheme, GainBounds};
use crate::error::ValidationReport;
use crate::model::{validate_config, GainFactor, InterferometerConfig};
use crate::scalar::Scalar;

/// Parameter varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Swept {
    LossL,
    LossEta,
    G2,
    Phi,
}

/// Which optimized columns to fill.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepObjective {
    Visibility,
    Snr,
    Both,
}

impl SweepObjective {
    fn visibility(self) -> bool {
        matches!(self, SweepObjective::Visibility | SweepObjective::Both)
    }
    fn snr(self) -> bool {
        matches!(self, SweepObjective::Snr | SweepObjective::Both)
    }
}

/// Evenly spaced inclusive grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    pub min: T,
    pub max: T,
    pub points: usize,
}

impl<T: Scalar> Grid<T> {
    pub fn values(&self) -> Vec<T> {
        crate::search::linspace(self.min, self.max, self.points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec<T> {
    pub swept: Swept,
    pub grid: Grid<T>,
    pub base: InterferometerConfig<T>,
    pub scheme: DetectionScheme,
    /// `None` evaluates the base configuration only.
    pub objective: Option<SweepObjective>,
    pub bounds: GainBounds<T>,
}

/// One grid point. Optimized columns are `None` when not requested or when
/// the row failed; `error` carries the failure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow<T> {
    pub swept_value: T,
    pub visibility_su: T,
    pub visibility_mz: T,
    pub snr_su: T,
    pub snr_mz: T,
    pub optimal_g2_for_v: Option<T>,
    pub optimal_g2_for_snr: Option<T>,
    pub visibility_su_opt: Option<T>,
    pub snr_su_opt: Option<T>,
    pub condition_residual: T,
    pub exact: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult<T> {
    pub swept: Swept,
    pub scheme: DetectionScheme,
    pub rows: Vec<SweepRow<T>>,
}

impl<T: Scalar> SweepSpec<T> {
    pub fn validate(&self) -> Result<(), ValidationReport> {
        let mut report = ValidationReport::default();
        if self.grid.points < 2 {
            report.push("grid.points", format!("need at least 2 points (got {})", self.grid.points));
        }
        if !(self.grid.min < self.grid.max) {
            report.push("grid", format!("min must be below max (got {} .. {})", self.grid.min, self.grid.max));
        }
        let (lo, hi) = match self.swept {
            Swept::LossL | Swept::LossEta => (T::zero(), T::one()),
            Swept::G2 => (self.bounds.min.max(T::one()), self.bounds.max),
            Swept::Phi => (T::neg_infinity(), T::infinity()),
        };
        for (name, v) in [("grid.min", self.grid.min), ("grid.max", self.grid.max)] {
            if !v.is_finite() || v < lo || v > hi {
                report.push(name, format!("{v} outside [{lo}, {hi}] for {:?}", self.swept));
            }
        }
        if !(self.bounds.min >= T::one() && self.bounds.min < self.bounds.max) {
            report.push("bounds", format!("need 1 <= min < max (got {} .. {})", self.bounds.min, self.bounds.max));
        }
        if let Err(base) = validate_config(self.base) {
            report.violations.extend(base.violations);
        }
        if report.is_empty() {
            Ok(())
        } else {
            Err(report)
        }
    }
}

fn apply<T: Scalar>(base: &InterferometerConfig<T>, swept: Swept, value: T) -> Result<InterferometerConfig<T>, String> {
    let mut cfg = *base;
    match swept {
        Swept::LossL => cfg.losses.l = value,
        Swept::LossEta => cfg.losses.eta = value,
        Swept::G2 => cfg.stage2 = GainFactor::from_amplitude(value).map_err(|e| e.to_string())?,
        Swept::Phi => cfg.probe.phi = value,
    }
    validate_config(cfg).map_err(|e| e.to_string())
}

fn evaluate<T: Scalar>(spec: &SweepSpec<T>, value: T) -> SweepRow<T> {
    let cfg = match apply(&spec.base, spec.swept, value) {
        Ok(cfg) => cfg,
        Err(error) => {
            return SweepRow {
                swept_value: value,
                visibility_su: T::nan(),
                visibility_mz: T::nan(),
                snr_su: T::nan(),
                snr_mz: T::nan(),
                optimal_g2_for_v: None,
                optimal_g2_for_snr: None,
                visibility_su_opt: None,
                snr_su_opt: None,
                condition_residual: T::nan(),
                exact: false,
                error: Some(error),
            }
        }
    };
    let snr = |c: &InterferometerConfig<T>| match spec.scheme {
        DetectionScheme::Id => analytic::snr_su_id(c).value,
        DetectionScheme::Bhd => analytic::snr_su_bhd(c).value,
    };
    let mut row = SweepRow {
        swept_value: value,
        visibility_su: analytic::visibility_su(&cfg).value,
        visibility_mz: analytic::visibility_mz(&cfg.losses).value,
        snr_su: snr(&cfg),
        snr_mz: analytic::snr_mz(&cfg.losses, &cfg.stage1, &cfg.probe, cfg.seed.mean_photon_number).value,
        optimal_g2_for_v: None,
        optimal_g2_for_snr: None,
        visibility_su_opt: None,
        snr_su_opt: None,
        condition_residual: analytic::condition_residual(&cfg, spec.scheme),
        exact: false,
        error: None,
    };
    if let Some(objective) = spec.objective {
        if objective.visibility() {
            let o = optimize_g2(&cfg, Objective::Visibility, spec.scheme, spec.bounds);
            row.optimal_g2_for_v = Some(o.gain.amplitude());
            row.visibility_su_opt = Some(o.value);
            row.exact = o.exact;
        }
        if objective.snr() {
            let o = optimize_g2(&cfg, Objective::Snr, spec.scheme, spec.bounds);
            row.optimal_g2_for_snr = Some(o.gain.amplitude());
            row.snr_su_opt = Some(o.value);
            if !objective.visibility() {
                row.exact = o.exact;
            }
        }
    }
    row
}

/// Evaluates every grid point in parallel and returns rows in grid order.
/// A failing point is recorded in its row; the sweep itself only fails on an
/// invalid spec.
pub fn run_sweep<T: Scalar>(spec: &SweepSpec<T>) -> Result<SweepResult<T>, ValidationReport> {
    spec.validate()?;
    let rows = spec.grid.values().into_par_iter().map(|v| evaluate(spec, v)).collect();
    Ok(SweepResult {
        swept: spec.swept,
        scheme: spec.scheme,
        rows,
    })
}
