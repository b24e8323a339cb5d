//! JSON run configuration.
//!
//! Every section is optional and defaults to the baseline operating point
//! (G₁ = 3, G₂ = 5, l = 0.96, η = 0.4, optical seed of 10⁶ photons, probe
//! 1 mrad off the dark fringe). Unknown keys are rejected at every level.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use salhi_core::analytic::DetectionScheme;
use salhi_core::model::{ConfigDraft, GainSpec, ProbeSettings, SeedKind, SeedSpec, DEFAULT_DARK_OFFSET, DEFAULT_DELTA, DEFAULT_PHOTONS};
use salhi_core::optimizer::{Grid, SweepObjective, SweepSpec, Swept};
use salhi_core::{Bounds, Config, Losses};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GainInput {
    Amplitude(f64),
    Squeeze(f64),
}

impl From<GainInput> for GainSpec<f64> {
    fn from(g: GainInput) -> Self {
        match g {
            GainInput::Amplitude(a) => GainSpec::Amplitude(a),
            GainInput::Squeeze(r) => GainSpec::Squeeze(r),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossInput {
    pub l: f64,
    pub eta: f64,
}

impl Default for LossInput {
    fn default() -> Self {
        Self { l: 0.96, eta: 0.4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeedInput {
    pub kind: SeedKind,
    pub mean_photon_number: f64,
    pub alpha_phase: f64,
}

impl Default for SeedInput {
    fn default() -> Self {
        Self {
            kind: SeedKind::Optical,
            mean_photon_number: DEFAULT_PHOTONS,
            alpha_phase: 0.0,
        }
    }
}

/// `phi` defaults to `π + dark_offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeInput {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    pub delta: f64,
    pub dark_offset: f64,
}

impl Default for ProbeInput {
    fn default() -> Self {
        Self {
            phi: None,
            delta: DEFAULT_DELTA,
            dark_offset: DEFAULT_DARK_OFFSET,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsInput {
    pub min: f64,
    pub max: f64,
}

impl Default for BoundsInput {
    fn default() -> Self {
        let b = Bounds::default();
        Self { min: b.min, max: b.max }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepInput {
    pub swept: Swept,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub objective: Option<SweepObjective>,
}

impl Default for SweepInput {
    fn default() -> Self {
        Self {
            swept: Swept::LossL,
            min: 0.6,
            max: 0.96,
            points: 37,
            objective: Some(SweepObjective::Both),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputInput {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub formats: Vec<Format>,
}

fn default_stage1() -> GainInput {
    GainInput::Amplitude(3.0)
}

fn default_stage2() -> GainInput {
    GainInput::Amplitude(5.0)
}

fn default_scheme() -> DetectionScheme {
    DetectionScheme::Id
}

fn default_random_seed() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_stage1")]
    pub stage1: GainInput,
    #[serde(default = "default_stage2")]
    pub stage2: GainInput,
    #[serde(default)]
    pub losses: LossInput,
    #[serde(default)]
    pub seed: SeedInput,
    #[serde(default)]
    pub probe: ProbeInput,
    #[serde(default = "default_scheme")]
    pub scheme: DetectionScheme,
    #[serde(default)]
    pub bounds: BoundsInput,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepInput>,
    #[serde(default)]
    pub output: OutputInput,
    #[serde(default = "default_random_seed")]
    pub random_seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config uses defaults")
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| anyhow!("{e}"))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    #[cfg(test)]
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checked interferometer configuration; every violated field is named.
    pub fn interferometer(&self) -> Result<Config> {
        let probe = ProbeSettings {
            phi: self.probe.phi.unwrap_or(std::f64::consts::PI + self.probe.dark_offset),
            delta: self.probe.delta,
            dark_offset: self.probe.dark_offset,
        };
        let draft = ConfigDraft {
            stage1: self.stage1.into(),
            stage2: self.stage2.into(),
            losses: Losses {
                l: self.losses.l,
                eta: self.losses.eta,
            },
            seed: SeedSpec {
                kind: self.seed.kind,
                mean_photon_number: self.seed.mean_photon_number,
                alpha_phase: self.seed.alpha_phase,
            },
            probe,
        };
        draft.build().map_err(|report| anyhow!("invalid configuration: {report}"))
    }

    pub fn bounds(&self) -> Bounds {
        Bounds {
            min: self.bounds.min,
            max: self.bounds.max,
        }
    }

    pub fn sweep_spec(&self, points_override: Option<usize>) -> Result<SweepSpec<f64>> {
        let s = self.sweep.unwrap_or_default();
        Ok(SweepSpec {
            swept: s.swept,
            grid: Grid {
                min: s.min,
                max: s.max,
                points: points_override.unwrap_or(s.points),
            },
            base: self.interferometer()?,
            scheme: self.scheme,
            objective: s.objective,
            bounds: self.bounds(),
        })
    }
}
