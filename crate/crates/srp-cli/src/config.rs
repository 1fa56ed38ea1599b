//! JSON experiment configuration.
//!
//! One config file drives one experiment run. The shared schema:
//!
//! ```json
//! {
//!   "kind": "tail_convergence",
//!   "mixture": [
//!     {"weight": 0.5, "intensity": {"type": "common_profile", "rate": 1.0,
//!       "profile": {"type": "sinusoidal", "period": 1.0, "amplitude": 0.5}}},
//!     {"weight": 0.5, "intensity": {"type": "common_profile", "rate": 3.0,
//!       "profile": {"type": "sinusoidal", "period": 1.0, "amplitude": 0.5}}}
//!   ],
//!   "layout": "proportional",
//!   "n_list": [1000, 100000],
//!   "horizon": 2.0,
//!   "time_grid": {"start": 0.25, "stop": 1.5, "points": 6},
//!   "y_grid": {"start": 0.0, "stop": 0.95, "points": 21},
//!   "seeds": [1, 2, 3, 4, 5, 6, 7, 8],
//!   "out_dir": "out"
//! }
//! ```
//!
//! Kind-specific fields: `pde_residual` takes `h` and `grid_side` (and its
//! mixture must use the proportional layout); `timechange` and `fit` take
//! `zipf` {"a", "b"}, `profile`, and `scaled_time_grid` instead of a
//! mixture (the population is one Zipf class per rank, sizes from
//! `n_list`); `fit` accepts an optional `fit_input` CSV (header `S,x`) to
//! skip generation. Grids accept `"spacing": "log"` for log-spaced points
//! (start > 0).
//!
//! Randomness is split by counters, never shared: replica `seed` plus
//! particle index i uses stream i+1 of a ChaCha8 generator seeded with
//! `seed`, and bootstrap resample r uses stream r. Identical config and
//! seeds therefore reproduce every output byte regardless of thread count.

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use srp_core::timechange::ZipfFamily;
use srp_core::{ActivityProfile, IntensitySpec, Layout, MixtureSpec};
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    BoundaryConvergence,
    TailConvergence,
    SupNormSweep,
    PdeResidual,
    Timechange,
    Fit,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExperimentKind::BoundaryConvergence => "boundary_convergence",
            ExperimentKind::TailConvergence => "tail_convergence",
            ExperimentKind::SupNormSweep => "sup_norm_sweep",
            ExperimentKind::PdeResidual => "pde_residual",
            ExperimentKind::Timechange => "timechange",
            ExperimentKind::Fit => "fit",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// An inclusive, ascending point grid.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl GridConfig {
    pub fn values(&self, field: &str) -> Result<Vec<f64>> {
        if self.points == 0 {
            bail!("{field}: needs at least one point");
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.start <= self.stop) {
            bail!("{field}: needs finite start ≤ stop");
        }
        if self.spacing == Spacing::Log && self.start <= 0.0 {
            bail!("{field}: log spacing needs start > 0");
        }
        if self.points == 1 {
            return Ok(vec![self.start]);
        }
        let n = self.points;
        Ok((0..n)
            .map(|j| {
                let f = j as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.start + (self.stop - self.start) * f,
                    Spacing::Log => self.start * (self.stop / self.start).powf(f),
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    Constant,
    Sinusoidal { period: f64, amplitude: f64 },
    PiecewiseConstant { breakpoints: Vec<f64>, levels: Vec<f64> },
}

impl ProfileConfig {
    pub fn build(&self, field: &str) -> Result<ActivityProfile> {
        match self {
            ProfileConfig::Constant => Ok(ActivityProfile::constant()),
            ProfileConfig::Sinusoidal { period, amplitude } => {
                ActivityProfile::sinusoidal(*period, *amplitude)
                    .with_context(|| format!("{field}: invalid sinusoidal profile"))
            }
            ProfileConfig::PiecewiseConstant {
                breakpoints,
                levels,
            } => ActivityProfile::piecewise_constant(breakpoints.clone(), levels.clone())
                .with_context(|| format!("{field}: invalid piecewise profile")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum IntensityConfig {
    Homogeneous { rate: f64 },
    CommonProfile { rate: f64, profile: ProfileConfig },
    PiecewiseLinearCumulative { knots: Vec<(f64, f64)> },
}

impl IntensityConfig {
    pub fn build(&self, field: &str) -> Result<IntensitySpec> {
        match self {
            IntensityConfig::Homogeneous { rate } => IntensitySpec::homogeneous(*rate)
                .with_context(|| format!("{field}: invalid homogeneous intensity")),
            IntensityConfig::CommonProfile { rate, profile } => {
                let profile = profile.build(&format!("{field}.profile"))?;
                IntensitySpec::common_profile(*rate, profile)
                    .with_context(|| format!("{field}: invalid common-profile intensity"))
            }
            IntensityConfig::PiecewiseLinearCumulative { knots } => {
                IntensitySpec::piecewise_linear_cumulative(knots.clone())
                    .with_context(|| format!("{field}: invalid piecewise-linear cumulative"))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureAtomConfig {
    pub weight: f64,
    pub intensity: IntensityConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutConfig {
    Proportional,
    Blocks,
}

impl From<LayoutConfig> for Layout {
    fn from(l: LayoutConfig) -> Layout {
        match l {
            LayoutConfig::Proportional => Layout::Proportional,
            LayoutConfig::Blocks => Layout::Blocks,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZipfConfig {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub mixture: Option<Vec<MixtureAtomConfig>>,
    #[serde(default)]
    pub layout: Option<LayoutConfig>,
    #[serde(default)]
    pub n_list: Vec<usize>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub horizon: Option<f64>,
    #[serde(default)]
    pub time_grid: Option<GridConfig>,
    #[serde(default)]
    pub y_grid: Option<GridConfig>,
    #[serde(default)]
    pub scaled_time_grid: Option<GridConfig>,
    #[serde(default)]
    pub h: Option<f64>,
    #[serde(default)]
    pub grid_side: Option<usize>,
    #[serde(default)]
    pub zipf: Option<ZipfConfig>,
    #[serde(default)]
    pub profile: Option<ProfileConfig>,
    #[serde(default)]
    pub fit_input: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .with_context(|| format!("cannot parse config {}", path.display()))?;
        config.check_common()?;
        Ok(config)
    }

    fn check_common(&self) -> Result<()> {
        if !self.n_list.windows(2).all(|w| w[0] < w[1]) {
            bail!("n_list: must be strictly increasing");
        }
        for (field, grid) in [
            ("time_grid", &self.time_grid),
            ("y_grid", &self.y_grid),
            ("scaled_time_grid", &self.scaled_time_grid),
        ] {
            if let Some(g) = grid {
                g.values(field)?;
            }
        }
        Ok(())
    }

    pub fn require_seeds(&self) -> Result<&[u64]> {
        if self.seeds.is_empty() {
            bail!("seeds: need at least one seed");
        }
        Ok(&self.seeds)
    }

    pub fn require_n_list(&self) -> Result<&[usize]> {
        if self.n_list.is_empty() {
            bail!("n_list: need at least one population size");
        }
        Ok(&self.n_list)
    }

    pub fn require_mixture(&self) -> Result<MixtureSpec> {
        let atoms = self
            .mixture
            .as_ref()
            .filter(|m| !m.is_empty())
            .ok_or_else(|| anyhow::anyhow!("mixture: required for this experiment"))?;
        let built = atoms
            .iter()
            .enumerate()
            .map(|(i, atom)| {
                Ok((
                    atom.weight,
                    atom.intensity.build(&format!("mixture[{i}].intensity"))?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        MixtureSpec::build(built).context("mixture: invalid")
    }

    pub fn require_layout(&self) -> Result<Layout> {
        self.layout
            .map(Layout::from)
            .ok_or_else(|| anyhow::anyhow!("layout: required for this experiment"))
    }

    pub fn require_horizon(&self, at_least: f64) -> Result<f64> {
        let h = self
            .horizon
            .ok_or_else(|| anyhow::anyhow!("horizon: required for this experiment"))?;
        if !(h.is_finite() && h > 0.0) {
            bail!("horizon: must be positive and finite");
        }
        if h < at_least {
            bail!("horizon: {h} is shorter than the largest requested time {at_least}");
        }
        Ok(h)
    }

    pub fn require_grid(&self, field: &str) -> Result<Vec<f64>> {
        let grid = match field {
            "time_grid" => &self.time_grid,
            "y_grid" => &self.y_grid,
            "scaled_time_grid" => &self.scaled_time_grid,
            _ => unreachable!("unknown grid field {field}"),
        };
        grid.as_ref()
            .ok_or_else(|| anyhow::anyhow!("{field}: required for this experiment"))?
            .values(field)
    }

    pub fn require_h(&self) -> Result<f64> {
        let h = self.h.ok_or_else(|| anyhow::anyhow!("h: required for this experiment"))?;
        if !(h > 0.0 && h.is_finite()) {
            bail!("h: must be positive and finite");
        }
        Ok(h)
    }

    pub fn require_grid_side(&self) -> Result<usize> {
        let side = self
            .grid_side
            .ok_or_else(|| anyhow::anyhow!("grid_side: required for this experiment"))?;
        if side < 2 {
            bail!("grid_side: must be at least 2");
        }
        Ok(side)
    }

    pub fn require_zipf(&self, n: usize) -> Result<ZipfFamily> {
        let z = self
            .zipf
            .ok_or_else(|| anyhow::anyhow!("zipf: required for this experiment"))?;
        ZipfFamily::new(z.a, z.b, n).context("zipf: invalid")
    }

    pub fn require_profile(&self) -> Result<ActivityProfile> {
        self.profile
            .as_ref()
            .ok_or_else(|| anyhow::anyhow!("profile: required for this experiment"))?
            .build("profile")
    }
}
