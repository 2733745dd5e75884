//! Experiment configuration files.
//!
//! A config is a TOML document. Unknown keys are rejected so that a typo
//! never silently falls back to a default.
//!
//! ```toml
//! experiment = "stability"
//! delta = 0.5
//! seed = 0
//! output_every = 10
//!
//! [system]
//! name = "semilinear-bilinear"
//! kappa = 1.0
//!
//! [profile]
//! name = "sech"
//! amplitude = 1.0
//!
//! [grid]
//! x_min = -140.0
//! x_max = 140.0
//! nx = 2801
//! t_end = 100.0
//!
//! [data]
//! shape = "compact-bump"
//! center = 0.0
//! width = 5.0
//! epsilon = 1e-3
//! normalize = true
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use travwave_core::data::{Motion, DATA_SHAPES};
use travwave_core::profile::PROFILE_CATALOG;
use travwave_core::system::SYSTEM_CATALOG;
use travwave_core::{Boundary, GridSpec, SystemParams};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Stability,
    ZeroPerturbation,
    Amplification,
    Violation,
    BoostEquivalence,
    Convergence,
    Sweep,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Stability => "stability",
            ExperimentKind::ZeroPerturbation => "zero-perturbation",
            ExperimentKind::Amplification => "amplification",
            ExperimentKind::Violation => "violation",
            ExperimentKind::BoostEquivalence => "boost-equivalence",
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    pub delta: f64,
    #[serde(default = "default_output_every")]
    pub output_every: usize,
    /// Output directory; the CLI's `--out` takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub system: SystemConfig,
    pub profile: ProfileConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplification: Option<AmplificationConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<ViolationConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boost: Option<BoostConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

fn default_output_every() -> usize {
    10
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub name: String,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default = "one")]
    pub gamma: f64,
    #[serde(default = "one")]
    pub kappa: f64,
}

impl SystemConfig {
    pub fn params(&self) -> SystemParams {
        SystemParams {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            kappa: self.kappa,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub name: String,
    pub amplitude: f64,
    /// Polarization of vector profiles; the builtin direction when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    #[default]
    Quiet,
    Periodic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub t_end: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default)]
    pub boundary: BoundaryKind,
}

fn default_cfl() -> f64 {
    travwave_core::grid::DEFAULT_CFL
}

impl GridConfig {
    pub fn spec(&self) -> Result<GridSpec> {
        self.spec_with_nx(self.nx)
    }

    pub fn spec_with_nx(&self, nx: usize) -> Result<GridSpec> {
        let boundary = match self.boundary {
            BoundaryKind::Quiet => Boundary::Quiet,
            BoundaryKind::Periodic => Boundary::Periodic,
        };
        Ok(GridSpec::with_boundary(self.x_min, self.x_max, nx, self.t_end, self.cfl, boundary)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MotionKind {
    #[default]
    Still,
    Right,
    Left,
}

impl From<MotionKind> for Motion {
    fn from(m: MotionKind) -> Motion {
        match m {
            MotionKind::Still => Motion::Still,
            MotionKind::Right => Motion::Right,
            MotionKind::Left => Motion::Left,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    #[serde(default = "default_shape")]
    pub shape: String,
    #[serde(default)]
    pub center: f64,
    /// Gaussian width, bump half-width, or wavenumber for `cosine`.
    #[serde(default = "one")]
    pub width: f64,
    /// Amplitude of the shape, or the target initial smallness when
    /// `normalize` is set.
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default)]
    pub normalize: bool,
    #[serde(default)]
    pub motion: MotionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<f64>>,
    /// CSV with columns `x, u0_0.., u1_0..` on a uniform grid; replaces the shape.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

fn default_shape() -> String {
    "zero".into()
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            shape: default_shape(),
            center: 0.0,
            width: 1.0,
            epsilon: 0.0,
            normalize: false,
            motion: MotionKind::Still,
            direction: None,
            file: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplificationConfig {
    /// One run per end time; plateau levels are compared across them.
    pub t_ends: Vec<f64>,
    /// Length of the post-passage window over which flatness is measured.
    #[serde(default = "default_window")]
    pub window: f64,
    /// Distance beyond the profile's support hint at which passage is complete.
    #[serde(default = "default_exit_margin")]
    pub exit_margin: f64,
}

fn default_window() -> f64 {
    20.0
}

fn default_exit_margin() -> f64 {
    5.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViolationConfig {
    /// System run on the same data for contrast.
    #[serde(default = "default_reference")]
    pub reference: String,
}

fn default_reference() -> String {
    "semilinear-bilinear".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoostConfig {
    #[serde(default = "default_margin")]
    pub margin: f64,
}

fn default_margin() -> f64 {
    0.2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExactSolution {
    /// `cos(k x) cos(k t)` on a periodic grid, `k` taken from `data.width`.
    StandingWave,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub nx: Vec<usize>,
    /// Self-convergence between successive grids when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactSolution>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Values replacing `data.epsilon`; the base value when empty.
    #[serde(default)]
    pub epsilon: Vec<f64>,
    /// Values replacing `profile.amplitude`; the base value when empty.
    #[serde(default)]
    pub amplitude: Vec<f64>,
    /// Experiment run at each point.
    #[serde(default = "default_sweep_run")]
    pub run: ExperimentKind,
    #[serde(default = "default_max_runs")]
    pub max_runs: usize,
}

fn default_sweep_run() -> ExperimentKind {
    ExperimentKind::Stability
}

fn default_max_runs() -> usize {
    64
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LabError::Config(msg));
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if !(self.data.epsilon >= 0.0 && self.data.epsilon.is_finite()) {
            return bad(format!("data.epsilon must be finite and nonnegative, got {}", self.data.epsilon));
        }
        if self.output_every == 0 {
            return bad("output_every must be positive".into());
        }
        check_name("system", &self.system.name, SYSTEM_CATALOG)?;
        check_name("profile", &self.profile.name, &PROFILE_CATALOG)?;
        if self.data.file.is_none() {
            check_name("data shape", &self.data.shape, DATA_SHAPES)?;
        }
        if !self.profile.amplitude.is_finite() {
            return bad("profile.amplitude must be finite".into());
        }
        self.grid.spec()?;
        match self.experiment {
            ExperimentKind::Amplification => {
                let a = self.amplification.as_ref().ok_or_else(|| missing("amplification"))?;
                if a.t_ends.is_empty() || a.t_ends.iter().any(|t| !(*t > 0.0)) {
                    return bad("amplification.t_ends must be a nonempty list of positive times".into());
                }
                if !(a.window > 0.0) {
                    return bad("amplification.window must be positive".into());
                }
            }
            ExperimentKind::Violation => {
                let reference = self.violation.as_ref().map_or_else(default_reference, |v| v.reference.clone());
                check_name("system", &reference, SYSTEM_CATALOG)?;
            }
            ExperimentKind::Convergence => {
                let c = self.convergence.as_ref().ok_or_else(|| missing("convergence"))?;
                if c.nx.len() < 3 {
                    return bad("convergence.nx needs at least three grids".into());
                }
                if c.nx.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("convergence.nx must be increasing".into());
                }
                for &nx in &c.nx {
                    self.grid.spec_with_nx(nx)?;
                }
            }
            ExperimentKind::Sweep => {
                let s = self.sweep.as_ref().ok_or_else(|| missing("sweep"))?;
                if matches!(s.run, ExperimentKind::Sweep | ExperimentKind::Convergence) {
                    return bad(format!("sweep.run cannot be `{}`", s.run.name()));
                }
                if s.epsilon.iter().chain(&s.amplitude).any(|v| !v.is_finite()) {
                    return bad("sweep axes must be finite".into());
                }
                if s.epsilon.iter().any(|e| *e < 0.0) {
                    return bad("sweep.epsilon values must be nonnegative".into());
                }
                let runs = s.epsilon.len().max(1) * s.amplitude.len().max(1);
                if runs > s.max_runs {
                    return bad(format!("sweep has {runs} runs, above max_runs = {}", s.max_runs));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

fn missing(table: &str) -> LabError {
    LabError::Config(format!("experiment needs a [{table}] table"))
}

fn check_name(catalog: &str, name: &str, known: &[&str]) -> Result<()> {
    if known.contains(&name) {
        Ok(())
    } else {
        Err(LabError::Config(format!(
            "unknown {catalog} `{name}`; known: {}",
            known.join(", ")
        )))
    }
}
