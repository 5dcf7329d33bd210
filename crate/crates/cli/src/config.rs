//! JSON run configuration.

use std::path::{Path, PathBuf};

use chiralq_core::diffops::{SpacetimeGrid, StencilSpec};
use chiralq_core::presets::{GaussianPulse, StaticCharge};
use chiralq_core::verify::VerifyOptions;
use chiralq_core::MediumParams;
use clap::ValueEnum;
use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum RunKind {
    Fundamental,
    FourierCheck,
    KernelCheck,
    Solve,
    Verify,
}

impl RunKind {
    pub fn name(self) -> &'static str {
        match self {
            RunKind::Fundamental => "fundamental",
            RunKind::FourierCheck => "fourier-check",
            RunKind::KernelCheck => "kernel-check",
            RunKind::Solve => "solve",
            RunKind::Verify => "verify",
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    pub epsilon: f64,
    pub mu: f64,
    pub beta: f64,
}

impl Default for MediumConfig {
    fn default() -> Self {
        Self {
            epsilon: 1.0,
            mu: 1.0,
            beta: 0.5,
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Spacing {
    Uniform(f64),
    PerAxis([f64; 3]),
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dt: f64,
    pub dx: Spacing,
    pub counts: [usize; 4],
    /// `(t, x1, x2, x3)` of the first node.
    pub origin: [f64; 4],
}

impl GridConfig {
    pub fn build(&self) -> Result<SpacetimeGrid, CliError> {
        let dx = match self.dx {
            Spacing::Uniform(h) => [h; 3],
            Spacing::PerAxis(h) => h,
        };
        SpacetimeGrid::new(self.dt, dx, self.counts, self.origin).map_err(|e| CliError::Config(format!("grid: {e}")))
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct GaussianPulseConfig {
    pub j0: [f64; 3],
    pub center: [f64; 3],
    pub sigma: f64,
    pub t_center: f64,
    pub sigma_t: f64,
    pub cutoff: f64,
}

impl Default for GaussianPulseConfig {
    fn default() -> Self {
        let p = GaussianPulse::default();
        Self {
            j0: p.j0,
            center: p.center,
            sigma: p.sigma,
            t_center: p.t_center,
            sigma_t: p.sigma_t,
            cutoff: p.cutoff,
        }
    }
}

impl From<GaussianPulseConfig> for GaussianPulse {
    fn from(c: GaussianPulseConfig) -> Self {
        GaussianPulse {
            j0: c.j0,
            center: c.center,
            sigma: c.sigma,
            t_center: c.t_center,
            sigma_t: c.sigma_t,
            cutoff: c.cutoff,
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct StaticChargeConfig {
    pub charge: f64,
    pub center: [f64; 3],
    pub sigma: f64,
}

impl Default for StaticChargeConfig {
    fn default() -> Self {
        let p = StaticCharge::default();
        Self {
            charge: p.charge,
            center: p.center,
            sigma: p.sigma,
        }
    }
}

impl From<StaticChargeConfig> for StaticCharge {
    fn from(c: StaticChargeConfig) -> Self {
        StaticCharge {
            charge: c.charge,
            center: c.center,
            sigma: c.sigma,
        }
    }
}

/// `{"gaussian_pulse": {...}}`, `{"static_charge": {...}}` or
/// `{"file": {"path": "..."}}`; the file holds `t,x1,x2,x3,rho,j1,j2,j3`.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceConfig {
    GaussianPulse(GaussianPulseConfig),
    StaticCharge(StaticChargeConfig),
    File { path: PathBuf },
}

impl Default for SourceConfig {
    fn default() -> Self {
        SourceConfig::GaussianPulse(GaussianPulseConfig::default())
    }
}

/// Thresholds of the optional assertions; an absent value disables the
/// corresponding check.
#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Contour height of `fourier-check`.
    pub fourier_y: f64,
    /// Relative agreement required by `fourier-check`.
    pub fourier_rel: Option<f64>,
    /// Bound on `max ‖M f‖` in `kernel-check`.
    pub kernel_residual: Option<f64>,
    /// Bound on the largest Maxwell residual in `solve`.
    pub maxwell_residual: Option<f64>,
    /// Accepted `max |scalar V| / max ‖V‖` in `solve`.
    pub scalar_ratio: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            fourier_y: 0.05,
            fourier_rel: Some(1e-4),
            kernel_residual: None,
            maxwell_residual: None,
            scalar_ratio: chiralq_core::solver::DEFAULT_SCALAR_TOL,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Source cells; by default the smallest lattice aligned with the
    /// outputs that covers the source support.
    pub cells: Option<GridConfig>,
    /// Excluded ball radius; half the cell width by default.
    pub r0: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub seed: u64,
    pub a7_levels: Vec<usize>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        let o = VerifyOptions::default();
        Self {
            seed: o.seed,
            a7_levels: o.a7_levels,
        }
    }
}

impl From<&VerifyConfig> for VerifyOptions {
    fn from(c: &VerifyConfig) -> Self {
        VerifyOptions {
            seed: c.seed,
            a7_levels: c.a7_levels.clone(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Must agree with the command line when given.
    pub kind: Option<RunKind>,
    pub medium: MediumConfig,
    pub grid: Option<GridConfig>,
    pub source: SourceConfig,
    pub tolerances: Tolerances,
    pub stencil_order: usize,
    pub solver: SolverConfig,
    pub verify: VerifyConfig,
    /// CSV destination; standard output when absent.
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            kind: None,
            medium: MediumConfig::default(),
            grid: None,
            source: SourceConfig::default(),
            tolerances: Tolerances::default(),
            stencil_order: 2,
            solver: SolverConfig::default(),
            verify: VerifyConfig::default(),
            output: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative source paths are taken relative to it.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        if let SourceConfig::File { path: p } = &mut cfg.source {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        self.params()?;
        self.stencil()?;
        if let Some(g) = &self.grid {
            g.build()?;
        }
        if let Some(c) = &self.solver.cells {
            c.build()?;
        }
        let t = &self.tolerances;
        if !(t.fourier_y > 0.0 && t.fourier_y.is_finite()) {
            return Err(CliError::Config(format!("tolerances.fourier_y must be positive, got {}", t.fourier_y)));
        }
        let checks = [t.fourier_rel, t.kernel_residual, t.maxwell_residual, Some(t.scalar_ratio)];
        if checks.into_iter().flatten().any(|v| !(v >= 0.0)) {
            return Err(CliError::Config("tolerances must be nonnegative".into()));
        }
        if self.verify.a7_levels.iter().any(|&n| n == 0 || n % 6 != 0) {
            return Err(CliError::Config("verify.a7_levels must be positive multiples of 6".into()));
        }
        if let Some(r0) = self.solver.r0 {
            if !(r0 >= 0.0 && r0.is_finite()) {
                return Err(CliError::Config(format!("solver.r0 must be nonnegative, got {r0}")));
            }
        }
        Ok(())
    }

    pub fn params(&self) -> Result<MediumParams, CliError> {
        let m = self.medium;
        MediumParams::new(m.epsilon, m.mu, m.beta).map_err(|e| CliError::Config(format!("medium: {e}")))
    }

    pub fn stencil(&self) -> Result<StencilSpec, CliError> {
        StencilSpec::new(self.stencil_order).map_err(|e| CliError::Config(format!("stencil_order: {e}")))
    }

    pub fn grid(&self) -> Result<SpacetimeGrid, CliError> {
        match &self.grid {
            Some(g) => g.build(),
            None => Err(CliError::Config("this run kind needs a grid".into())),
        }
    }
}
