//! Experiment configuration: TOML file, then `ONELEG_*` environment overrides, then flags.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use oneleg::certify::CertifyParams;
use oneleg::spectral::{random_divfree_field, Spectrum};
use oneleg::{ForcingSpec, RunConfig, TorusGrid, Variant, VelocityField};
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub forcing: ForcingSpec,
    #[serde(default)]
    pub certify: CertifySection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    /// Where files go is not part of the experiment, so it stays out of the echo.
    #[serde(default, skip_serializing)]
    pub output: OutputSection,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub nu: f64,
    pub theta: f64,
    pub tau: f64,
    pub steps: usize,
    /// Retained modes per direction; must be even.
    pub resolution: usize,
    pub domain_length: f64,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    pub newton: bool,
    pub snapshot_stride: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            nu: 0.1,
            theta: 0.75,
            tau: 0.01,
            steps: 1000,
            resolution: 32,
            domain_length: TAU,
            picard_tol: 1e-12,
            picard_max_iter: 200,
            newton: true,
            snapshot_stride: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    Zero,
    Random,
    TaylorGreen,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialSection {
    pub kind: InitialKind,
    /// `‖u₀‖` for random fields, the velocity amplitude for Taylor–Green.
    pub amplitude: f64,
    pub decay: f64,
    pub seed: u64,
}

impl Default for InitialSection {
    fn default() -> Self {
        Self {
            kind: InitialKind::Random,
            amplitude: 1.0,
            decay: 1.5,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CertifySection {
    pub r: Option<f64>,
    pub horizon: Option<f64>,
    pub eps1: Option<f64>,
    pub delta1: Option<f64>,
    pub variant: Variant,
    pub tol: f64,
}

impl Default for CertifySection {
    fn default() -> Self {
        let p = CertifyParams::default();
        Self {
            r: p.r,
            horizon: p.horizon,
            eps1: p.eps1,
            delta1: p.delta1,
            variant: p.variant,
            tol: p.tol,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub theta: Vec<f64>,
    pub tau: Vec<f64>,
    #[serde(default)]
    pub nu: Vec<f64>,
    /// Multipliers applied to the configured forcing.
    #[serde(default)]
    pub forcing_scale: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

fn config_err(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

fn env_override<T: std::str::FromStr>(name: &str, slot: &mut T) -> Result<(), Failure> {
    if let Ok(v) = std::env::var(name) {
        *slot = v.trim().parse().map_err(|_| config_err(format!("{name}={v} does not parse")))?;
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| config_err(format!("{}: {e}", p.display())))?;
                toml::from_str(&text).map_err(|e| config_err(format!("{}: {e}", p.display())))?
            }
            None => Self::default(),
        };
        env_override("ONELEG_NU", &mut cfg.run.nu)?;
        env_override("ONELEG_THETA", &mut cfg.run.theta)?;
        env_override("ONELEG_TAU", &mut cfg.run.tau)?;
        env_override("ONELEG_STEPS", &mut cfg.run.steps)?;
        env_override("ONELEG_SEED", &mut cfg.initial.seed)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Failure> {
        if let Some(s) = &self.sweep {
            if s.theta.is_empty() || s.tau.is_empty() {
                return Err(config_err("sweep axes theta and tau must be nonempty"));
            }
        }
        if !(self.initial.amplitude >= 0.0) {
            return Err(config_err("initial amplitude must be nonnegative"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<TorusGrid, Failure> {
        Ok(TorusGrid::new(self.run.resolution, self.run.domain_length)?)
    }

    pub fn initial_field(&self, grid: &TorusGrid) -> VelocityField {
        let i = &self.initial;
        match i.kind {
            InitialKind::Zero => VelocityField::zero(grid),
            InitialKind::Random => random_divfree_field(
                grid,
                i.seed,
                Spectrum {
                    amplitude: i.amplitude,
                    decay: i.decay,
                },
            ),
            InitialKind::TaylorGreen => VelocityField::taylor_green(grid, i.amplitude),
        }
    }

    pub fn run_config(&self) -> Result<RunConfig, Failure> {
        let grid = self.grid()?;
        let r = &self.run;
        let mut cfg = RunConfig::new(self.initial_field(&grid), r.nu, r.theta, r.tau, r.steps)
            .with_forcing(self.forcing.clone());
        cfg.picard_tol = r.picard_tol;
        cfg.picard_max_iter = r.picard_max_iter;
        cfg.newton_enabled = r.newton;
        cfg.snapshot_stride = r.snapshot_stride;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn certify_params(&self) -> CertifyParams {
        let c = &self.certify;
        CertifyParams {
            r: c.r,
            horizon: c.horizon,
            eps1: c.eps1,
            delta1: c.delta1,
            variant: c.variant,
            tol: c.tol,
        }
    }

    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
