//! Experiment configuration: JSON-file format and validation.

use crate::error::{Error, Result};
use crate::model::{FiniteModelClass, Metric, SobolevBall};
use crate::spline::{PiecewiseLinear, SplineSpace};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Which experiment a run drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Rate,
    CompareReg,
    Noisy,
    ChebDemo,
    Recover,
}

/// How the space dimension and regularization weight are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleChoice {
    Practical,
    Theoretical,
    Explicit { n: usize, mu: f64 },
}

/// Bounded-noise settings: the empirical-norm budget γ and the data-term
/// weight τ of the noise-aware loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub gamma: f64,
    #[serde(default = "default_tau")]
    pub tau: f64,
}

fn default_tau() -> f64 {
    0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Which spline space the solver works in: a uniform grid, or the uniform
/// grid merged with the sample sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Uniform,
    Merged,
}

/// One member of a finite candidate class, as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MemberSpec {
    Constant { constant: f64 },
    Inline { knots: Vec<f64>, coeffs: Vec<f64> },
    File { path: PathBuf },
}

impl MemberSpec {
    pub fn build(&self) -> Result<PiecewiseLinear> {
        match self {
            MemberSpec::Constant { constant } => {
                PiecewiseLinear::new(SplineSpace::uniform(1)?, vec![*constant, *constant])
            }
            MemberSpec::Inline { knots, coeffs } => {
                PiecewiseLinear::new(SplineSpace::new(knots.clone())?, coeffs.clone())
            }
            MemberSpec::File { path } => PiecewiseLinear::load(path),
        }
    }
}

/// The model class the loss penalizes against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelConfig {
    Sobolev {
        #[serde(default = "default_radius")]
        radius: f64,
    },
    Finite {
        members: Vec<MemberSpec>,
        metric: Metric,
    },
}

fn default_radius() -> f64 {
    1.0
}

impl ModelConfig {
    pub fn sobolev_ball(&self, p: f64) -> Result<SobolevBall> {
        match self {
            ModelConfig::Sobolev { radius } => SobolevBall::new(p, *radius),
            ModelConfig::Finite { .. } => Err(Error::Config(
                "this experiment needs a sobolev model, got a finite class".into(),
            )),
        }
    }

    pub fn finite_class(&self) -> Result<FiniteModelClass> {
        match self {
            ModelConfig::Finite { members, metric } => {
                let built: Result<Vec<_>> = members.iter().map(MemberSpec::build).collect();
                FiniteModelClass::new(built?, *metric)
            }
            ModelConfig::Sobolev { .. } => Err(Error::Config(
                "this experiment needs a finite class, got a sobolev model".into(),
            )),
        }
    }
}

/// Full description of an experiment run.  The JSON config file mirrors the
/// field names; every field has a default, so `{}` is a valid config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Target oracle id: `quarter_sqrt`, `linear`, `constant:<v>`,
    /// `spline:<path>`.
    pub target: String,
    /// Smoothness exponent of the model ball.
    pub p: f64,
    /// Sample counts, strictly increasing; sites are nested across them.
    pub m_list: Vec<usize>,
    pub seed: u64,
    pub schedule: ScheduleChoice,
    pub noise: Option<NoiseConfig>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    /// Data-term exponent of the powered loss.
    pub alpha: f64,
    /// Penalty exponent; defaults to `p` when absent.
    pub beta: Option<f64>,
    pub model: ModelConfig,
    pub space: SpaceKind,
    /// Points per unit length in the geometry demo.
    pub resolution: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: ExperimentKind::Rate,
            target: "quarter_sqrt".into(),
            p: 1.5,
            m_list: vec![10, 20, 40, 80, 160, 320],
            seed: 1193,
            schedule: ScheduleChoice::Practical,
            noise: None,
            output: None,
            format: OutputFormat::Csv,
            alpha: 2.0,
            beta: None,
            model: ModelConfig::Sobolev { radius: 1.0 },
            space: SpaceKind::Uniform,
            resolution: 1000,
        }
    }
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }

    /// The penalty exponent actually used: `beta`, or `p` when unset.
    pub fn beta_or_p(&self) -> f64 {
        self.beta.unwrap_or(self.p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_list.is_empty() {
            return Err(Error::Config("m_list must not be empty".into()));
        }
        for pair in self.m_list.windows(2) {
            if pair[0] >= pair[1] {
                return Err(Error::Config(format!(
                    "m_list must be strictly increasing, got {} before {}",
                    pair[0], pair[1]
                )));
            }
        }
        if self.m_list[0] < 2 {
            return Err(Error::Config(
                "each sample count must be at least 2 (both endpoints are sampled)".into(),
            ));
        }
        if !self.p.is_finite() || self.p <= 1.0 {
            return Err(Error::Config(format!(
                "p must be a finite exponent above 1, got {}",
                self.p
            )));
        }
        if !self.alpha.is_finite() || self.alpha < 1.0 {
            return Err(Error::Config(format!(
                "alpha must be at least 1, got {}",
                self.alpha
            )));
        }
        if let Some(beta) = self.beta {
            if !beta.is_finite() || beta < 1.0 {
                return Err(Error::Config(format!("beta must be at least 1, got {beta}")));
            }
        }
        if let ScheduleChoice::Explicit { n, mu } = self.schedule {
            if n == 0 {
                return Err(Error::Config("explicit schedule needs n >= 1".into()));
            }
            if !mu.is_finite() || mu < 0.0 {
                return Err(Error::Config(format!(
                    "explicit schedule needs mu >= 0, got {mu}"
                )));
            }
        }
        if let Some(noise) = &self.noise {
            if !noise.gamma.is_finite() || noise.gamma < 0.0 {
                return Err(Error::Config(format!(
                    "noise budget gamma must be nonnegative, got {}",
                    noise.gamma
                )));
            }
            if noise.gamma > 1.0 {
                return Err(Error::UnsupportedParameter(format!(
                    "noise budget gamma = {} exceeds 1; the analysis assumes gamma <= 1",
                    noise.gamma
                )));
            }
            if !(noise.tau > 0.0 && noise.tau <= 1.0) {
                return Err(Error::Config(format!(
                    "tau must lie in (0, 1], got {}",
                    noise.tau
                )));
            }
        }
        if self.resolution < 100 {
            return Err(Error::Config(format!(
                "resolution must be at least 100 points per unit length, got {}",
                self.resolution
            )));
        }
        if let ModelConfig::Finite { members, .. } = &self.model {
            if members.is_empty() {
                return Err(Error::Config("a finite class needs members".into()));
            }
        }
        Ok(())
    }
}
